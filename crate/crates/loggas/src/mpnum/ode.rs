//! Unit-speed complex path tracing with an embedded Dormand-Prince 5(4) pair.

use rug::Float;

use crate::mpnum::{Cx, PrecisionContext};
use crate::{Error, Result};

/// Ordered point chain with cumulative arclength.
#[derive(Clone, Debug)]
pub struct Polyline {
    pub points: Vec<Cx>,
    pub cumulative_length: Vec<Float>,
}

impl Polyline {
    pub fn new(points: Vec<Cx>) -> Self {
        let mut cumulative_length = Vec::with_capacity(points.len());
        let mut acc = Float::new(points.first().map(|p| p.prec()).unwrap_or(64));
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                acc += (p - &points[i - 1]).abs();
            }
            cumulative_length.push(acc.clone());
        }
        Polyline {
            points,
            cumulative_length,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_length(&self) -> Float {
        self.cumulative_length
            .last()
            .cloned()
            .unwrap_or_else(|| Float::new(64))
    }

    pub fn first(&self) -> &Cx {
        &self.points[0]
    }

    pub fn last(&self) -> &Cx {
        self.points.last().unwrap()
    }

    pub fn reversed(&self) -> Polyline {
        let mut pts = self.points.clone();
        pts.reverse();
        Polyline::new(pts)
    }

    /// Point at a given arclength, by linear interpolation.
    pub fn at_arclength(&self, s: &Float) -> Cx {
        let n = self.points.len();
        if n == 1 || *s <= self.cumulative_length[0] {
            return self.points[0].clone();
        }
        for i in 1..n {
            if *s <= self.cumulative_length[i] {
                let seg = Float::with_val(
                    s.prec(),
                    &self.cumulative_length[i] - &self.cumulative_length[i - 1],
                );
                if seg.is_zero() {
                    return self.points[i].clone();
                }
                let frac = Float::with_val(s.prec(), s - &self.cumulative_length[i - 1]) / seg;
                let d = &self.points[i] - &self.points[i - 1];
                return &self.points[i - 1] + &d.scale(&frac);
            }
        }
        self.points[n - 1].clone()
    }

    /// Resample to `n >= 2` points uniformly in arclength (endpoints kept).
    pub fn resample(&self, n: usize) -> Polyline {
        assert!(n >= 2);
        let total = self.total_length();
        let prec = total.prec();
        let mut pts = Vec::with_capacity(n);
        for k in 0..n {
            let s = total.clone() * Float::with_val(prec, k as u32)
                / Float::with_val(prec, (n - 1) as u32);
            pts.push(self.at_arclength(&s));
        }
        Polyline::new(pts)
    }

    /// Structural invariants: strictly increasing cumulative length and
    /// distinct consecutive points.
    pub fn validate(&self) -> Result<()> {
        if self.points.len() != self.cumulative_length.len() {
            return Err(Error::Validation("polyline length tables differ".into()));
        }
        for i in 1..self.points.len() {
            if self.cumulative_length[i] <= self.cumulative_length[i - 1] {
                return Err(Error::Validation(format!(
                    "cumulative length not strictly increasing at index {i}"
                )));
            }
        }
        Ok(())
    }
}

/// Stopping rule for the tracer; any combination of the three spec'd
/// conditions, plus an optional cap on the accepted step length.
#[derive(Clone, Debug, Default)]
pub struct StopRule {
    pub radius: Option<Float>,
    pub arclength_cap: Option<Float>,
    /// (point, snap radius) pairs; tracing stops when the path comes within
    /// the snap radius of a listed point.
    pub near_points: Vec<(Cx, Float)>,
    pub max_step: Option<Float>,
    /// Arclength before which proximity stops are ignored (escape from a
    /// critical point the trace was seeded at).
    pub proximity_grace: Option<Float>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopHit {
    Radius,
    Arclength,
    NearPoint(usize),
}

/// Traced path: polyline, the unit tangents at each node, and what stopped it.
#[derive(Clone, Debug)]
pub struct Trace {
    pub poly: Polyline,
    pub tangents: Vec<Cx>,
    pub hit: StopHit,
}

/// Adaptive embedded Runge-Kutta 5(4) integration of dz/ds = field(z) at unit
/// speed. `field(z, v_prev)` must return a unit vector, using `v_prev` to
/// resolve any sign/branch ambiguity; `v0` seeds the direction.
pub fn trace_unit_speed<F>(
    mut field: F,
    z0: &Cx,
    v0: &Cx,
    stop: &StopRule,
    ctx: &PrecisionContext,
) -> Result<Trace>
where
    F: FnMut(&Cx, &Cx) -> Result<Cx>,
{
    let prec = ctx.bits;
    let tol = ctx.ode_tol_f();

    // Dormand-Prince coefficients as exact rationals at working precision.
    let fr = |n: i64, d: i64| Float::with_val(prec, n) / Float::with_val(prec, d);
    let a21 = fr(1, 5);
    let a31 = fr(3, 40);
    let a32 = fr(9, 40);
    let a41 = fr(44, 45);
    let a42 = fr(-56, 15);
    let a43 = fr(32, 9);
    let a51 = fr(19372, 6561);
    let a52 = fr(-25360, 2187);
    let a53 = fr(64448, 6561);
    let a54 = fr(-212, 729);
    let a61 = fr(9017, 3168);
    let a62 = fr(-355, 33);
    let a63 = fr(46732, 5247);
    let a64 = fr(49, 176);
    let a65 = fr(-5103, 18656);
    let b1 = fr(35, 384);
    let b3 = fr(500, 1113);
    let b4 = fr(125, 192);
    let b5 = fr(-2187, 6784);
    let b6 = fr(11, 84);
    let e1 = fr(5179, 57600);
    let e3 = fr(7571, 16695);
    let e4 = fr(393, 640);
    let e5 = fr(-92097, 339200);
    let e6 = fr(187, 2100);
    let e7 = fr(1, 40);

    let mut z = z0.clone();
    let mut v = field(&z, v0)?;
    let mut points = vec![z.clone()];
    let mut tangents = vec![v.clone()];
    let mut arclen = ctx.float(0.0);

    let default_h = ctx.float(0.01);
    let mut h = match &stop.max_step {
        Some(m) => default_h.min(m),
        None => default_h,
    };
    let h_floor = ctx.pow2(-((ctx.bits / 2) as i64));

    let grace = stop
        .proximity_grace
        .clone()
        .unwrap_or_else(|| ctx.float(0.0));

    let mut hit: Option<StopHit> = None;
    let mut steps = 0u32;
    while hit.is_none() {
        steps += 1;
        if steps > ctx.max_steps {
            return Err(Error::Validation(format!(
                "tracer exceeded max_steps = {} (arclength {})",
                ctx.max_steps,
                arclen.to_f64()
            )));
        }

        // Keep steps small when close to a proximity target so the snap
        // radius cannot be jumped over.
        if arclen >= grace {
            for (p, r) in &stop.near_points {
                let d = (&z - p).abs();
                let mut cap = d / 2u32;
                let half_r = Float::with_val(prec, r / &Float::with_val(prec, 2));
                if cap < half_r {
                    cap = half_r;
                }
                if h > cap {
                    h = cap;
                }
            }
        }
        if let Some(cap) = &stop.arclength_cap {
            let rem = Float::with_val(prec, cap - &arclen);
            if rem <= 0 {
                hit = Some(StopHit::Arclength);
                break;
            }
            if h > rem {
                h = rem;
            }
        }
        if let Some(m) = &stop.max_step {
            if h > *m {
                h = m.clone();
            }
        }

        let k1 = v.clone();
        let k2 = field(&(&z + &k1.scale(&Float::with_val(prec, &a21 * &h))), &k1)?;
        let k3 = field(
            &(&z + &(k1.scale(&a31) + k2.scale(&a32)).scale(&h)),
            &k2,
        )?;
        let k4 = field(
            &(&z + &(k1.scale(&a41) + k2.scale(&a42) + k3.scale(&a43)).scale(&h)),
            &k3,
        )?;
        let k5 = field(
            &(&z + &(k1.scale(&a51) + k2.scale(&a52) + k3.scale(&a53) + k4.scale(&a54)).scale(&h)),
            &k4,
        )?;
        let k6 = field(
            &(&z + &(k1.scale(&a61) + k2.scale(&a62) + k3.scale(&a63) + k4.scale(&a64) + k5.scale(&a65)).scale(&h)),
            &k5,
        )?;
        let incr5 = k1.scale(&b1) + k3.scale(&b3) + k4.scale(&b4) + k5.scale(&b5) + k6.scale(&b6);
        let z5 = &z + &incr5.scale(&h);
        let k7 = field(&z5, &k6)?;
        let incr4 = k1.scale(&e1) + k3.scale(&e3) + k4.scale(&e4) + k5.scale(&e5) + k6.scale(&e6) + k7.scale(&e7);
        let z4 = &z + &incr4.scale(&h);

        let err = (&z5 - &z4).abs();
        if err <= tol {
            // Accept.
            arclen += h.clone();
            z = z5;
            v = k7;
            points.push(z.clone());
            tangents.push(v.clone());

            if let Some(r) = &stop.radius {
                if z.abs() > *r {
                    hit = Some(StopHit::Radius);
                }
            }
            if hit.is_none() && arclen >= grace {
                for (i, (p, r)) in stop.near_points.iter().enumerate() {
                    if (&z - p).abs() <= *r {
                        hit = Some(StopHit::NearPoint(i));
                        break;
                    }
                }
            }
            if hit.is_none() {
                if let Some(cap) = &stop.arclength_cap {
                    if arclen >= *cap {
                        hit = Some(StopHit::Arclength);
                    }
                }
            }
        }

        // Step-size update (clamped PI-free controller).
        let mut factor = if err.is_zero() {
            ctx.float(5.0)
        } else {
            let ratio = Float::with_val(prec, &tol / &err);
            let mut f = ratio.root(5);
            f *= Float::with_val(prec, 0.9);
            f
        };
        if factor > 5 {
            factor = ctx.float(5.0);
        }
        if factor < 0.2 {
            factor = ctx.float(0.2);
        }
        h *= factor;
        if let Some(m) = &stop.max_step {
            if h > *m {
                h = m.clone();
            }
        }
        if h < h_floor {
            return Err(Error::StepUnderflow {
                last_point: z.clone(),
            });
        }
    }

    Ok(Trace {
        poly: Polyline::new(points),
        tangents,
        hit: hit.unwrap(),
    })
}

/// Locate a positive-real-axis crossing on a traced path by cubic Hermite
/// interpolation between the bracketing nodes. Returns the crossing point.
pub fn hermite_real_axis_crossing(trace: &Trace, min_re: f64, ctx: &PrecisionContext) -> Option<Cx> {
    let pts = &trace.poly.points;
    let tans = &trace.tangents;
    for i in 1..pts.len() {
        let (im0, im1) = (pts[i - 1].im.clone(), pts[i].im.clone());
        if im0.is_sign_negative() == im1.is_sign_negative() {
            continue;
        }
        if pts[i].re.to_f64() < min_re || pts[i - 1].re.to_f64() < min_re {
            continue;
        }
        // Hermite cubic on [0,1] with derivative scaled by the chord length.
        let h = (&pts[i] - &pts[i - 1]).abs();
        let p0 = &pts[i - 1];
        let p1 = &pts[i];
        let m0 = tans[i - 1].scale(&h);
        let m1 = tans[i].scale(&h);
        let eval = |s: &Float| -> Cx {
            let prec = s.prec();
            let s2 = Float::with_val(prec, s * s);
            let s3 = Float::with_val(prec, &s2 * s);
            let h00 = Float::with_val(prec, 2) * &s3 - Float::with_val(prec, 3) * &s2
                + Float::with_val(prec, 1);
            let h10 = s3.clone() - Float::with_val(prec, 2) * &s2 + s;
            let h01 = Float::with_val(prec, -2) * &s3 + Float::with_val(prec, 3) * &s2;
            let h11 = s3.clone() - s2;
            p0.scale(&h00) + m0.scale(&h10) + p1.scale(&h01) + m1.scale(&h11)
        };
        let mut lo = ctx.float(0.0);
        let mut hi = ctx.float(1.0);
        let neg_at_lo = eval(&lo).im.is_sign_negative();
        for _ in 0..(ctx.bits as usize) {
            let mid = (lo.clone() + hi.clone()) / 2u32;
            let val = eval(&mid);
            if val.im.is_sign_negative() == neg_at_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Some(eval(&lo));
    }
    None
}
