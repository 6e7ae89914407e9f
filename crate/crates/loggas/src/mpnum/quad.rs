//! Adaptive tanh-sinh contour quadrature.
//!
//! The double-exponential substitution `x = tanh((pi/2) sinh u)` turns smooth
//! (and endpoint-algebraic) integrands on a segment into rapidly decaying ones
//! on the line; halving the step size reuses all previously computed nodes.

use rug::Float;

use crate::mpnum::{Cx, Polyline, PrecisionContext};
use crate::{Error, Result};

const MAX_LEVEL: u32 = 14;

/// Integrate `f` along the straight segment from `z0` to `z1` with relative
/// error `ctx.quad_tol`.
pub fn integrate_segment<F>(mut f: F, z0: &Cx, z1: &Cx, ctx: &PrecisionContext) -> Result<Cx>
where
    F: FnMut(&Cx) -> Cx,
{
    integrate_core(&mut f, z0, z1, ctx)
}

/// Integrate along a polyline, segment by segment.
pub fn integrate_polyline<F>(mut f: F, path: &Polyline, ctx: &PrecisionContext) -> Result<Cx>
where
    F: FnMut(&Cx) -> Cx,
{
    let mut total = ctx.zero();
    for w in path.points.windows(2) {
        total = total + integrate_core(&mut f, &w[0], &w[1], ctx)?;
    }
    Ok(total)
}

/// Integrate from `z0` along direction `angle` out to distance `r_max`.
pub fn integrate_ray<F>(
    mut f: F,
    z0: &Cx,
    angle: &Float,
    r_max: &Float,
    ctx: &PrecisionContext,
) -> Result<Cx>
where
    F: FnMut(&Cx) -> Cx,
{
    let dir = Cx::cis(angle);
    let z1 = z0 + &dir.scale(r_max);
    integrate_core(&mut f, z0, &z1, ctx)
}

/// Which endpoint carries the declared square-root behaviour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SqrtEnd {
    Start,
    End,
}

/// Integrate `f` with a declared `(z-e)^{+-1/2}` endpoint singularity at the
/// chosen end, removed by the substitution `z = e + w^2`.
pub fn integrate_segment_sqrt<F>(
    mut f: F,
    z0: &Cx,
    z1: &Cx,
    end: SqrtEnd,
    ctx: &PrecisionContext,
) -> Result<Cx>
where
    F: FnMut(&Cx) -> Cx,
{
    let (e, other, sign) = match end {
        SqrtEnd::Start => (z0, z1, 1.0),
        SqrtEnd::End => (z1, z0, -1.0),
    };
    let w1 = (other - e).sqrt();
    let two = ctx.float(2.0);
    let mut g = |w: &Cx| -> Cx {
        let z = e + &w.square();
        f(&z) * w.scale(&two)
    };
    let res = integrate_core(&mut g, &ctx.zero(), &w1, ctx)?;
    Ok(res.scale_f64(sign))
}

struct Node {
    /// 1 - x and 1 + x stored separately for endpoint accuracy.
    om: Float,
    op: Float,
    weight: Float,
}

/// Tanh-sinh nodes at u = k*h for k = start, start+step, ... on the positive
/// side; generation stops once the weight drops below 2^cutoff_log2.
fn nodes_at(h: &Float, step: u32, start: u32, bits: u32, cutoff_log2: i64) -> Vec<Node> {
    let prec = bits + 32;
    let mut out = Vec::new();
    let half_pi = Float::with_val(prec, rug::float::Constant::Pi) / 2u32;
    let mut k = start;
    loop {
        let u = Float::with_val(prec, k) * h;
        let (sinh_u, cosh_u) = u.sinh_cosh(Float::new(prec));
        let t = Float::with_val(prec, &half_pi * &sinh_u);
        // 1 -+ tanh(t) without cancellation.
        let e2t = Float::with_val(prec, &t * &Float::with_val(prec, 2)).exp();
        let denom = Float::with_val(prec, &e2t + &Float::with_val(prec, 1));
        let om = Float::with_val(prec, 2) / &denom;
        let op = Float::with_val(prec, &e2t * &Float::with_val(prec, 2)) / &denom;
        let cosh_t = t.cosh();
        let weight =
            Float::with_val(prec, &half_pi * &cosh_u) / Float::with_val(prec, &cosh_t * &cosh_t);
        let done = weight.clone().log2() < cutoff_log2;
        out.push(Node { om, op, weight });
        if done {
            break;
        }
        k += step;
        if k > 1 << 26 {
            break;
        }
    }
    out
}

fn integrate_core<F>(f: &mut F, z0: &Cx, z1: &Cx, ctx: &PrecisionContext) -> Result<Cx>
where
    F: FnMut(&Cx) -> Cx,
{
    let bits = ctx.bits;
    if z0 == z1 {
        return Ok(ctx.zero());
    }
    let half = ctx.float(0.5);
    let d = (z1 - z0).scale(&half);
    let cutoff = -(bits as i64) - 48;

    // Evaluate f at the segment point given split coordinates (1-x, 1+x).
    let mut eval = |om: &Float, op: &Float| -> Cx {
        let z = (z0.scale(om) + z1.scale(op)).scale(&half);
        f(&z)
    };

    // Level 0: h = 1, center node x=0 has weight pi/2.
    let mut h = ctx.float(1.0);
    let half_pi = ctx.pi() / 2u32;
    let one = ctx.float(1.0);
    let mut sum = eval(&one, &one).scale(&half_pi);
    let mut abs_sum = sum.abs();
    for n in &nodes_at(&h, 1, 1, bits, cutoff) {
        let a = eval(&n.om, &n.op).scale(&n.weight);
        let b = eval(&n.op, &n.om).scale(&n.weight);
        abs_sum += a.abs() + b.abs();
        sum = sum + a + b;
    }

    let tol = ctx.quad_tol_f();
    let mut prev2 = ctx.zero();
    let mut prev = (&sum * &d).scale(&h);
    for level in 1..=MAX_LEVEL {
        h /= 2u32;
        // New nodes are the odd multiples of the refined h.
        let mut add = ctx.zero();
        for n in &nodes_at(&h, 2, 1, bits, cutoff) {
            let a = eval(&n.om, &n.op).scale(&n.weight);
            let b = eval(&n.op, &n.om).scale(&n.weight);
            abs_sum += a.abs() + b.abs();
            add = add + a + b;
        }
        sum = sum + add;
        let val = (&sum * &d).scale(&h);
        if !val.is_finite() {
            return Err(Error::Validation(
                "integrand evaluated to a non-finite value".into(),
            ));
        }
        let diff = (&val - &prev).abs();
        // Near-zero results converge relative to the accumulated L1 mass.
        let floor = abs_sum.clone() * ctx.quad_tol_f() * d.abs();
        let scale = val.abs().max(&floor);
        let gate = Float::with_val(bits, &tol * &scale);
        if level >= 3 && diff <= gate {
            return Ok(val);
        }
        prev2 = prev;
        prev = val;
    }
    Err(Error::QuadratureNonConvergence {
        prev: prev2,
        last: prev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256)
    }

    #[test]
    fn constant_on_unit_segment() {
        let c = ctx();
        let one = c.one();
        let v = integrate_segment(|_| one.clone(), &c.cx(0.0, 0.0), &c.cx(1.0, 0.0), &c).unwrap();
        let err = (&v - &c.one()).abs().to_f64();
        assert!(err < 1e-60, "err = {err:e}");
    }

    #[test]
    fn linear_to_one_plus_i() {
        // f(z) = z on [0, 1+i] -> (1+i)^2/2 = i
        let c = ctx();
        let v = integrate_segment(|z| z.clone(), &c.cx(0.0, 0.0), &c.cx(1.0, 1.0), &c).unwrap();
        let err = (&v - &c.cx(0.0, 1.0)).abs().to_f64();
        assert!(err < 1e-60, "err = {err:e}");
    }

    #[test]
    fn equilibrium_mass_integrand_t2() {
        // (1/2pi) (1-z) sqrt((z-a)(b-z)) on [a,b], a = -1-sqrt2, b = -1+sqrt2.
        // Trig substitution evaluates this in closed form to exactly 1.
        let c = ctx();
        let s2 = c.float(2.0).sqrt();
        let a = Cx::from_re(c.float(-1.0) - s2.clone());
        let b = Cx::from_re(c.float(-1.0) + s2);
        let two_pi = c.pi() * 2u32;
        let v = integrate_segment(
            |z| {
                let rad = ((z - &a) * (&b - z)).sqrt();
                let one_minus = c.one() - z;
                (one_minus * rad).scale(&(c.float(1.0) / two_pi.clone()))
            },
            &a,
            &b,
            &c,
        )
        .unwrap();
        let err = (&v - &c.one()).abs().to_f64();
        assert!(err < 1e-20, "mass err = {err:e}");
    }

    #[test]
    fn split_additivity() {
        let c = ctx();
        let f = |z: &Cx| (z * z).exp();
        let z0 = c.cx(-0.3, 0.1);
        let z1 = c.cx(1.1, -0.4);
        let zm = c.cx(0.2, -0.05);
        let whole = integrate_segment(f, &z0, &z1, &c).unwrap();
        let p1 = integrate_segment(f, &z0, &zm, &c).unwrap();
        let p2 = integrate_segment(f, &zm, &z1, &c).unwrap();
        let err = (&whole - &(&p1 + &p2)).abs().to_f64();
        assert!(err < 4.0 * c.quad_tol * whole.abs().to_f64());
    }

    #[test]
    fn sqrt_endpoint_substitution() {
        // int_0^1 z^{-1/2} dz = 2 via z = w^2.
        let c = ctx();
        let v = integrate_segment_sqrt(
            |z| z.sqrt().recip(),
            &c.cx(0.0, 0.0),
            &c.cx(1.0, 0.0),
            SqrtEnd::Start,
            &c,
        )
        .unwrap();
        let err = (&v - &c.cx(2.0, 0.0)).abs().to_f64();
        assert!(err < 1e-60, "err = {err:e}");
    }
}
