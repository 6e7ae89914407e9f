//! Roots of the spectral cubic x^3 - t x - 1.

use crate::mpnum::{Cx, PrecisionContext};
use crate::Result;

/// The three roots, sorted by (re, im); when two roots are closer than
/// 2^(-bits/4) they are merged into an exact double root and `double` holds
/// their indices.
#[derive(Clone, Debug)]
pub struct CubicRoots {
    pub roots: [Cx; 3],
    pub double: Option<(usize, usize)>,
}

impl CubicRoots {
    pub fn residual_ok(&self, t: &Cx, ctx: &PrecisionContext) -> bool {
        let gate = ctx.pow2(-((ctx.bits / 2) as i64));
        self.roots.iter().all(|x| {
            let f = (x.powi(3) - &(t * x) - &ctx.one()).abs();
            f <= gate
        })
    }
}

fn cubic_f64_seeds(t: &Cx) -> [Cx; 3] {
    // Cardano for x^3 + p x + q with p = -t, q = -1, at 64 bits.
    let prec = 64;
    let t64 = t.with_prec(prec);
    let p = -&t64;
    let q = Cx::new(prec, -1.0, 0.0);
    let half_q = q.scale_f64(0.5);
    // delta = (q/2)^2 + (p/3)^3
    let p3 = p.scale_f64(1.0 / 3.0);
    let delta = half_q.square() + p3.powi(3);
    let sq = delta.sqrt();
    // Pick the better-conditioned cube: u^3 = -q/2 +- sqrt(delta)
    let c1 = -&half_q + &sq;
    let c2 = -&half_q - &sq;
    let u3 = if c1.abs() >= c2.abs() { c1 } else { c2 };
    let u = u3.powf(&rug::Float::with_val(prec, 1.0 / 3.0));
    let omega = Cx::new(prec, -0.5, 0.75f64.sqrt());
    let mut roots = Vec::with_capacity(3);
    let mut uk = u;
    for _ in 0..3 {
        let x = if uk.abs().to_f64() < 1e-12 {
            Cx::zero(prec)
        } else {
            &uk - &(&p3 / &uk)
        };
        roots.push(x);
        uk = &uk * &omega;
    }
    [roots[0].clone(), roots[1].clone(), roots[2].clone()]
}

/// Roots of `x^3 - t x - 1 = 0` with residual `|x^3 - t x - 1| <= 2^(-bits/2)`;
/// multiplicities are detected when roots come closer than `2^(-bits/4)`.
pub fn cubic_roots(t: &Cx, ctx: &PrecisionContext) -> Result<CubicRoots> {
    let prec = ctx.bits;
    let tt = t.with_prec(prec);
    let one = ctx.one();

    // Near a vanishing discriminant (4t^3 = 27) the double root is the exact
    // rational expression -3/(2t); detect in low precision first.
    let disc = (tt.powi(3).scale_f64(4.0) - &ctx.cx(27.0, 0.0)).abs();
    let near_degenerate = disc.to_f64().abs() < 1e-12;

    let mut roots: Vec<Cx> = if near_degenerate {
        let xd = (-&one).scale_f64(3.0) / &tt.scale_f64(2.0);
        let xs = ctx.cx(3.0, 0.0) / &tt;
        vec![xd.clone(), xd, xs]
    } else {
        cubic_f64_seeds(&tt)
            .iter()
            .map(|x| x.with_prec(prec))
            .collect()
    };

    // Newton polish at full precision (quadratic convergence from the seeds).
    // The exact degenerate assignment is already optimal; Newton would tear
    // the double root apart along the near-vanishing derivative.
    let iters = if near_degenerate {
        0
    } else {
        4 + (prec as f64 / 50.0).log2().max(0.0).ceil() as usize
    };
    for x in roots.iter_mut() {
        for _ in 0..iters {
            let f = x.powi(3) - &(&tt * &*x) - &one;
            let fp = x.square().scale_f64(3.0) - &tt;
            if fp.abs().to_f64() == 0.0 {
                break;
            }
            let step = &f / &fp;
            *x = &*x - &step;
        }
    }

    // Multiplicity detection.
    let merge_gate = ctx.pow2(-((prec / 4) as i64));
    let mut double = None;
    'outer: for i in 0..3 {
        for j in (i + 1)..3 {
            if (&roots[i] - &roots[j]).abs() <= merge_gate {
                double = Some((i, j));
                break 'outer;
            }
        }
    }
    if let Some((i, j)) = double {
        // Exact double root of the degenerate cubic: x_d = -3/(2t); third root
        // follows from the vanishing coefficient of x^2.
        let xd = ctx.cx(-3.0, 0.0) / &tt.scale_f64(2.0);
        let k = 3 - i - j;
        let xs = xd.scale_f64(-2.0);
        roots[i] = xd.clone();
        roots[j] = xd;
        roots[k] = xs;
    }

    // Deterministic order: lexicographic by (re, im).
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&p, &q| {
        let a = &roots[p];
        let b = &roots[q];
        a.re
            .partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    let sorted = [
        roots[idx[0]].clone(),
        roots[idx[1]].clone(),
        roots[idx[2]].clone(),
    ];
    let double = double.map(|(i, j)| {
        let pi = idx.iter().position(|&k| k == i).unwrap();
        let pj = idx.iter().position(|&k| k == j).unwrap();
        (pi.min(pj), pi.max(pj))
    });
    Ok(CubicRoots {
        roots: sorted,
        double,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256)
    }

    fn find_near(r: &CubicRoots, re: f64, im: f64) -> f64 {
        r.roots
            .iter()
            .map(|x| {
                let (a, b) = x.to_f64();
                ((a - re).powi(2) + (b - im).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn cube_roots_of_unity_at_t0() {
        let c = ctx();
        let r = cubic_roots(&c.cx(0.0, 0.0), &c).unwrap();
        assert!(r.double.is_none());
        assert!(r.residual_ok(&c.cx(0.0, 0.0), &c));
        let s3 = 0.75f64.sqrt();
        assert!(find_near(&r, 1.0, 0.0) < 1e-15);
        assert!(find_near(&r, -0.5, s3) < 1e-15);
        assert!(find_near(&r, -0.5, -s3) < 1e-15);
    }

    #[test]
    fn critical_double_root() {
        // t = 3*2^(-2/3): double root -2^(-1/3), simple root 2^(2/3).
        let c = ctx();
        let e = c.float(-2.0) / 3u32;
        let tcr = Cx::from_re(c.float(2.0).pow(&e) * 3u32);
        let r = cubic_roots(&tcr, &c).unwrap();
        let (i, j) = r.double.expect("double root expected");
        assert_eq!((&r.roots[i] - &r.roots[j]).abs().to_f64(), 0.0);
        let xd = c.float(2.0).pow(&(c.float(-1.0) / 3u32));
        let err_d = (&r.roots[i] + &Cx::from_re(xd)).abs().to_f64();
        assert!(err_d < 1e-70, "double root err {err_d:e}");
        let xs = c.float(2.0).pow(&(c.float(2.0) / 3u32));
        let k = 3 - i - j;
        let err_s = (&r.roots[k] - &Cx::from_re(xs)).abs().to_f64();
        assert!(err_s < 1e-70, "simple root err {err_s:e}");
        // Derivative residual at the double root.
        let fp = (r.roots[i].square().scale_f64(3.0) - &tcr).abs().to_f64();
        assert!(fp < 2f64.powi(-(c.bits as i32) / 2), "fp = {fp:e}");
    }

    #[test]
    fn golden_factorization_at_t2() {
        // x^3 - 2x - 1 = (x+1)(x^2 - x - 1).
        let c = ctx();
        let r = cubic_roots(&c.cx(2.0, 0.0), &c).unwrap();
        assert!(r.double.is_none());
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(find_near(&r, -1.0, 0.0) < 1e-15);
        assert!(find_near(&r, phi, 0.0) < 1e-15);
        assert!(find_near(&r, 1.0 - phi, 0.0) < 1e-15);
        assert!(r.residual_ok(&c.cx(2.0, 0.0), &c));
    }

    #[test]
    fn random_residuals() {
        use rand::{Rng, SeedableRng};
        let c = ctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t = c.cx(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let r = cubic_roots(&t, &c).unwrap();
            assert!(r.residual_ok(&t, &c), "residual too large at t = {t}");
            // Root sum vanishes (no x^2 term).
            let s = (&(&r.roots[0] + &r.roots[1]) + &r.roots[2]).abs().to_f64();
            assert!(s < 1e-70);
        }
    }
}
