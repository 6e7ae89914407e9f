use rug::Float;

use crate::mpnum::Cx;
use crate::{Error, Result};

/// Working-precision and tolerance budget governing every numeric routine.
///
/// Invariants: `bits >= 64`, `quad_tol >= 2^(-bits+16)`, `ode_tol >= 2^(-bits+16)`.
/// All routines given the same context and inputs are bit-reproducible.
#[derive(Clone, Debug)]
pub struct PrecisionContext {
    /// Binary mantissa precision for all MPFR work.
    pub bits: u32,
    /// Relative quadrature tolerance.
    pub quad_tol: f64,
    /// Local truncation tolerance for path tracing.
    pub ode_tol: f64,
    /// Cap on refinement levels / accepted steps.
    pub max_steps: u32,
}

impl PrecisionContext {
    /// Context with tolerances scaled to the requested precision.
    pub fn new(bits: u32) -> Self {
        let quad_tol = pow2_f64(-(bits as i64) + 32).max(1e-290);
        PrecisionContext {
            bits,
            quad_tol,
            ode_tol: 1e-13,
            max_steps: 100_000,
        }
    }

    pub fn with_tols(bits: u32, quad_tol: f64, ode_tol: f64) -> Result<Self> {
        let ctx = PrecisionContext {
            bits,
            quad_tol,
            ode_tol,
            max_steps: 100_000,
        };
        ctx.validate()?;
        Ok(ctx)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bits < 64 {
            return Err(Error::Validation(format!("bits = {} < 64", self.bits)));
        }
        let floor = pow2_f64(-(self.bits as i64) + 16);
        if self.quad_tol < floor {
            return Err(Error::Validation(format!(
                "quad_tol = {:e} below 2^(-bits+16)",
                self.quad_tol
            )));
        }
        if self.ode_tol < floor {
            return Err(Error::Validation(format!(
                "ode_tol = {:e} below 2^(-bits+16)",
                self.ode_tol
            )));
        }
        if self.quad_tol <= 0.0 || self.ode_tol <= 0.0 {
            return Err(Error::Validation("tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn float(&self, v: f64) -> Float {
        Float::with_val(self.bits, v)
    }

    pub fn cx(&self, re: f64, im: f64) -> Cx {
        Cx::new(self.bits, re, im)
    }

    pub fn zero(&self) -> Cx {
        Cx::zero(self.bits)
    }

    pub fn one(&self) -> Cx {
        Cx::one(self.bits)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, rug::float::Constant::Pi)
    }

    /// 2^e as an MPFR float at working precision.
    pub fn pow2(&self, e: i64) -> Float {
        let mut f = Float::with_val(self.bits, 1);
        f <<= e as i32;
        f
    }

    pub fn quad_tol_f(&self) -> Float {
        self.float(self.quad_tol)
    }

    pub fn ode_tol_f(&self) -> Float {
        self.float(self.ode_tol)
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext::new(256)
    }
}

fn pow2_f64(e: i64) -> f64 {
    if e < -1070 {
        0.0
    } else {
        (e as f64).exp2()
    }
}
