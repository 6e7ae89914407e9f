use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::ops::CompleteRound;
use rug::Float;

/// Complex number over MPFR floats. Real and imaginary parts share one
/// working precision; binary operations produce results at the larger of the
/// two operand precisions.
#[derive(Clone, PartialEq)]
pub struct Cx {
    pub re: Float,
    pub im: Float,
}

impl Cx {
    pub fn new(prec: u32, re: f64, im: f64) -> Self {
        Cx {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn from_parts(re: Float, im: Float) -> Self {
        Cx { re, im }
    }

    pub fn from_re(re: Float) -> Self {
        let prec = re.prec();
        Cx {
            im: Float::new(prec),
            re,
        }
    }

    pub fn zero(prec: u32) -> Self {
        Cx {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Cx::new(prec, 1.0, 0.0)
    }

    pub fn i(prec: u32) -> Self {
        Cx::new(prec, 0.0, 1.0)
    }

    /// e^{i theta}
    pub fn cis(theta: &Float) -> Self {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        Cx { re: c, im: s }
    }

    pub fn cis_f64(prec: u32, theta: f64) -> Self {
        Cx::cis(&Float::with_val(prec, theta))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn set_prec(&mut self, prec: u32) {
        self.re.set_prec(prec);
        self.im.set_prec(prec);
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let mut c = self.clone();
        c.set_prec(prec);
        c
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Cx {
            re: self.re.clone(),
            im: (-&self.im).complete(self.im.prec()),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let mut a = self.re.clone().square();
        a += self.im.clone().square();
        a
    }

    pub fn abs(&self) -> Float {
        self.re.clone().hypot(&self.im)
    }

    /// Principal argument in (-pi, pi].
    pub fn arg(&self) -> Float {
        self.im.clone().atan2(&self.re)
    }

    pub fn scale(&self, s: &Float) -> Self {
        Cx {
            re: (&self.re * s).complete(self.prec().max(s.prec())),
            im: (&self.im * s).complete(self.prec().max(s.prec())),
        }
    }

    pub fn scale_f64(&self, s: f64) -> Self {
        let prec = self.prec();
        Cx {
            re: &self.re * Float::with_val(prec, s),
            im: &self.im * Float::with_val(prec, s),
        }
    }

    /// i * self
    pub fn mul_i(&self) -> Self {
        Cx {
            re: (-&self.im).complete(self.im.prec()),
            im: self.re.clone(),
        }
    }

    /// -i * self
    pub fn mul_neg_i(&self) -> Self {
        Cx {
            re: self.im.clone(),
            im: (-&self.re).complete(self.re.prec()),
        }
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        Cx {
            re: (&self.re / &d).complete(d.prec()),
            im: -(&self.im / &d).complete(d.prec()),
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Principal square root (branch cut on the negative real axis), computed
    /// with the cancellation-free half-angle formulas.
    pub fn sqrt(&self) -> Self {
        let prec = self.prec();
        if self.im.is_zero() {
            if self.re.is_sign_negative() && !self.re.is_zero() {
                let r = (-self.re.clone()).sqrt();
                // On the cut take the upper-side value i*sqrt(-x), matching
                // arg = +pi from atan2(+0, x<0).
                return Cx {
                    re: Float::new(prec),
                    im: r,
                };
            }
            return Cx {
                re: self.re.clone().sqrt(),
                im: Float::new(prec),
            };
        }
        let r = self.abs();
        // u = sqrt((r + |re|)/2) is always well conditioned.
        let u = ((&r + self.re.clone().abs()) / 2u32).sqrt();
        let v = &self.im / (&u * Float::with_val(prec, 2));
        if self.re.is_sign_negative() {
            // sqrt = |im|/(2u) + i*sign(im)*u
            if self.im.is_sign_negative() {
                Cx {
                    re: -v,
                    im: -u,
                }
            } else {
                Cx { re: v, im: u }
            }
        } else {
            Cx { re: u, im: v }
        }
    }

    pub fn exp(&self) -> Self {
        let prec = self.prec();
        let m = self.re.clone().exp();
        let (s, c) = self.im.clone().sin_cos(Float::new(prec));
        Cx {
            re: &m * c,
            im: m * s,
        }
    }

    /// Principal logarithm: ln|z| + i*arg(z), arg in (-pi, pi].
    pub fn ln(&self) -> Self {
        Cx {
            re: self.norm_sqr().ln() / 2u32,
            im: self.arg(),
        }
    }

    pub fn powi(&self, n: i64) -> Self {
        let prec = self.prec();
        if n == 0 {
            return Cx::one(prec);
        }
        let mut base = if n < 0 { self.recip() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Cx::one(prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Principal z^p for real exponent p.
    pub fn powf(&self, p: &Float) -> Self {
        let prec = self.prec().max(p.prec());
        let mut lg = self.ln();
        lg.set_prec(prec);
        (&lg * &Cx::from_re(p.clone())).exp()
    }

    pub fn fmt_sci(&self, digits: usize) -> String {
        format!(
            "({}, {})",
            fmt_float_sci(&self.re, digits),
            fmt_float_sci(&self.im, digits)
        )
    }
}

/// Scientific-notation formatting with an explicit count of significant
/// digits; deterministic for a given (value, digits).
pub fn fmt_float_sci(x: &Float, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x.is_sign_negative() {
            "-inf".into()
        } else {
            "inf".into()
        };
    }
    let (sign, mantissa, exp) = x.to_sign_string_exp(10, Some(digits.max(2)));
    if mantissa.starts_with('0') || mantissa.is_empty() {
        return format!("{}0.0e0", if sign { "-" } else { "" });
    }
    let e = exp.unwrap_or(0) - 1;
    let (head, tail) = mantissa.split_at(1);
    format!(
        "{}{}.{}e{}",
        if sign { "-" } else { "" },
        head,
        if tail.is_empty() { "0" } else { tail },
        e
    )
}

macro_rules! bin_op {
    ($trait:ident, $fn:ident, |$a:ident, $b:ident, $prec:ident| $body:expr) => {
        impl $trait<&Cx> for &Cx {
            type Output = Cx;
            fn $fn(self, rhs: &Cx) -> Cx {
                let $prec = self.prec().max(rhs.prec());
                let $a = self;
                let $b = rhs;
                $body
            }
        }
        impl $trait<Cx> for Cx {
            type Output = Cx;
            fn $fn(self, rhs: Cx) -> Cx {
                (&self).$fn(&rhs)
            }
        }
        impl $trait<&Cx> for Cx {
            type Output = Cx;
            fn $fn(self, rhs: &Cx) -> Cx {
                (&self).$fn(rhs)
            }
        }
        impl $trait<Cx> for &Cx {
            type Output = Cx;
            fn $fn(self, rhs: Cx) -> Cx {
                self.$fn(&rhs)
            }
        }
    };
}

bin_op!(Add, add, |a, b, prec| Cx {
    re: (&a.re + &b.re).complete(prec),
    im: (&a.im + &b.im).complete(prec),
});

bin_op!(Sub, sub, |a, b, prec| Cx {
    re: (&a.re - &b.re).complete(prec),
    im: (&a.im - &b.im).complete(prec),
});

bin_op!(Mul, mul, |a, b, prec| {
    let mut re = (&a.re * &b.re).complete(prec);
    re -= (&a.im * &b.im).complete(prec);
    let mut im = (&a.re * &b.im).complete(prec);
    im += (&a.im * &b.re).complete(prec);
    Cx { re, im }
});

bin_op!(Div, div, |a, b, prec| {
    let d = b.norm_sqr();
    let mut re = (&a.re * &b.re).complete(prec);
    re += (&a.im * &b.im).complete(prec);
    re /= &d;
    let mut im = (&a.im * &b.re).complete(prec);
    im -= (&a.re * &b.im).complete(prec);
    im /= &d;
    Cx { re, im }
});

impl Neg for &Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        Cx {
            re: (-&self.re).complete(self.re.prec()),
            im: (-&self.im).complete(self.im.prec()),
        }
    }
}

impl Neg for Cx {
    type Output = Cx;
    fn neg(self) -> Cx {
        -&self
    }
}

impl fmt::Display for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        write!(f, "({re:e}, {im:e})")
    }
}

impl fmt::Debug for Cx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cx{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Cx, b: (f64, f64), tol: f64) -> bool {
        let (re, im) = a.to_f64();
        (re - b.0).abs() <= tol && (im - b.1).abs() <= tol
    }

    #[test]
    fn arithmetic_and_functions() {
        let a = Cx::new(128, 1.5, -2.0);
        let b = Cx::new(128, -0.25, 3.0);
        assert!(close(&(&a + &b), (1.25, 1.0), 1e-30));
        assert!(close(&(&a * &b), (1.5 * -0.25 + 2.0 * 3.0, 1.5 * 3.0 + 2.0 * 0.25), 1e-14));
        let q = &(&a / &b) * &b;
        assert!(close(&q, (1.5, -2.0), 1e-30));

        let s = Cx::new(256, -4.0, 0.0).sqrt();
        assert!(close(&s, (0.0, 2.0), 1e-60));
        let s2 = Cx::new(256, 3.0, 4.0).sqrt();
        assert!(close(&s2, (2.0, 1.0), 1e-60));

        let e = Cx::new(256, 0.0, std::f64::consts::PI).exp();
        assert!(close(&e, (-1.0, 0.0), 1e-15));

        let l = Cx::new(256, 0.0, 1.0).ln();
        assert!(close(&l, (0.0, std::f64::consts::FRAC_PI_2), 1e-15));

        let p = Cx::new(256, 2.0, 1.0).powi(3);
        assert!(close(&p, (2.0f64.powi(3) - 3.0 * 2.0 * 1.0, 3.0 * 4.0 - 1.0), 1e-50));
    }

    #[test]
    fn sci_formatting() {
        let x = Float::with_val(256, 1) / 3u32;
        let s = fmt_float_sci(&x, 20);
        assert_eq!(s, "3.3333333333333333333e-1");
        let z = Float::with_val(64, 0);
        assert_eq!(fmt_float_sci(&z, 17), "0.0e0");
        let n = Float::with_val(64, -12345.678);
        assert!(fmt_float_sci(&n, 8).starts_with("-1.2345678e4"));
    }
}
