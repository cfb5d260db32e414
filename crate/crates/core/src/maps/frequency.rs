//! Frequency maps `omega` given as DSL expressions in `y`, with a numerical
//! inverse.

use crate::dsl::{parse, Expr};
use crate::error::{Error, Result};
use crate::funcspace::{Interval, DOMAIN_TOL};

/// Monotone frequency map `y ↦ omega(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Frequency {
    src: String,
    expr: Expr,
}

impl Frequency {
    /// Parses `src`; it must not mention `x`.
    pub fn parse(src: &str) -> Result<Self> {
        let expr = parse(src)?;
        if expr.mentions_x() {
            return Err(Error::InvalidArgument(format!("frequency map '{src}' depends on x")));
        }
        Ok(Self { src: src.to_string(), expr })
    }

    pub fn source(&self) -> &str {
        &self.src
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.expr.eval(0.0, y)
    }

    /// `+1` or `-1` if `omega` is strictly monotone on 257 equispaced
    /// samples of `iv`.
    pub fn monotonicity(&self, iv: Interval) -> Result<f64> {
        let n = 256;
        let vals: Vec<f64> = (0..=n).map(|k| self.eval(iv.lo() + iv.width() * k as f64 / n as f64)).collect();
        let sign = (vals[n] - vals[0]).signum();
        let ok = sign != 0.0 && vals.windows(2).all(|w| (w[1] - w[0]) * sign > 0.0);
        if !ok || vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "frequency map '{}' is not strictly monotone on {iv}",
                self.src
            )));
        }
        Ok(sign)
    }

    /// Image of `iv`, ordered.
    pub fn image(&self, iv: Interval) -> Result<Interval> {
        self.monotonicity(iv)?;
        let (a, b) = (self.eval(iv.lo()), self.eval(iv.hi()));
        Interval::new(a.min(b), a.max(b))
    }

    /// `omega^{-1}(w)` searched in `bracket` by bisection to machine
    /// precision. Targets within [`DOMAIN_TOL`] outside the image map to the
    /// nearer end of the bracket.
    pub fn inverse(&self, w: f64, bracket: Interval) -> Result<f64> {
        let (mut a, mut b) = (bracket.lo(), bracket.hi());
        let (mut fa, fb) = (self.eval(a) - w, self.eval(b) - w);
        if fa.signum() == fb.signum() && fa.abs().min(fb.abs()) <= DOMAIN_TOL {
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
        if fa == 0.0 {
            return Ok(a);
        }
        if fb == 0.0 {
            return Ok(b);
        }
        if fa.signum() == fb.signum() {
            return Err(Error::Domain { y: w, lo: self.eval(a).min(self.eval(b)), hi: self.eval(a).max(self.eval(b)) });
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = self.eval(m) - w;
            if fm == 0.0 {
                return Ok(m);
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        Ok(if (self.eval(a) - w).abs() <= (self.eval(b) - w).abs() { a } else { b })
    }

    /// `max |omega^{-1}(omega(y)) - y|` over 257 samples of `iv`.
    pub fn round_trip_error(&self, iv: Interval) -> Result<f64> {
        let n = 256;
        let mut worst: f64 = 0.0;
        for k in 0..=n {
            let y = iv.lo() + iv.width() * k as f64 / n as f64;
            worst = worst.max((self.inverse(self.eval(y), iv)? - y).abs());
        }
        Ok(worst)
    }
}
