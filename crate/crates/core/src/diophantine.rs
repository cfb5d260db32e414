//! Small divisors `|e^{2 pi i m alpha} - 1|`, Diophantine checks and the
//! exponents derived from `(sigma, tau)`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default number of terms summed before the integral tail in
/// [`derived_params`].
pub const TAIL_TERMS: u64 = 1_000_000;

/// `|e^{2 pi i m alpha} - 1| = 2 |sin(pi m alpha)|`.
pub fn small_divisor(alpha: f64, m: i64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("small divisor needs m != 0".into()));
    }
    Ok(divisor(alpha, m))
}

pub(crate) fn divisor(alpha: f64, m: i64) -> f64 {
    // reduce m * alpha mod 1 before the sine so the argument stays small
    let t = (m as f64 * alpha).rem_euclid(1.0);
    2.0 * (std::f64::consts::PI * t).sin().abs()
}

/// Outcome of [`check_diophantine`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiophantineCheck {
    pub pass: bool,
    /// Smallest `m > 0` with `small_divisor < sigma / m^tau`.
    pub first_violation: Option<i64>,
    pub checked_up_to: u64,
}

/// Scans `0 < |m| <= max_m` for `small_divisor(alpha, m) >= sigma / |m|^tau`.
pub fn check_diophantine(alpha: f64, sigma: f64, tau: f64, max_m: u64) -> DiophantineCheck {
    let first_violation = (1..=max_m as i64).find(|&m| divisor(alpha, m) < sigma / (m as f64).powf(tau));
    DiophantineCheck { pass: first_violation.is_none(), first_violation, checked_up_to: max_m }
}

/// Rejects `alpha` within `1e-12` of some `p/q` with `q <= max_q`.
fn check_not_rational(alpha: f64, max_q: u64) -> Result<()> {
    for q in 1..=max_q as i64 {
        let qa = q as f64 * alpha;
        let p = qa.round();
        if (qa - p).abs() < q as f64 * 1e-12 {
            return Err(Error::Degenerate { alpha, p: p as i64, q });
        }
    }
    Ok(())
}

/// Empirical `(sigma, tau)` from the divisors with `|m| <= max_m`.
///
/// `tau` is minus the least-squares slope of `log small_divisor` against
/// `log m` over the record minima (the continued-fraction denominators of
/// `alpha`); `sigma` is then the smallest `small_divisor * m^tau`, shaved by
/// one part in `1e12` so the pair passes [`check_diophantine`] at `max_m`.
pub fn estimate_constants(alpha: f64, max_m: u64) -> Result<(f64, f64)> {
    if max_m < 100 {
        return Err(Error::InvalidArgument(format!("estimate_constants needs M >= 100, got {max_m}")));
    }
    check_not_rational(alpha, max_m)?;
    let mut records: Vec<(f64, f64)> = Vec::new();
    let mut best = f64::INFINITY;
    for m in 1..=max_m as i64 {
        let d = divisor(alpha, m);
        if d < best {
            best = d;
            records.push(((m as f64).ln(), d.ln()));
        }
    }
    // 2|sin(pi t)| bends away from 2 pi |t| for large divisors
    let linear: Vec<(f64, f64)> = records.iter().copied().filter(|&(_, ld)| ld < 0.0).collect();
    if linear.len() >= 2 {
        records = linear;
    }
    if records.len() < 2 {
        return Err(Error::Numerical(format!("only {} record minima below M = {max_m}", records.len())));
    }
    let n = records.len() as f64;
    let (sx, sy) = records.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) =
        records.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let tau = -sxy / sxx;
    if !(tau > 0.0) {
        return Err(Error::Numerical(format!("fitted tau = {tau} is not positive")));
    }
    let sigma = (1..=max_m as i64).map(|m| divisor(alpha, m) * (m as f64).powf(tau)).fold(f64::INFINITY, f64::min)
        * (1.0 - 1e-12);
    Ok((sigma, tau))
}

/// `rho`, `mu` and the solver constant `C(tau, sigma)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Derived {
    pub rho: u32,
    pub mu: u32,
    pub lemma_constant: f64,
}

/// `rho = floor(tau) + 2`, `mu = 15 (rho + 1)` and
/// `C = (1/sigma) sum_{m != 0} |m|^{-(2 + floor(tau) - tau)}`, the series cut
/// after [`TAIL_TERMS`] terms and closed with the integral bound of its tail.
pub fn derived_params(sigma: f64, tau: f64) -> Result<Derived> {
    derived_params_with(sigma, tau, TAIL_TERMS)
}

pub fn derived_params_with(sigma: f64, tau: f64, terms: u64) -> Result<Derived> {
    if !(sigma > 0.0 && tau > 0.0 && sigma.is_finite() && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("need sigma, tau > 0, got ({sigma}, {tau})")));
    }
    let rho = tau.floor() as u32 + 2;
    let mu = 15 * (rho + 1);
    let s = 2.0 + tau.floor() - tau;
    // smallest terms first
    let partial: f64 = (1..=terms).rev().map(|m| (m as f64).powf(-s)).sum();
    let tail = (terms as f64).powf(1.0 - s) / (s - 1.0);
    Ok(Derived { rho, mu, lemma_constant: 2.0 * (partial + tail) / sigma })
}

/// Validated `(alpha, sigma, tau)` with the derived exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiophantineParams {
    pub alpha: f64,
    pub sigma: f64,
    pub tau: f64,
    pub rho: u32,
    pub mu: u32,
    pub lemma_constant: f64,
    /// Largest `|m|` the condition was verified for.
    pub check_bound: u64,
}

impl DiophantineParams {
    /// Verifies the condition for `|m| <= check_bound`.
    pub fn new(alpha: f64, sigma: f64, tau: f64, check_bound: u64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        let d = derived_params(sigma, tau)?;
        let p = Self { alpha, sigma, tau, rho: d.rho, mu: d.mu, lemma_constant: d.lemma_constant, check_bound: 0 };
        p.verified(check_bound)
    }

    /// Estimates `(sigma, tau)` with [`estimate_constants`] at `max_m`.
    pub fn estimated(alpha: f64, max_m: u64) -> Result<Self> {
        let (sigma, tau) = estimate_constants(alpha, max_m)?;
        Self::new(alpha, sigma, tau, max_m)
    }

    /// Extends the verified range to at least `bound`.
    pub fn verified(mut self, bound: u64) -> Result<Self> {
        if bound > self.check_bound {
            let c = check_diophantine(self.alpha, self.sigma, self.tau, bound);
            if let Some(m) = c.first_violation {
                return Err(Error::NotDiophantine { alpha: self.alpha, m });
            }
            self.check_bound = bound;
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GOLDEN;
    use proptest::prelude::*;

    #[test]
    fn divisor_examples() {
        assert!((small_divisor(0.25, 2).unwrap() - 2.0).abs() < 1e-15);
        assert!(small_divisor(0.5, 2).unwrap() < 1e-15);
        let want = 2.0 * (std::f64::consts::PI * (1.0 - GOLDEN)).sin();
        assert!((small_divisor(GOLDEN, 1).unwrap() - want).abs() < 1e-14);
        assert!((small_divisor(GOLDEN, 1).unwrap() - 1.8641).abs() < 1e-4);
        assert!(small_divisor(0.3, 0).is_err());
    }

    #[test]
    fn divisor_matches_complex_modulus() {
        for m in [1, 7, -13, 144, 987] {
            let th = 2.0 * std::f64::consts::PI * m as f64 * GOLDEN;
            let direct = ((th.cos() - 1.0).powi(2) + th.sin().powi(2)).sqrt();
            assert!((small_divisor(GOLDEN, m).unwrap() - direct).abs() < 1e-11);
        }
    }

    #[test]
    fn check_examples() {
        let c = check_diophantine(1.0 / 3.0, 1e-6, 1.0, 10);
        assert_eq!(c.first_violation, Some(3));
        assert!(check_diophantine(GOLDEN, 1.0, 1.0, 10_000).pass);
        assert!(!check_diophantine(GOLDEN, 3.0, 1.0, 10_000).pass);
    }

    #[test]
    fn estimate_golden() {
        let (sigma, tau) = estimate_constants(GOLDEN, 10_000).unwrap();
        assert!((0.99..=1.05).contains(&tau), "tau = {tau}");
        assert!(check_diophantine(GOLDEN, sigma, tau, 10_000).pass);
    }

    #[test]
    fn estimate_rejects_rationals() {
        assert!(matches!(estimate_constants(0.5, 1000), Err(Error::Degenerate { q: 2, .. })));
        assert!(matches!(estimate_constants(3.0 / 7.0, 1000), Err(Error::Degenerate { q: 7, .. })));
        assert!(estimate_constants(GOLDEN, 50).is_err());
    }

    #[test]
    fn derived_examples() {
        let d = derived_params(1.0, 1.2).unwrap();
        assert_eq!((d.rho, d.mu), (3, 60));
        let d = derived_params(1.0, 2.0).unwrap();
        assert_eq!((d.rho, d.mu), (4, 75));
        let d = derived_params(1.0, 1.0).unwrap();
        let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((d.lemma_constant - 2.0 * zeta2).abs() < 1e-6);
        assert!(d.lemma_constant >= 2.0 * zeta2 - 1e-12);
        assert!(derived_params(0.0, 1.0).is_err());
    }

    #[test]
    fn params_reject_rational_alpha() {
        assert!(matches!(DiophantineParams::new(1.0 / 3.0, 0.1, 1.0, 32), Err(Error::NotDiophantine { m: 3, .. })));
        let p = DiophantineParams::new(GOLDEN, 1.0, 1.0, 32).unwrap();
        assert_eq!(p.verified(64).unwrap().check_bound, 64);
    }

    proptest! {
        #[test]
        fn divisor_symmetries(alpha in 0.0f64..1.0, m in 1i64..5000) {
            let a = divisor(alpha, m);
            prop_assert!((a - divisor(alpha, -m)).abs() < 1e-12);
            prop_assert!((a - divisor(alpha + 1.0, m)).abs() < 1e-9);
        }

        #[test]
        fn check_is_monotone(alpha in 0.01f64..0.99, sigma in 0.01f64..2.0, tau in 0.5f64..3.0,
                             ds in 0.0f64..1.0, dt in 0.0f64..1.0) {
            if check_diophantine(alpha, sigma, tau, 500).pass {
                prop_assert!(check_diophantine(alpha, sigma * ds, tau + dt, 500).pass);
            }
        }

        #[test]
        fn lemma_constant_decreases_in_sigma(sigma in 0.05f64..5.0, tau in 0.2f64..3.0) {
            let a = derived_params_with(sigma, tau, 1000).unwrap().lemma_constant;
            let b = derived_params_with(sigma * 1.1, tau, 1000).unwrap().lemma_constant;
            prop_assert!(b < a);
        }
    }
}
