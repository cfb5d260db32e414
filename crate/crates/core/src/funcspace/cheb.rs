//! Chebyshev–Gauss–Lobatto transforms, Clenshaw evaluation and the
//! coefficient recurrence for differentiation.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Lobatto nodes `t_k = cos(pi k / (n - 1))`, descending from 1 to -1.
pub(crate) fn lobatto_nodes(n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|k| {
            // exact endpoints and midpoint
            if 2 * k == n - 1 {
                0.0
            } else {
                (PI * k as f64 / last).cos()
            }
        })
        .collect()
}

/// `cos(pi j k / (n - 1))`, row-major in `(j, k)`.
pub(crate) struct LobattoTable {
    n: usize,
    cos: Vec<f64>,
}

impl LobattoTable {
    pub(crate) fn new(n: usize) -> Self {
        let last = n - 1;
        let period = 2 * last;
        let cos = (0..n * n)
            .map(|idx| {
                let (j, k) = (idx / n, idx % n);
                // reduce jk mod 2(n-1) so the argument stays in [0, 2pi)
                let r = (j * k) % period;
                (PI * r as f64 / last as f64).cos()
            })
            .collect();
        Self { n, cos }
    }

    /// Coefficients `a_j` of `sum_j a_j T_j` interpolating `vals` at the nodes.
    pub(crate) fn forward(&self, vals: &[Complex64], out: &mut [Complex64]) {
        let n = self.n;
        let last = (n - 1) as f64;
        for j in 0..n {
            let row = &self.cos[j * n..(j + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                let w = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                acc += vals[k] * (w * row[k]);
            }
            let mut a = acc * (2.0 / last);
            if j == 0 || j == n - 1 {
                a *= 0.5;
            }
            out[j] = a;
        }
    }

    /// Values of `sum_j a_j T_j` at the nodes.
    pub(crate) fn inverse(&self, a: &[Complex64], out: &mut [Complex64]) {
        let n = self.n;
        for (k, o) in out.iter_mut().enumerate().take(n) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, aj) in a.iter().enumerate().take(n) {
                acc += aj * self.cos[j * n + k];
            }
            *o = acc;
        }
    }
}

/// Clenshaw evaluation of `sum_j a_j T_j(t)` for real coefficients.
pub(crate) fn clenshaw(a: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &aj in a.iter().skip(1).rev() {
        let b0 = aj + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    a[0] + t * b1 - b2
}

/// Clenshaw evaluation for complex coefficients.
pub(crate) fn clenshaw_c(a: &[Complex64], t: f64) -> Complex64 {
    let mut b1 = Complex64::new(0.0, 0.0);
    let mut b2 = Complex64::new(0.0, 0.0);
    for &aj in a.iter().skip(1).rev() {
        let b0 = aj + b1 * (2.0 * t) - b2;
        b2 = b1;
        b1 = b0;
    }
    a[0] + b1 * t - b2
}

/// Coefficients of `d/dt` of a Chebyshev series (same length, top entry 0).
pub(crate) fn differentiate(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let mut b = vec![Complex64::new(0.0, 0.0); n];
    if n < 2 {
        return b;
    }
    let top = n - 1;
    b[top - 1] = a[top] * (2.0 * top as f64);
    for k in (1..top).rev() {
        b[k - 1] = b[k + 1] + a[k] * (2.0 * k as f64);
    }
    b[0] *= 0.5;
    b
}

/// `T_j(t_l)` for all `l`, row-major in `(l, j)`.
pub(crate) fn basis_matrix(ts: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; ts.len() * n];
    for (l, &t) in ts.iter().enumerate() {
        let row = &mut out[l * n..(l + 1) * n];
        row[0] = 1.0;
        if n > 1 {
            row[1] = t;
        }
        for j in 2..n {
            row[j] = 2.0 * t * row[j - 1] - row[j - 2];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_recovers_t2() {
        let n = 8;
        let nodes = lobatto_nodes(n);
        let vals: Vec<Complex64> = nodes.iter().map(|&t| Complex64::new(2.0 * t * t - 1.0, 0.0)).collect();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        LobattoTable::new(n).forward(&vals, &mut out);
        for (j, c) in out.iter().enumerate() {
            let want = if j == 2 { 1.0 } else { 0.0 };
            assert!((c.re - want).abs() < 1e-14, "j={j} {c}");
        }
    }

    #[test]
    fn derivative_of_t3() {
        // T3' = 3 T0 + 6 T2
        let a = vec![0.0, 0.0, 0.0, 1.0, 0.0].into_iter().map(|r| Complex64::new(r, 0.0)).collect::<Vec<_>>();
        let b = differentiate(&a);
        let re: Vec<f64> = b.iter().map(|c| c.re).collect();
        assert_eq!(re, vec![3.0, 0.0, 6.0, 0.0, 0.0]);
    }

    #[test]
    fn clenshaw_matches_cos_form() {
        let a = [0.3, -0.2, 0.5, 0.1];
        for &t in &[-1.0, -0.4, 0.0, 0.7, 1.0] {
            let th: f64 = f64::acos(t);
            let direct: f64 = a.iter().enumerate().map(|(j, c)| c * (j as f64 * th).cos()).sum();
            assert!((clenshaw(&a, t) - direct).abs() < 1e-14);
        }
    }
}
