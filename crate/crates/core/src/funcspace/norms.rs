//! Hölder norms `C^r` on `T x I` with the pair distance capped at 1.
//!
//! Sup norms are taken on an oversampled lattice and then polished by a
//! coordinate golden-section search around the largest lattice values.
//! Hölder seminorms are estimated over a fixed set of point pairs (seeded
//! random pairs plus lattice neighbours), so the result is a lower bound of
//! the true seminorm. Pair distances use `|dx| + |dy|`; this keeps the
//! estimates graded (`‖f‖_r ≥ ‖f‖_s` for `r ≥ s`) by the mean value theorem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::CylinderFunction;
use crate::error::{Error, Result};

/// Estimator knobs for [`holder_norm_with`].
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct NormSettings {
    /// Lattice oversampling factor in both directions.
    pub oversample: usize,
    /// Number of random point pairs for seminorms.
    pub pair_samples: usize,
    pub seed: u64,
    /// Golden-section polishing of lattice maxima.
    pub refine: bool,
}

impl Default for NormSettings {
    fn default() -> Self {
        Self { oversample: 4, pair_samples: 4096, seed: 0x5eed, refine: true }
    }
}

const REFINE_CANDIDATES: usize = 4;
const GOLDEN: f64 = 0.618_033_988_749_894_8;

struct Lattice {
    lx: usize,
    ys: Vec<f64>,
    vals: Vec<f64>,
}

impl Lattice {
    fn new(f: &CylinderFunction, oversample: usize) -> Self {
        let g = f.grid();
        let lx = (g.nx() * oversample.max(1)).next_power_of_two();
        let ly = g.ny() * oversample.max(1) + 1;
        let iv = g.interval();
        let ys: Vec<f64> = (0..ly)
            .map(|l| if l + 1 == ly { iv.hi() } else { iv.lo() + iv.width() * l as f64 / (ly - 1) as f64 })
            .collect();
        let vals = f.lattice(lx, &ys).expect("lattice points lie in the interval");
        Self { lx, ys, vals }
    }

    fn at(&self, i: usize, l: usize) -> f64 {
        self.vals[(i % self.lx) * self.ys.len() + l]
    }
}

/// Golden-section maximisation of `g` on `[a, b]`.
fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while (b - a).abs() > tol {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - GOLDEN * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + GOLDEN * (b - a);
            gd = g(d);
        }
    }
    if gc > gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

fn sup_on_lattice(f: &CylinderFunction, lat: &Lattice, refine: bool) -> f64 {
    let ly = lat.ys.len();
    let mut best = lat.vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !refine || best == 0.0 {
        return best;
    }
    // local maxima of |f| on the lattice (periodic in x, one-sided at y ends)
    let mut cands: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..lat.lx {
        for l in 0..ly {
            let v = lat.at(i, l).abs();
            let mut is_max = v >= lat.at(i + 1, l).abs() && v >= lat.at(i + lat.lx - 1, l).abs();
            if l > 0 {
                is_max &= v >= lat.at(i, l - 1).abs();
            }
            if l + 1 < ly {
                is_max &= v >= lat.at(i, l + 1).abs();
            }
            if is_max {
                cands.push((v, i, l));
            }
        }
    }
    cands.sort_by(|a, b| b.0.total_cmp(&a.0));
    let iv = f.interval();
    let hx = 1.0 / lat.lx as f64;
    let hy = iv.width() / (ly - 1) as f64;
    let absf = |x: f64, y: f64| f.evaluate(x, y.clamp(iv.lo(), iv.hi())).map(f64::abs).unwrap_or(0.0);
    for &(_, i, l) in cands.iter().take(REFINE_CANDIDATES) {
        let (mut x, mut y) = (i as f64 * hx, lat.ys[l]);
        for _ in 0..3 {
            let (nx, vx) = golden_max(|t| absf(t, y), x - hx, x + hx, 1e-12);
            x = nx;
            best = best.max(vx);
            let (ylo, yhi) = ((y - hy).max(iv.lo()), (y + hy).min(iv.hi()));
            let (ny, vy) = golden_max(|t| absf(x, t), ylo, yhi, 1e-12 * iv.width().max(1.0));
            y = ny;
            best = best.max(vy);
            // endpoints are never probed by golden section
            best = best.max(absf(x, ylo)).max(absf(x, yhi));
        }
    }
    best
}

/// `sup |f|` over `T x I` with default estimator settings.
pub fn sup_norm(f: &CylinderFunction) -> f64 {
    let s = NormSettings::default();
    sup_on_lattice(f, &Lattice::new(f, s.oversample), s.refine)
}

/// Point pairs `(x, y, x', y', d)` with `d = |x - x'| + |y - y'| ∈ (0, 1]`.
fn pairs(f: &CylinderFunction, settings: &NormSettings) -> Vec<[f64; 5]> {
    let iv = f.interval();
    let mut out = Vec::with_capacity(settings.pair_samples);
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let (lmin, lmax) = (1e-4_f64.ln(), 0.0_f64);
    for _ in 0..settings.pair_samples {
        let x = rng.gen::<f64>();
        let y = rng.gen_range(iv.lo()..=iv.hi());
        let d = rng.gen_range(lmin..=lmax).exp();
        let u: f64 = rng.gen();
        let sx = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let sy = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let dx = sx * d * u;
        let mut dy = sy * d * (1.0 - u);
        if !iv.contains_point(y + dy) {
            dy = -dy;
        }
        let y2 = (y + dy).clamp(iv.lo(), iv.hi());
        let dist = dx.abs() + (y2 - y).abs();
        if dist > 0.0 {
            out.push([x, y, x + dx, y2, dist]);
        }
    }
    out
}

/// Lattice neighbour quotients at strides `1, 2, 4, ...` in x, y and the
/// diagonal; returns the largest `|Δg| / d^λ`.
fn lattice_quotient(lat: &Lattice, hy: f64, lambda: f64) -> f64 {
    let ly = lat.ys.len();
    let hx = 1.0 / lat.lx as f64;
    let mut best = 0.0_f64;
    let mut s = 1;
    while s < lat.lx.max(ly) {
        for &(sx, sy) in &[(s, 0), (0, s), (s, s)] {
            if sy >= ly {
                continue;
            }
            let d = sx as f64 * hx + sy as f64 * hy;
            if d > 1.0 || d == 0.0 {
                continue;
            }
            let w = d.powf(-lambda);
            for i in 0..lat.lx {
                for l in 0..ly - sy {
                    let q = (lat.at(i + sx, l + sy) - lat.at(i, l)).abs() * w;
                    best = best.max(q);
                }
            }
        }
        s *= 2;
    }
    best
}

fn seminorm(g: &CylinderFunction, lambda: f64, settings: &NormSettings) -> f64 {
    let lat = Lattice::new(g, settings.oversample);
    let hy = g.interval().width() / (lat.ys.len() - 1) as f64;
    let mut best = lattice_quotient(&lat, hy, lambda);
    for p in pairs(g, settings) {
        let a = g.evaluate(p[0], p[1]).expect("pair point inside interval");
        let b = g.evaluate(p[2], p[3]).expect("pair point inside interval");
        best = best.max((a - b).abs() / p[4].powf(lambda));
    }
    best
}

/// `‖f‖_r` with [`NormSettings::default`].
pub fn holder_norm(f: &CylinderFunction, r: f64) -> Result<f64> {
    holder_norm_with(f, r, &NormSettings::default())
}

/// `‖f‖_r`: for integer `r` the largest sup norm of `∂^J f`, `|J| <= r`; for
/// `r = p + λ` additionally the λ-Hölder seminorms of the order-`p`
/// derivatives. Requires `r <= ny / 4`.
pub fn holder_norm_with(f: &CylinderFunction, r: f64, settings: &NormSettings) -> Result<f64> {
    if !(r >= 0.0) || r > (f.grid().ny() / 4) as f64 {
        return Err(Error::InvalidArgument(format!("norm index {r} outside [0, ny/4 = {}]", f.grid().ny() / 4)));
    }
    if f.is_zero() {
        return Ok(0.0);
    }
    let mut p = r.floor() as u32;
    let mut lambda = r - p as f64;
    if lambda > 1.0 - 1e-12 {
        p += 1;
        lambda = 0.0;
    }
    let mut best = 0.0_f64;
    for order in 0..=p {
        for ox in 0..=order {
            let d = f.derivative(ox, order - ox)?;
            let lat = Lattice::new(&d, settings.oversample);
            best = best.max(sup_on_lattice(&d, &lat, settings.refine));
            if order == p && lambda > 1e-12 {
                best = best.max(seminorm(&d, lambda, settings));
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{GridSpec, Interval};
    use std::f64::consts::PI;

    fn g() -> GridSpec {
        GridSpec::new(16, 16, Interval::new(-1.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn sine_norms() {
        let s = CylinderFunction::fit(g(), |x, _| (2.0 * PI * x).sin()).unwrap();
        assert!((holder_norm(&s, 0.0).unwrap() - 1.0).abs() < 1e-3);
        assert!((holder_norm(&s, 1.0).unwrap() - 2.0 * PI).abs() < 1e-2);
    }

    #[test]
    fn zero_has_zero_norm() {
        let z = CylinderFunction::zeros(g());
        for r in [0.0, 0.5, 1.0, 2.5, 4.0] {
            assert_eq!(holder_norm(&z, r).unwrap(), 0.0);
        }
    }

    #[test]
    fn guard_rejects_high_index() {
        let s = CylinderFunction::fit(g(), |x, _| (2.0 * PI * x).sin()).unwrap();
        assert!(holder_norm(&s, 4.5).is_err());
    }

    #[test]
    fn refined_sup_finds_off_lattice_peak() {
        // peak at an irrational position
        let x0 = 0.123_456_7;
        let f =
            CylinderFunction::fit(g(), |x, y| (2.0 * PI * (x - x0)).cos() * (1.0 - 0.3 * (y - 0.2).powi(2))).unwrap();
        assert!((sup_norm(&f) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_holder_of_linear_function() {
        // f = y on [-1, 1]: quotient |dy|^{1/2} is maximised at distance 1
        let f = CylinderFunction::fit(g(), |_, y| y).unwrap();
        let n = holder_norm(&f, 0.5).unwrap();
        assert!((n - 1.0).abs() < 1e-9, "{n}");
    }
}
