//! Hypothesis checks and probes: commutator smallness, the average of
//! `k2`, the intersection property on horizontal circles, semi-conjugacy
//! residuals, phase portraits and the 2-torus counterexample.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::commutator_operator;
use crate::error::{Error, Result};
use crate::funcspace::{sup_norm, CylinderFunction, GridSpec, Interval, VectorFunction};
use crate::maps::{Base, CylinderMap};

/// `min(|t mod 1|, 1 - |t mod 1|)`.
pub fn circle_distance(t: f64) -> f64 {
    let r = t.rem_euclid(1.0);
    r.min(1.0 - r)
}

/// `W(x, y) = x + v(x, y)` with a Lipschitz bound for `v`.
///
/// A zero `v` is treated as the projection `π₁`, defined on the whole
/// cylinder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemiConjugacy {
    pub v: CylinderFunction,
    pub lipschitz: f64,
}

impl SemiConjugacy {
    /// Rejects bounds that are not `> 1` or fall below the measured slope.
    pub fn new(v: CylinderFunction, lipschitz: f64) -> Result<Self> {
        let slope = measured_slope(&v)?;
        if !(lipschitz > 1.0) || lipschitz < slope {
            return Err(Error::Contract(format!(
                "Lipschitz bound {lipschitz} must exceed 1 and the measured slope {slope:e}"
            )));
        }
        Ok(Self { v, lipschitz })
    }

    /// Bound `max(1 + 1e-6, 1.01 * slope)`.
    pub fn with_measured_lipschitz(v: CylinderFunction) -> Result<Self> {
        let slope = measured_slope(&v)?;
        Ok(Self { v, lipschitz: (1.0 + 1e-6_f64).max(1.01 * slope) })
    }

    pub fn projection(grid: GridSpec) -> Self {
        Self { v: CylinderFunction::zeros(grid), lipschitz: 1.0 + 1e-6 }
    }

    pub fn domain(&self) -> Option<Interval> {
        (!self.v.is_zero()).then(|| self.v.interval())
    }

    pub fn apply(&self, x: f64, y: f64) -> Result<f64> {
        if self.v.is_zero() {
            return Ok(x);
        }
        Ok(x + self.v.evaluate(x, y)?)
    }
}

/// `sup |∇v|` on a 4x oversampled lattice; the Euclidean Lipschitz
/// constant of `v` up to lattice resolution.
pub fn measured_slope(v: &CylinderFunction) -> Result<f64> {
    if v.is_zero() {
        return Ok(0.0);
    }
    let g = v.grid();
    let iv = g.interval();
    let ly = 4 * g.ny() + 1;
    let ys: Vec<f64> = (0..ly).map(|l| iv.lo() + iv.width() * l as f64 / (ly - 1) as f64).collect();
    let lx = 4 * g.nx();
    let vx = v.derivative(1, 0)?.lattice(lx, &ys)?;
    let vy = v.derivative(0, 1)?.lattice(lx, &ys)?;
    Ok(vx.iter().zip(&vy).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max))
}

fn lattice_points(grid: &GridSpec, iv: Interval) -> Vec<(f64, f64)> {
    let (lx, ly) = (2 * grid.nx(), 2 * grid.ny() + 1);
    (0..lx)
        .flat_map(|i| (0..ly).map(move |l| (i as f64 / lx as f64, iv.lo() + iv.width() * l as f64 / (ly - 1) as f64)))
        .collect()
}

fn par_max(points: &[(f64, f64)], f: impl Fn(f64, f64) -> Result<f64> + Sync) -> Result<f64> {
    let vals: Vec<Result<f64>> = points.par_iter().map(|&(x, y)| f(x, y)).collect();
    vals.into_iter().try_fold(0.0_f64, |m, v| Ok(m.max(v?)))
}

fn common_domain(maps: &[&CylinderMap], fallback: Interval) -> Result<Interval> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    let mut shift: f64 = 0.0;
    let mut any = false;
    for m in maps {
        if let Some(d) = m.domain() {
            any = true;
            lo = lo.max(d.lo());
            hi = hi.min(d.hi());
        }
        shift = shift.max(m.vertical_sup());
    }
    if !any {
        return Ok(fallback);
    }
    Interval::new(lo + shift * 1.01 + 1e-12, hi - shift * 1.01 - 1e-12)
        .map_err(|_| Error::Contract("maps have no common interval with margin".into()))
}

/// Direct and linearised commutator sizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CommutatorResidual {
    /// `‖F∘K - K∘F‖_0` on the common interval with margin.
    pub direct: f64,
    /// `‖ℒ(f, k)‖_0 = ‖Δ_U0 k - Δ_α f‖_0`.
    pub operator: f64,
}

fn twist_translation(f: &CylinderMap, k: &CylinderMap) -> Result<f64> {
    match (&f.base, &k.base) {
        (Base::Twist, Base::Translation(a)) => Ok(*a),
        _ => Err(Error::InvalidArgument(format!(
            "expected a twist and a translation, got {} and {}",
            f.base.name(),
            k.base.name()
        ))),
    }
}

fn perts(f: &CylinderMap, k: &CylinderMap, grid: GridSpec) -> Result<(VectorFunction, VectorFunction)> {
    let g = f.pert.as_ref().or(k.pert.as_ref()).map_or(grid, |p| *p.grid());
    let (fp, kp) = (f.pert_or_zero(g), k.pert_or_zero(g));
    if fp.grid() != kp.grid() {
        return Err(Error::GridMismatch("F and K perturbations live on different grids".into()));
    }
    Ok((fp, kp))
}

/// Both views of `F∘K - K∘F` for `F = U0 + f`, `K = T_α + k`.
pub fn commutator_residual(f: &CylinderMap, k: &CylinderMap, grid: GridSpec) -> Result<CommutatorResidual> {
    let alpha = twist_translation(f, k)?;
    let target = common_domain(&[f, k], grid.interval())?;
    let direct = par_max(&lattice_points(&grid, target), |x, y| {
        let (a, b) = k.apply(x, y)?;
        let fk = f.apply(a, b)?;
        let (c, d) = f.apply(x, y)?;
        let kf = k.apply(c, d)?;
        Ok((fk.0 - kf.0).abs().max((fk.1 - kf.1).abs()))
    })?;
    let (fp, kp) = perts(f, k, grid)?;
    let operator = commutator_operator(&fp, &kp, alpha)?.sup_norm();
    Ok(CommutatorResidual { direct, operator })
}

/// `‖[k2]‖_0` against `‖f‖_1 ‖k‖_0 + ‖k‖_1 ‖f‖_0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct K2Probe {
    pub avg_k2: f64,
    pub bound: f64,
    /// `avg_k2 / bound`, 0 when both vanish.
    pub ratio: f64,
}

pub fn k2_average_probe(f: &CylinderMap, k: &CylinderMap, grid: GridSpec) -> Result<K2Probe> {
    twist_translation(f, k)?;
    let (fp, kp) = perts(f, k, grid)?;
    let avg_k2 = sup_norm(&kp.c2.average_over_x());
    let bound = fp.holder_norm(1.0)? * kp.sup_norm() + kp.holder_norm(1.0)? * fp.sup_norm();
    let ratio = if avg_k2 == 0.0 { 0.0 } else { avg_k2 / bound };
    Ok(K2Probe { avg_k2, bound, ratio })
}

/// Sign-change scan of `f2` on horizontal circles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntersectionReport {
    pub pass: bool,
    /// `min over y of min(max_x f2, -min_x f2)`: positive when every circle
    /// sees a strict sign change, 0 for `f2 ≡ 0`, negative on failure.
    pub margin: f64,
    /// Circle attaining the margin.
    pub worst_y: f64,
}

/// Checks that `x ↦ f2(x, y)` has a zero on each of `y_samples` circles.
/// Only horizontal circles are examined.
pub fn intersection_check(f: &CylinderMap, grid: GridSpec, y_samples: usize) -> Result<IntersectionReport> {
    let Some(p) = &f.pert else {
        return Ok(IntersectionReport { pass: true, margin: 0.0, worst_y: grid.interval().mid() });
    };
    let iv = p.interval();
    let n = y_samples.max(2);
    let ys: Vec<f64> = (0..n).map(|k| iv.lo() + iv.width() * k as f64 / (n - 1) as f64).collect();
    let lx = 4 * p.grid().nx();
    let vals = p.c2.lattice(lx, &ys)?;
    let mut margin = f64::INFINITY;
    let mut worst_y = ys[0];
    let mut pass = true;
    for (l, &y) in ys.iter().enumerate() {
        let col = (0..lx).map(|i| vals[i * ys.len() + l]);
        let (mn, mx) = col.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        pass &= mn <= 0.0 && mx >= 0.0;
        let m = mx.min(-mn);
        if m < margin {
            margin = m;
            worst_y = y;
        }
    }
    Ok(IntersectionReport { pass, margin, worst_y })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SemiConjugacyReport {
    /// `sup circle_distance(W(K(z)) - W(z) - α)`.
    pub residual: f64,
    /// Measured slope of `v`.
    pub slope: f64,
}

/// Residual of `W∘K = R_α∘W` over the points `z` with `z` and `K(z)` in the
/// domain of `W`.
pub fn semiconjugacy_residual(
    w: &SemiConjugacy,
    k: &CylinderMap,
    alpha: f64,
    grid: GridSpec,
) -> Result<SemiConjugacyReport> {
    let mut iv = k.domain().unwrap_or_else(|| grid.interval());
    if let Some(d) = w.domain() {
        let m = k.vertical_sup() * 1.01 + 1e-12;
        let lo = iv.lo().max(d.lo() + m);
        let hi = iv.hi().min(d.hi() - m);
        iv = Interval::new(lo, hi).map_err(|_| Error::Domain { y: lo, lo: d.lo(), hi: d.hi() })?;
    }
    let residual = par_max(&lattice_points(&grid, iv), |x, y| {
        let (a, b) = k.apply(x, y)?;
        Ok(circle_distance(w.apply(a, b)? - w.apply(x, y)? - alpha))
    })?;
    Ok(SemiConjugacyReport { residual, slope: measured_slope(&w.v)? })
}

/// Orbit table, one row per recorded iterate.
#[derive(Clone, Debug, PartialEq)]
pub struct Portrait {
    /// `(seed_id, n, x mod 1, y)` with `n = 0..n_iter`.
    pub rows: Vec<(usize, usize, f64, f64)>,
    /// Seeds whose orbit left the domain and was truncated.
    pub escaped: Vec<usize>,
}

impl Portrait {
    /// CSV with header `seed_id,n,x,y`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.rows.len() * 48 + 16);
        out.push_str("seed_id,n,x,y\n");
        for (s, n, x, y) in &self.rows {
            out.push_str(&format!("{s},{n},{x},{y}\n"));
        }
        out
    }
}

/// `n` seeds drawn uniformly from `T x iv` with a seeded generator.
pub fn portrait_seeds(n: usize, iv: Interval, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (rng.gen::<f64>(), rng.gen_range(iv.lo()..iv.hi()))).collect()
}

/// Records `F^n(seed)` for `n = 0..n_iter`. With `wrap_y` the action is
/// reduced into `[lo, lo + 1)` of the map's domain (for maps commuting
/// with `y ↦ y + 1`, such as the standard family); otherwise an orbit that
/// leaves the domain is truncated and flagged.
pub fn phase_portrait(f: &CylinderMap, seeds: &[(f64, f64)], n_iter: usize, wrap_y: bool) -> Result<Portrait> {
    let lo = f.domain().map(|d| d.lo());
    if wrap_y {
        if let Some(d) = f.domain() {
            if d.width() < 1.0 {
                return Err(Error::InvalidArgument(format!("wrapping y needs a domain of width >= 1, got {d}")));
            }
        }
    }
    let orbits: Vec<(Vec<(f64, f64)>, bool)> = seeds
        .par_iter()
        .map(|&(x0, y0)| {
            let mut pts = Vec::with_capacity(n_iter);
            let (mut x, mut y) = (x0.rem_euclid(1.0), y0);
            for n in 0..n_iter {
                pts.push((x, y));
                if n + 1 == n_iter {
                    break;
                }
                match f.apply(x, y) {
                    Ok((a, b)) => {
                        x = a.rem_euclid(1.0);
                        y = match (wrap_y, lo) {
                            (true, Some(l)) => l + (b - l).rem_euclid(1.0),
                            _ => b,
                        };
                    }
                    Err(_) => return (pts, true),
                }
            }
            (pts, false)
        })
        .collect();
    let mut rows = Vec::new();
    let mut escaped = Vec::new();
    for (s, (pts, esc)) in orbits.into_iter().enumerate() {
        if esc {
            escaped.push(s);
        }
        rows.extend(pts.into_iter().enumerate().map(|(n, (x, y))| (s, n, x, y)));
    }
    Ok(Portrait { rows, escaped })
}

/// Minimum gap between the torus `y = ψ(x)` and its image under
/// `(x, y) ↦ (x + y, y)` on `T² x R²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub delta: f64,
    pub n_scan: usize,
    /// `min over x of max(|g(x)|, |h(x)|)`.
    pub min_gap: f64,
    pub argmin: f64,
    pub g0: f64,
    pub h0: f64,
    pub h_half: f64,
}

/// `g(x) = sin 2π(x + 1/2 + δ sin 2πx) - sin 2πx`.
pub fn torus_g(delta: f64, x: f64) -> f64 {
    (2.0 * PI * (x + 0.5 + delta * (2.0 * PI * x).sin())).sin() - (2.0 * PI * x).sin()
}

/// `h(x) = cos 2π(x + 1/2 + δ sin 2πx) - cos 2πx`.
pub fn torus_h(delta: f64, x: f64) -> f64 {
    (2.0 * PI * (x + 0.5 + delta * (2.0 * PI * x).sin())).cos() - (2.0 * PI * x).cos()
}

/// Scans `x = i / n_scan`; fails unless the minimum gap is positive.
pub fn counterexample_2d(delta: f64, n_scan: usize) -> Result<CounterexampleReport> {
    if !(delta > 0.0 && delta < 1.0 / (2.0 * PI)) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1/(2 pi)), got {delta}")));
    }
    if n_scan == 0 {
        return Err(Error::InvalidArgument("n_scan must be positive".into()));
    }
    let (min_gap, argmin) = (0..n_scan)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 / n_scan as f64;
            (torus_g(delta, x).abs().max(torus_h(delta, x).abs()), x)
        })
        .reduce(|| (f64::INFINITY, 0.0), |a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    if !(min_gap > 0.0) {
        return Err(Error::Numerical(format!("gap vanishes at x = {argmin}")));
    }
    Ok(CounterexampleReport {
        delta,
        n_scan,
        min_gap,
        argmin,
        g0: torus_g(delta, 0.0),
        h0: torus_h(delta, 0.0),
        h_half: torus_h(delta, 0.5),
    })
}
