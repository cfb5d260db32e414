//! Smoothing operators `S_N` as spectral multipliers, remainders
//! `R_N = id - S_N`, and the measurements that go with them.
//!
//! `S_N` multiplies coefficient `(m, j)` by `chi(|m| / N) * chi(j / J_N)` with
//! `J_N = y_scale * 2 pi * N * halfwidth`: a Chebyshev degree of about
//! `2 pi N halfwidth` resolves y-oscillations of frequency `N` on the
//! interval.

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::funcspace::{holder_norm_with, sup_norm, CylinderFunction, GridSpec, NormSettings, VectorFunction};

/// Shape of the transition of `chi` on `[1, 2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Transition {
    /// `B(q(t - 1))` with `q` the quintic smoothstep and `B` the flat
    /// `exp(-1/s)` blend; flat to all orders at both ends.
    QuinticBump,
    /// Plain quintic smoothstep; only `C^2`.
    Quintic,
}

/// Cutoff `chi`: 1 on `[0, 1]`, 0 on `[2, inf)`, monotone between.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CutoffProfile {
    pub transition: Transition,
    pub y_scale: f64,
}

impl Default for CutoffProfile {
    fn default() -> Self {
        Self { transition: Transition::QuinticBump, y_scale: 1.0 }
    }
}

fn psi(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

fn smoothstep5(s: f64) -> f64 {
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

impl CutoffProfile {
    pub fn chi(&self, t: f64) -> f64 {
        let t = t.abs();
        if t <= 1.0 {
            return 1.0;
        }
        if t >= 2.0 {
            return 0.0;
        }
        let q = smoothstep5(t - 1.0);
        match self.transition {
            Transition::Quintic => 1.0 - q,
            Transition::QuinticBump => {
                let (a, b) = (psi(1.0 - q), psi(q));
                a / (a + b)
            }
        }
    }

    /// Chebyshev cutoff index `J_N` on an interval of half-width `hw`.
    pub fn cheb_cutoff(&self, n: f64, hw: f64) -> f64 {
        self.y_scale * 2.0 * std::f64::consts::PI * n * hw
    }
}

fn check_n(n: f64) -> Result<()> {
    if !(n > 1.0 && n.is_finite()) {
        return Err(Error::InvalidArgument(format!("smoothing needs N > 1, got {n}")));
    }
    Ok(())
}

/// `S_N f`.
pub fn smooth(f: &CylinderFunction, n: f64, profile: &CutoffProfile) -> Result<CylinderFunction> {
    check_n(n)?;
    let jn = profile.cheb_cutoff(n, f.interval().half_width());
    let ny = f.grid().ny();
    let cy: Vec<f64> = (0..ny).map(|j| profile.chi(j as f64 / jn)).collect();
    Ok(f.map_modes(|m, j| (profile.chi(m.unsigned_abs() as f64 / n) * cy[j]).into()))
}

/// `R_N f = f - S_N f`.
pub fn remainder(f: &CylinderFunction, n: f64, profile: &CutoffProfile) -> Result<CylinderFunction> {
    f.sub(&smooth(f, n, profile)?)
}

pub fn smooth_vector(f: &VectorFunction, n: f64, profile: &CutoffProfile) -> Result<VectorFunction> {
    f.try_map(|c| smooth(c, n, profile))
}

/// Which bound a row of a [`ConstantTable`] measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    /// `‖S_N f‖_l / (N^{l-s} ‖f‖_s)`
    Smoothing,
    /// `‖R_N f‖_s N^{l-s} / ‖f‖_l`
    Remainder,
}

impl BoundKind {
    fn tag(self) -> &'static str {
        match self {
            BoundKind::Smoothing => "S",
            BoundKind::Remainder => "R",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantRow {
    pub op: BoundKind,
    pub f_id: String,
    pub n: f64,
    pub s: f64,
    pub l: f64,
    pub ratio: f64,
}

/// Per-member ratios and their maxima per `N` (the empirical `C_{s,l}`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantTable {
    pub rows: Vec<ConstantRow>,
    /// `(N, C_S, C_R)`
    pub constants: Vec<(f64, f64, f64)>,
}

impl ConstantTable {
    /// Largest relative deviation of the per-`N` constants from their mean,
    /// for the smoothing and remainder bounds.
    pub fn spread(&self) -> (f64, f64) {
        let dev = |v: Vec<f64>| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            if mean == 0.0 {
                return 0.0;
            }
            v.iter().map(|c| (c / mean - 1.0).abs()).fold(0.0, f64::max)
        };
        (dev(self.constants.iter().map(|c| c.1).collect()), dev(self.constants.iter().map(|c| c.2).collect()))
    }

    /// CSV with header `op,f_id,N,s,l,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("op,f_id,N,s,l,ratio\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{},{:e}\n", r.op.tag(), r.f_id, r.n, r.s, r.l, r.ratio));
        }
        out
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Measures both smoothing bounds over `corpus` for every `N` in `ns`.
pub fn verify_smoothing_bounds(
    corpus: &dyn Corpus,
    grid: GridSpec,
    ns: &[f64],
    s: f64,
    l: f64,
    profile: &CutoffProfile,
    settings: &NormSettings,
) -> Result<ConstantTable> {
    if !(l >= s && s >= 0.0) {
        return Err(Error::InvalidArgument(format!("need l >= s >= 0, got s = {s}, l = {l}")));
    }
    let mut rows = Vec::new();
    let mut constants = Vec::new();
    for &n in ns {
        let mut cs: f64 = 0.0;
        let mut cr: f64 = 0.0;
        for (id, f) in corpus.members(grid, n)? {
            let sn = smooth(&f, n, profile)?;
            let rn = f.sub(&sn)?;
            let scale = n.powf(l - s);
            let rs = ratio(holder_norm_with(&sn, l, settings)?, scale * holder_norm_with(&f, s, settings)?);
            let rr = ratio(holder_norm_with(&rn, s, settings)? * scale, holder_norm_with(&f, l, settings)?);
            cs = cs.max(rs);
            cr = cr.max(rr);
            rows.push(ConstantRow { op: BoundKind::Smoothing, f_id: id.clone(), n, s, l, ratio: rs });
            rows.push(ConstantRow { op: BoundKind::Remainder, f_id: id, n, s, l, ratio: rr });
        }
        constants.push((n, cs, cr));
    }
    Ok(ConstantTable { rows, constants })
}

/// Least-squares slope of `-log2 ‖R_N f‖_0` against `log2 N` per member.
/// Values below `floor * ‖f‖_0` are dropped; members left with fewer than
/// two points report `None`.
pub fn remainder_decay_slopes(
    corpus: &dyn Corpus,
    grid: GridSpec,
    ns: &[f64],
    profile: &CutoffProfile,
    floor: f64,
) -> Result<Vec<(String, Option<f64>)>> {
    let mut per_member: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for &n in ns {
        for (k, (id, f)) in corpus.members(grid, n)?.into_iter().enumerate() {
            let base = sup_norm(&f);
            let r = sup_norm(&remainder(&f, n, profile)?);
            if per_member.len() <= k {
                per_member.push((id, Vec::new()));
            }
            if r > floor * base {
                per_member[k].1.push((n.log2(), -r.log2()));
            }
        }
    }
    Ok(per_member.into_iter().map(|(id, pts)| (id, (pts.len() >= 2).then(|| ls_slope(&pts)))).collect())
}

pub(crate) fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// `‖f‖_m / (‖f‖_s^{1-λ} ‖f‖_l^λ)` with `m = (1-λ)s + λl`; 0 for `f = 0`.
pub fn interpolation_check(f: &CylinderFunction, s: f64, m: f64, l: f64, settings: &NormSettings) -> Result<f64> {
    if !(s <= m && m <= l && s >= 0.0) {
        return Err(Error::InvalidArgument(format!("need 0 <= s <= m <= l, got ({s}, {m}, {l})")));
    }
    let lambda = if l > s { (m - s) / (l - s) } else { 0.0 };
    let den = holder_norm_with(f, s, settings)?.powf(1.0 - lambda) * holder_norm_with(f, l, settings)?.powf(lambda);
    Ok(ratio(holder_norm_with(f, m, settings)?, den))
}
