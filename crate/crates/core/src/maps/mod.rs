//! Cylinder maps `base + perturbation`, their composition, near-identity
//! inversion, conjugation and the reduction of a frequency twist to `U0`.
//!
//! The angle is kept lifted (no reduction mod 1) so differences such as
//! `F(z) - U0(z)` are periodic functions. A map without perturbation has no
//! domain restriction; otherwise it is defined on `T x I` with `I` the
//! interval of its perturbation.

mod frequency;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diagnostics::SemiConjugacy;
use crate::error::{Error, Result};
use crate::funcspace::{sup_norm, CylinderFunction, GridSpec, Interval, VectorFunction, DOMAIN_TOL};

pub use frequency::Frequency;

/// Image margins below this are logged.
pub const MARGIN_WARN: f64 = 1e-6;
const FIXED_POINT_STEP: f64 = 1e-13;
const FIXED_POINT_MAX_ITER: usize = 200;

/// Unperturbed part of a [`CylinderMap`].
#[derive(Clone, Debug, PartialEq)]
pub enum Base {
    Identity,
    /// `T_alpha(x, y) = (x + alpha, y)`
    Translation(f64),
    /// `U0(x, y) = (x + y, y)`
    Twist,
    /// `F0(x, y) = (x + omega(y), y)`
    FrequencyTwist(Frequency),
}

impl Base {
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        match self {
            Base::Identity => (x, y),
            Base::Translation(a) => (x + a, y),
            Base::Twist => (x + y, y),
            Base::FrequencyTwist(w) => (x + w.eval(y), y),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Base::Identity => "identity",
            Base::Translation(_) => "translation",
            Base::Twist => "twist",
            Base::FrequencyTwist(_) => "frequency_twist",
        }
    }
}

/// `(x, y) ↦ base(x, y) + pert(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderMap {
    pub base: Base,
    pub pert: Option<VectorFunction>,
}

impl CylinderMap {
    pub fn new(base: Base, pert: Option<VectorFunction>) -> Self {
        Self { base, pert }
    }

    pub fn identity() -> Self {
        Self::new(Base::Identity, None)
    }

    pub fn translation(alpha: f64) -> Self {
        Self::new(Base::Translation(alpha), None)
    }

    pub fn twist() -> Self {
        Self::new(Base::Twist, None)
    }

    pub fn with_pert(mut self, pert: VectorFunction) -> Self {
        self.pert = Some(pert);
        self
    }

    pub fn domain(&self) -> Option<Interval> {
        self.pert.as_ref().map(VectorFunction::interval)
    }

    pub fn apply(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let (bx, by) = self.base.apply(x, y);
        match &self.pert {
            None => Ok((bx, by)),
            Some(p) => {
                let (px, py) = p.evaluate(x, y)?;
                Ok((bx + px, by + py))
            }
        }
    }

    /// Perturbation, or zeros on `grid` when there is none.
    pub fn pert_or_zero(&self, grid: GridSpec) -> VectorFunction {
        self.pert.clone().unwrap_or_else(|| VectorFunction::zeros(grid))
    }

    /// `sup |pert_2|`, 0 without perturbation.
    pub fn vertical_sup(&self) -> f64 {
        self.pert.as_ref().map_or(0.0, |p| sup_norm(&p.c2))
    }
}

fn in_domain(domain: Option<Interval>, y: f64) -> bool {
    domain.map_or(true, |d| y >= d.lo() - DOMAIN_TOL && y <= d.hi() + DOMAIN_TOL)
}

/// `S_eps(x, y) = (x + y + eps V'(x), y + eps V'(x))` with
/// `eps V'(x) = eps sin(2 pi q x) / (2 pi q)^r`, as `U0` plus perturbation.
pub fn standard_family(eps: f64, q: u32, r: u32, grid: GridSpec) -> Result<CylinderMap> {
    if q == 0 {
        return Err(Error::InvalidArgument("standard family needs q >= 1".into()));
    }
    let w = 2.0 * std::f64::consts::PI * q as f64;
    let amp = eps / w.powi(r as i32);
    let pert = VectorFunction::fit(grid, |x, _| {
        let v = amp * (w * x).sin();
        (v, v)
    })?;
    Ok(CylinderMap::twist().with_pert(pert))
}

/// Base declared for `g∘f`: identities are absorbed, translations add,
/// anything else keeps `g`'s base.
fn composed_base(g: &Base, f: &Base) -> (Base, bool) {
    match (g, f) {
        (Base::Identity, b) | (b, Base::Identity) => (b.clone(), true),
        (Base::Translation(a), Base::Translation(b)) => (Base::Translation(a + b), true),
        _ => (g.clone(), false),
    }
}

/// `g∘f` on `T x target`, refit as declared base plus perturbation.
pub fn compose(g: &CylinderMap, f: &CylinderMap, grid: GridSpec, target: Interval) -> Result<CylinderMap> {
    let (base, exact) = composed_base(&g.base, &f.base);
    if exact && g.pert.is_none() && f.pert.is_none() {
        return Ok(CylinderMap::new(base, None));
    }
    let grid = grid.with_interval(target);
    let nodes = grid.nodes();
    let images: Vec<Result<(f64, f64)>> = nodes.par_iter().map(|&(x, y)| f.apply(x, y)).collect();
    let images = images.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(d) = g.domain() {
        let mut worst: Option<(f64, usize)> = None;
        let mut margin = f64::INFINITY;
        for (k, &(_, y)) in images.iter().enumerate() {
            let excess = (d.lo() - y).max(y - d.hi());
            margin = margin.min(-excess);
            if excess > DOMAIN_TOL && worst.map_or(true, |w| excess > w.0) {
                worst = Some((excess, k));
            }
        }
        if let Some((excess, k)) = worst {
            let (x, y) = nodes[k];
            return Err(Error::Range {
                x,
                y,
                detail: format!("f maps it to y = {} which is {excess:e} outside {d}", images[k].1),
            });
        }
        if margin < MARGIN_WARN {
            warn!("compose: image margin {margin:e} inside {d}");
        }
    }
    let pert = VectorFunction::try_fit(grid, |x, y| {
        let (fx, fy) = f.apply(x, y)?;
        let (gx, gy) = g.apply(fx, fy)?;
        let (bx, by) = base.apply(x, y);
        Ok((gx - bx, gy - by))
    })?;
    Ok(CylinderMap::new(base, Some(pert)))
}

/// Near-identity diffeomorphism `H = id + gen` on `T x gen.interval()`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conjugacy {
    pub gen: VectorFunction,
    /// `‖gen‖_1`
    pub c1_norm: f64,
}

impl Conjugacy {
    pub fn new(gen: VectorFunction) -> Result<Self> {
        let c1_norm = gen.holder_norm(1.0)?;
        Ok(Self { gen, c1_norm })
    }

    pub fn identity(grid: GridSpec) -> Self {
        Self { gen: VectorFunction::zeros(grid), c1_norm: 0.0 }
    }

    pub fn domain(&self) -> Interval {
        self.gen.interval()
    }

    pub fn apply(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let (a, b) = self.gen.evaluate(x, y)?;
        Ok((x + a, y + b))
    }

    /// `sup |gen_2|`, the vertical displacement.
    pub fn vertical_sup(&self) -> f64 {
        sup_norm(&self.gen.c2)
    }

    /// Domain of `H^{-1}`: the domain shrunk by the vertical displacement.
    pub fn inverse_domain(&self) -> Result<Interval> {
        self.domain()
            .shrink(self.vertical_sup() * (1.0 + 1e-9) + 1e-15)
            .map_err(|_| Error::Contract("vertical displacement of H exceeds its domain".into()))
    }

    /// Solves `z + gen(z) = (px, py)` by the fixed-point iteration
    /// `z ← p - gen(z)`.
    pub fn inverse_point(&self, px: f64, py: f64) -> Result<(f64, f64)> {
        let d = self.domain();
        let (mut zx, mut zy) = (px, py.clamp(d.lo(), d.hi()));
        for _ in 0..FIXED_POINT_MAX_ITER {
            let (a, b) = self.gen.evaluate(zx, zy)?;
            let (nx, ny) = (px - a, (py - b).clamp(d.lo(), d.hi()));
            let step = (nx - zx).abs().max((ny - zy).abs());
            zx = nx;
            zy = ny;
            if step < FIXED_POINT_STEP {
                return Ok((zx, zy));
            }
        }
        Err(Error::Numerical(format!(
            "inverse fixed point at ({px}, {py}) did not converge in {FIXED_POINT_MAX_ITER} iterations"
        )))
    }
}

/// Off-node sample points of `T x target`: cell midpoints of a `2nx x 2ny`
/// lattice.
pub(crate) fn off_node_points(grid: &GridSpec, target: Interval) -> Vec<(f64, f64)> {
    let (lx, ly) = (2 * grid.nx(), 2 * grid.ny());
    (0..lx)
        .flat_map(|i| {
            (0..ly).map(move |l| {
                let x = (i as f64 + 0.5) / lx as f64;
                let y = target.lo() + target.width() * (l as f64 + 0.5) / ly as f64;
                (x, y)
            })
        })
        .collect()
}

/// `sup |outer(inner(w)) - w|` over off-node points of `target`.
pub fn composite_residual(outer: &Conjugacy, inner: &Conjugacy, target: Interval) -> Result<f64> {
    let pts = off_node_points(inner.gen.grid(), target);
    let errs: Vec<Result<f64>> = pts
        .par_iter()
        .map(|&(x, y)| {
            let (ix, iy) = inner.apply(x, y)?;
            let (ox, oy) = outer.apply(ix, iy)?;
            Ok((ox - x).abs().max((oy - y).abs()))
        })
        .collect();
    errs.into_iter().try_fold(0.0_f64, |m, e| Ok(m.max(e?)))
}

/// `H^{-1}` as a conjugacy on `T x target`.
///
/// Requires `‖h‖_1 < min(margin, 1/2)` where `margin` is the distance from
/// `target` to the boundary of `H`'s domain, and `‖h‖_1 < 1/4`.
pub fn invert_near_identity(h: &Conjugacy, grid: GridSpec, target: Interval) -> Result<Conjugacy> {
    let margin = h.domain().margin_over(&target);
    let delta = margin.min(0.5);
    if !(h.c1_norm < delta) || !(h.c1_norm < 0.25) {
        return Err(Error::Contract(format!(
            "inversion needs ‖h‖_1 = {:e} < min(margin {margin:e}, 1/2) and < 1/4",
            h.c1_norm
        )));
    }
    let gen = VectorFunction::try_fit(grid.with_interval(target), |x, y| {
        let (zx, zy) = h.inverse_point(x, y)?;
        Ok((zx - x, zy - y))
    })?;
    let inv = Conjugacy::new(gen)?;
    let residual = composite_residual(h, &inv, target)?;
    if residual > 1e-10 {
        warn!("inverse residual ‖H∘H^-1 - id‖_0 = {residual:e}");
    }
    Ok(inv)
}

/// `H^{-1}∘F∘H` on `T x target`, keeping `F`'s base. `H^{-1}` is evaluated
/// pointwise by fixed-point iteration.
pub fn conjugate(f: &CylinderMap, h: &Conjugacy, grid: GridSpec, target: Interval) -> Result<CylinderMap> {
    if !h.domain().contains(&target) {
        return Err(Error::Contract(format!("link target ⊂ dom H fails: {target} vs {}", h.domain())));
    }
    let inv_dom = h.inverse_domain()?;
    let f_dom = f.domain();
    let pert = VectorFunction::try_fit(grid.with_interval(target), |x, y| {
        let (zx, zy) = h.apply(x, y)?;
        if !in_domain(f_dom, zy) {
            return Err(Error::Contract(format!(
                "link H(target) ⊂ dom F fails at ({x}, {y}): H(z).y = {zy} outside {}",
                f_dom.unwrap()
            )));
        }
        let (px, py) = f.apply(zx, zy)?;
        if !in_domain(Some(inv_dom), py) {
            return Err(Error::Contract(format!(
                "link F(H(target)) ⊂ dom H^-1 fails at ({x}, {y}): F(H(z)).y = {py} outside {inv_dom}"
            )));
        }
        let (qx, qy) = h.inverse_point(px, py)?;
        let (bx, by) = f.base.apply(x, y);
        Ok((qx - bx, qy - by))
    })?;
    Ok(CylinderMap::new(f.base.clone(), Some(pert)))
}

/// Rewrites `(F0(omega) + f, T_alpha + k)` over `(U0, T_alpha)` by the change
/// of action `y ↦ omega(y)`. The new interval is `omega(I)`.
pub fn reduce_by_frequency(f: &CylinderMap, k: &CylinderMap, grid: GridSpec) -> Result<(CylinderMap, CylinderMap)> {
    let Base::FrequencyTwist(omega) = &f.base else {
        return Err(Error::InvalidArgument(format!("reduction needs a frequency twist, got {}", f.base.name())));
    };
    let Base::Translation(alpha) = k.base else {
        return Err(Error::InvalidArgument(format!("reduction needs a translation for K, got {}", k.base.name())));
    };
    let iv = f.domain().unwrap_or_else(|| grid.interval());
    let image = omega.image(iv)?;
    let g = grid.with_interval(image);
    let lift = |map: &CylinderMap| {
        VectorFunction::try_fit(g, |x, eta| {
            let y = omega.inverse(eta, iv)?;
            let (p1, p2) = match &map.pert {
                Some(p) => p.evaluate(x, y)?,
                None => (0.0, 0.0),
            };
            Ok((p1, omega.eval(y + p2) - eta))
        })
    };
    let fp = lift(f)?;
    let kp = lift(k)?;
    Ok((CylinderMap::twist().with_pert(fp), CylinderMap::translation(alpha).with_pert(kp)))
}

/// Ground-truth commuting pair conjugate to `(U0, T_alpha)`.
#[derive(Clone, Debug)]
pub struct ManufacturedPair {
    /// `H∘U0∘H^{-1}`
    pub f: CylinderMap,
    /// `H∘T_alpha∘H^{-1}`
    pub k: CylinderMap,
    pub h_true: Conjugacy,
    /// `W = π₁∘H^{-1}`
    pub w_true: SemiConjugacy,
}

/// Builds `F = H∘U0∘H^{-1}`, `K = H∘T_alpha∘H^{-1}` on `T x interval` with
/// `H = id + h_gen`.
///
/// Requires `‖h_gen‖_1 < 1/8` and the domain of `h_gen` to contain
/// `interval` widened by three times the vertical displacement.
pub fn manufacture_commuting_pair(
    h_gen: &VectorFunction,
    alpha: f64,
    grid: GridSpec,
    interval: Interval,
) -> Result<ManufacturedPair> {
    let h = Conjugacy::new(h_gen.clone())?;
    if !(h.c1_norm < 0.125) {
        return Err(Error::Contract(format!("manufactured pair needs ‖h‖_1 < 1/8, got {:e}", h.c1_norm)));
    }
    let theta2 = h.vertical_sup();
    let needed = interval.widen(3.0 * theta2 + 1e-9)?;
    if !h.domain().contains(&needed) {
        return Err(Error::Contract(format!("generator domain {} must contain {needed}", h.domain())));
    }
    let g = grid.with_interval(interval);
    let conj = |base: Base| -> Result<CylinderMap> {
        let pert = VectorFunction::try_fit(g, |x, y| {
            let (qx, qy) = h.inverse_point(x, y)?;
            let (ux, uy) = base.apply(qx, qy);
            let (rx, ry) = h.apply(ux, uy)?;
            let (bx, by) = base.apply(x, y);
            Ok((rx - bx, ry - by))
        })?;
        Ok(CylinderMap::new(base, Some(pert)))
    };
    let f = conj(Base::Twist)?;
    let k = conj(Base::Translation(alpha))?;
    let w_dom = h.inverse_domain()?;
    let v = CylinderFunction::try_fit(grid.with_interval(w_dom), |x, y| Ok(h.inverse_point(x, y)?.0 - x))?;
    let w_true = SemiConjugacy::with_measured_lipschitz(v)?;
    Ok(ManufacturedPair { f, k, h_true: h, w_true })
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum BaseWire {
    Identity,
    Translation { alpha: f64 },
    Twist,
    FrequencyTwist { omega: String },
}

#[derive(Serialize, Deserialize)]
struct MapWire {
    base: BaseWire,
    pert: Option<VectorFunction>,
    interval: Option<Interval>,
}

impl Serialize for CylinderMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let base = match &self.base {
            Base::Identity => BaseWire::Identity,
            Base::Translation(a) => BaseWire::Translation { alpha: *a },
            Base::Twist => BaseWire::Twist,
            Base::FrequencyTwist(w) => BaseWire::FrequencyTwist { omega: w.source().to_string() },
        };
        MapWire { base, pert: self.pert.clone(), interval: self.domain() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CylinderMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = MapWire::deserialize(d)?;
        let base = match w.base {
            BaseWire::Identity => Base::Identity,
            BaseWire::Translation { alpha } => Base::Translation(alpha),
            BaseWire::Twist => Base::Twist,
            BaseWire::FrequencyTwist { omega } => {
                Base::FrequencyTwist(Frequency::parse(&omega).map_err(D::Error::custom)?)
            }
        };
        let map = CylinderMap::new(base, w.pert);
        if w.interval.is_some() && w.interval != map.domain() {
            return Err(D::Error::custom("map interval does not match its perturbation"));
        }
        Ok(map)
    }
}

#[cfg(test)]
mod tests;
