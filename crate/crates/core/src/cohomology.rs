//! The linear operators `Δ_α u = u∘T_α - u` and
//! `Δ_U0 u = (u1∘U0 - u1 - u2, u2∘U0 - u2)`, the exact solver for
//! `Δ_α u = φ - [φ]`, and the defect `𝒩 = Δ_U0 ξ - (S_N f - [S_N f])`.
//!
//! Composition with `U0(x, y) = (x + y, y)` is done row by row: the Fourier
//! row `m` is evaluated at the Lobatto nodes, multiplied by `e^{2 pi i m y}`
//! and transformed back. This is exact in `x` and commutes exactly with
//! the diagonal multiplier `Δ_α`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::diophantine::{divisor, DiophantineParams};
use crate::error::{Error, Result};
use crate::funcspace::{holder_norm, sup_norm, CylinderFunction, VectorFunction};
use crate::smoothing::{smooth_vector, CutoffProfile};

/// Divisors below this are treated as resonances.
pub const RESONANCE_THRESHOLD: f64 = 1e-14;

fn shift_multiplier(alpha: f64, m: i64) -> Complex64 {
    let t = (m as f64 * alpha).rem_euclid(1.0);
    Complex64::from_polar(1.0, 2.0 * PI * t)
}

/// `f∘T_α - f` for one component.
pub fn delta_alpha(f: &CylinderFunction, alpha: f64) -> CylinderFunction {
    f.map_modes(|m, _| shift_multiplier(alpha, m) - 1.0)
}

/// `f∘T_α`.
pub fn translate(f: &CylinderFunction, alpha: f64) -> CylinderFunction {
    f.map_modes(|m, _| shift_multiplier(alpha, m))
}

pub fn apply_delta_alpha(u: &VectorFunction, alpha: f64) -> VectorFunction {
    u.map(|c| delta_alpha(c, alpha))
}

/// `f∘U0`, i.e. `(x, y) ↦ f(x + y, y)`.
pub fn compose_twist(f: &CylinderFunction) -> CylinderFunction {
    f.shear()
}

/// `(u1∘U0 - u1 - u2, u2∘U0 - u2)`.
pub fn apply_delta_u0(u: &VectorFunction) -> Result<VectorFunction> {
    let c1 = compose_twist(&u.c1).sub(&u.c1)?.sub(&u.c2)?;
    let c2 = compose_twist(&u.c2).sub(&u.c2)?;
    VectorFunction::new(c1, c2)
}

/// `ℒ(f, k) = Δ_U0 k - Δ_α f`, the linearised commutator of
/// `(U0 + f, T_α + k)`.
pub fn commutator_operator(f: &VectorFunction, k: &VectorFunction, alpha: f64) -> Result<VectorFunction> {
    apply_delta_u0(k)?.sub(&apply_delta_alpha(f, alpha))
}

/// Solution of `Δ_α u = φ - [φ]` with diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct CohomologySolution {
    pub u: CylinderFunction,
    /// `‖Δ_α u - (φ - [φ])‖_0`.
    pub residual_c0: f64,
    /// `‖u‖_0 / ‖φ‖_ρ`, when `ρ` is within the norm guard of the grid.
    pub bound_ratio: Option<f64>,
}

fn check_alpha(phi: &CylinderFunction, dio: &DiophantineParams) -> Result<()> {
    let needed = (phi.grid().nx() / 2) as u64;
    dio.verified(needed)?;
    Ok(())
}

/// Divides mode `m` by `e^{2 pi i m alpha} - 1`; the mean row becomes 0.
pub(crate) fn solve_raw(phi: &CylinderFunction, alpha: f64) -> Result<CylinderFunction> {
    for m in 1..=phi.grid().max_mode() {
        let d = divisor(alpha, m);
        if d < RESONANCE_THRESHOLD {
            return Err(Error::Resonance { m, divisor: d });
        }
    }
    Ok(phi.map_modes(|m, _| if m == 0 { Complex64::new(0.0, 0.0) } else { (shift_multiplier(alpha, m) - 1.0).inv() }))
}

/// Exact spectral solve of `Δ_α u = φ - [φ]` with `[u] = 0`.
///
/// Requires `alpha` to pass the Diophantine check up to `nx / 2`.
pub fn solve_delta_alpha(phi: &CylinderFunction, dio: &DiophantineParams) -> Result<CohomologySolution> {
    check_alpha(phi, dio)?;
    let u = solve_raw(phi, dio.alpha)?;
    let residual_c0 = sup_norm(&delta_alpha(&u, dio.alpha).sub(&phi.zero_mean_part())?);
    let bound_ratio = if dio.rho as usize <= phi.grid().ny() / 4 {
        let den = holder_norm(phi, dio.rho as f64)?;
        Some(if den == 0.0 { 0.0 } else { sup_norm(&u) / den })
    } else {
        None
    };
    Ok(CohomologySolution { u, residual_c0, bound_ratio })
}

/// Component-wise solve for a vector right-hand side without diagnostics.
pub fn solve_vector(phi: &VectorFunction, dio: &DiophantineParams) -> Result<VectorFunction> {
    check_alpha(&phi.c1, dio)?;
    phi.try_map(|c| solve_raw(c, dio.alpha))
}

/// `𝒩 = Δ_U0 ξ - (S_N f - [S_N f])`.
pub fn defect_n(xi: &VectorFunction, f: &VectorFunction, n: f64, profile: &CutoffProfile) -> Result<VectorFunction> {
    let sf = smooth_vector(f, n, profile)?;
    let centered = sf.sub(&sf.average_over_x())?;
    apply_delta_u0(xi)?.sub(&centered)
}
