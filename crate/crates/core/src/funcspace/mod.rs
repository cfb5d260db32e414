//! Smooth real functions on `T x I` stored as Fourier(x) ⊗ Chebyshev(y)
//! coefficient tensors.
//!
//! The angle `x` is sampled at `nx` equispaced nodes, the action `y` at `ny`
//! Chebyshev–Gauss–Lobatto nodes of the grid interval. Coefficients are
//! indexed `(m, j)` with `m ∈ [-nx/2, nx/2)` and `j ∈ [0, ny)`, and always
//! satisfy `c[-m][j] = conj(c[m][j])`. The Nyquist row `m = -nx/2` is kept
//! at zero so every Fourier multiplier used downstream maps real functions
//! to real functions.

mod cheb;
mod norms;
mod serial;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use norms::{holder_norm, holder_norm_with, sup_norm, NormSettings};

/// Tolerance for points slightly outside the grid interval.
pub const DOMAIN_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Closed action interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: f64,
    hi: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;
    fn try_from(r: RawInterval) -> Result<Self> {
        Interval::new(r.lo, r.hi)
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("interval needs lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.hi + self.lo)
    }

    /// `[lo - delta, hi + delta]`; negative `delta` shrinks.
    pub fn widen(&self, delta: f64) -> Result<Self> {
        Interval::new(self.lo - delta, self.hi + delta)
    }

    pub fn shrink(&self, delta: f64) -> Result<Self> {
        self.widen(-delta)
    }

    pub fn contains(&self, other: &Interval) -> bool {
        other.lo >= self.lo && other.hi <= self.hi
    }

    pub fn contains_point(&self, y: f64) -> bool {
        y >= self.lo && y <= self.hi
    }

    /// Smallest distance from `inner` to the boundary of `self` (negative if
    /// `inner` sticks out).
    pub fn margin_over(&self, inner: &Interval) -> f64 {
        (inner.lo - self.lo).min(self.hi - inner.hi)
    }

    pub(crate) fn to_unit(&self, y: f64) -> f64 {
        (y - self.mid()) / self.half_width()
    }

    pub(crate) fn from_unit(&self, t: f64) -> f64 {
        self.mid() + self.half_width() * t
    }

    /// Point check with [`DOMAIN_TOL`] slack; returns the clamped unit coordinate.
    pub(crate) fn unit_checked(&self, y: f64) -> Result<f64> {
        if !y.is_finite() || y < self.lo - DOMAIN_TOL || y > self.hi + DOMAIN_TOL {
            return Err(Error::Domain { y, lo: self.lo, hi: self.hi });
        }
        Ok(self.to_unit(y).clamp(-1.0, 1.0))
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Resolution and domain of a [`CylinderFunction`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid")]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    interval: Interval,
}

#[derive(Deserialize)]
struct RawGrid {
    nx: usize,
    ny: usize,
    interval: Interval,
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;
    fn try_from(r: RawGrid) -> Result<Self> {
        GridSpec::new(r.nx, r.ny, r.interval)
    }
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, interval: Interval) -> Result<Self> {
        if nx < 8 || !nx.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("nx must be a power of two >= 8, got {nx}")));
        }
        if ny < 4 {
            return Err(Error::InvalidArgument(format!("ny must be >= 4, got {ny}")));
        }
        Ok(Self { nx, ny, interval })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn with_interval(&self, interval: Interval) -> Self {
        Self { interval, ..*self }
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|i| i as f64 / self.nx as f64).collect()
    }

    /// Lobatto nodes mapped into the interval, from `hi` down to `lo`.
    pub fn y_nodes(&self) -> Vec<f64> {
        cheb::lobatto_nodes(self.ny).into_iter().map(|t| self.interval.from_unit(t)).collect()
    }

    /// All fitting nodes, row-major in `(i, k)` (x outer).
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let ys = self.y_nodes();
        self.x_nodes().into_iter().flat_map(|x| ys.iter().map(move |&y| (x, y))).collect()
    }

    fn len(&self) -> usize {
        self.nx * self.ny
    }

    fn half(&self) -> i64 {
        (self.nx / 2) as i64
    }

    /// Largest resolved `|m|`.
    pub fn max_mode(&self) -> i64 {
        self.half() - 1
    }
}

/// Coefficient-wise linear operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlgebraOp {
    Add,
    Sub,
    Scale(f64),
}

/// Real-valued function on `T x I` in spectral form.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderFunction {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl CylinderFunction {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, coeffs: vec![ZERO; grid.len()] }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        let mut f = Self::zeros(grid);
        let idx = f.index(0, 0);
        f.coeffs[idx] = Complex64::new(c, 0.0);
        f
    }

    /// Samples `sampler` at the fitting nodes and transforms.
    pub fn fit<S>(grid: GridSpec, sampler: S) -> Result<Self>
    where
        S: Fn(f64, f64) -> f64 + Sync,
    {
        let nodes = grid.nodes();
        let vals: Vec<f64> = nodes.par_iter().map(|&(x, y)| sampler(x, y)).collect();
        if let Some((n, v)) = nodes.iter().zip(&vals).find(|(_, v)| !v.is_finite()) {
            return Err(Error::Sampling { x: n.0, y: n.1, value: *v });
        }
        Ok(Self::from_node_values(grid, &vals))
    }

    /// Like [`CylinderFunction::fit`] for a fallible sampler.
    pub fn try_fit<S>(grid: GridSpec, sampler: S) -> Result<Self>
    where
        S: Fn(f64, f64) -> Result<f64> + Sync,
    {
        let nodes = grid.nodes();
        // collect first so the reported error is the first in node order
        let vals: Vec<Result<f64>> = nodes.par_iter().map(|&(x, y)| sampler(x, y)).collect();
        let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
        if let Some((n, v)) = nodes.iter().zip(&vals).find(|(_, v)| !v.is_finite()) {
            return Err(Error::Sampling { x: n.0, y: n.1, value: *v });
        }
        Ok(Self::from_node_values(grid, &vals))
    }

    /// Transforms values given at [`GridSpec::nodes`] order.
    pub fn from_node_values(grid: GridSpec, vals: &[f64]) -> Self {
        let (nx, ny) = (grid.nx, grid.ny);
        assert_eq!(vals.len(), nx * ny);
        let fft = FftPlanner::new().plan_fft_forward(nx);
        // per y-node Fourier transform, stored (m-slot, k) with m-slot = m mod nx
        let mut fourier = vec![ZERO; nx * ny];
        let mut buf = vec![ZERO; nx];
        for k in 0..ny {
            for i in 0..nx {
                buf[i] = Complex64::new(vals[i * ny + k], 0.0);
            }
            fft.process(&mut buf);
            for s in 0..nx {
                fourier[s * ny + k] = buf[s] / nx as f64;
            }
        }
        let table = cheb::LobattoTable::new(ny);
        let mut out = Self::zeros(grid);
        let half = grid.half();
        for m in -half + 1..half {
            let slot = m.rem_euclid(nx as i64) as usize;
            let row = &fourier[slot * ny..(slot + 1) * ny];
            let start = out.index(m, 0);
            table.forward(row, &mut out.coeffs[start..start + ny]);
        }
        out.symmetrize();
        out
    }

    /// Builds from a raw `(m, j)` row-major tensor. Rejects tensors whose
    /// Hermitian defect exceeds `1e-12` relative to their largest entry.
    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidArgument(format!("expected {} coefficients, got {}", grid.len(), coeffs.len())));
        }
        let mut f = Self { grid, coeffs };
        let scale = f.max_abs_coeff().max(1.0);
        if f.hermitian_defect() > 1e-12 * scale {
            return Err(Error::InvalidArgument("coefficients are not Hermitian in m".into()));
        }
        f.symmetrize();
        Ok(f)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn interval(&self) -> Interval {
        self.grid.interval
    }

    /// Row-major `(m, j)` tensor, `m` ascending from `-nx/2`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, m: i64, j: usize) -> Complex64 {
        self.coeffs[self.index(m, j)]
    }

    pub(crate) fn index(&self, m: i64, j: usize) -> usize {
        ((m + self.grid.half()) as usize) * self.grid.ny + j
    }

    pub(crate) fn row(&self, m: i64) -> &[Complex64] {
        let s = self.index(m, 0);
        &self.coeffs[s..s + self.grid.ny]
    }

    pub(crate) fn row_mut(&mut self, m: i64) -> &mut [Complex64] {
        let s = self.index(m, 0);
        let ny = self.grid.ny;
        &mut self.coeffs[s..s + ny]
    }

    /// Applies `mult(m, j)` to every resolved coefficient. The multiplier
    /// must satisfy `mult(-m, j) = conj(mult(m, j))`.
    pub(crate) fn map_modes(&self, mult: impl Fn(i64, usize) -> Complex64) -> Self {
        let mut out = self.clone();
        let half = self.grid.half();
        for m in -half + 1..half {
            for j in 0..self.grid.ny {
                let idx = out.index(m, j);
                out.coeffs[idx] *= mult(m, j);
            }
        }
        out.symmetrize();
        out
    }

    /// Refined lattice supremum, see [`sup_norm`].
    pub fn sup_norm(&self) -> f64 {
        sup_norm(self)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// `max |c[-m][j] - conj(c[m][j])|` including the Nyquist row and the
    /// imaginary part of the mean row.
    pub fn hermitian_defect(&self) -> f64 {
        let half = self.grid.half();
        let mut d: f64 = 0.0;
        for j in 0..self.grid.ny {
            d = d.max(self.coeff(-half, j).norm());
            d = d.max(self.coeff(0, j).im.abs());
            for m in 1..half {
                d = d.max((self.coeff(-m, j) - self.coeff(m, j).conj()).norm());
            }
        }
        d
    }

    fn symmetrize(&mut self) {
        let half = self.grid.half();
        let ny = self.grid.ny;
        for j in 0..ny {
            let nyq = self.index(-half, j);
            self.coeffs[nyq] = ZERO;
            let z = self.index(0, j);
            self.coeffs[z].im = 0.0;
            for m in 1..half {
                let (p, q) = (self.index(m, j), self.index(-m, j));
                let avg = 0.5 * (self.coeffs[p] + self.coeffs[q].conj());
                self.coeffs[p] = avg;
                self.coeffs[q] = avg.conj();
            }
        }
        debug_assert!(self.hermitian_defect() == 0.0);
    }

    /// Per-`j` Fourier sums `Re sum_m c[m][j] e^{2 pi i m x}` given the
    /// phases `e^{2 pi i m x}` for `m = 1..nx/2-1`.
    fn x_sums(&self, phases: &[Complex64], out: &mut [f64]) {
        let ny = self.grid.ny;
        out.copy_from_slice(&self.row(0).iter().map(|c| c.re).collect::<Vec<_>>()[..ny]);
        for (k, ph) in phases.iter().enumerate() {
            let row = self.row(k as i64 + 1);
            for j in 0..ny {
                let c = row[j];
                out[j] += 2.0 * (c.re * ph.re - c.im * ph.im);
            }
        }
    }

    pub(crate) fn phases(nx: usize, x: f64) -> Vec<Complex64> {
        let x = x - x.floor();
        (1..(nx / 2) as i64)
            .map(|m| {
                let (s, c) = (2.0 * PI * m as f64 * x).sin_cos();
                Complex64::new(c, s)
            })
            .collect()
    }

    fn eval_at(&self, phases: &[Complex64], t: f64) -> f64 {
        let mut s = vec![0.0; self.grid.ny];
        self.x_sums(phases, &mut s);
        cheb::clenshaw(&s, t)
    }

    /// Point value; `x` is any real, `y` must lie in the grid interval.
    pub fn evaluate(&self, x: f64, y: f64) -> Result<f64> {
        let t = self.grid.interval.unit_checked(y)?;
        Ok(self.eval_at(&Self::phases(self.grid.nx, x), t))
    }

    /// Values on the tensor lattice `x_i = i / lx` (`lx >= nx`, power of
    /// two) times `ys`, row-major in `(i, l)`.
    pub fn lattice(&self, lx: usize, ys: &[f64]) -> Result<Vec<f64>> {
        if lx < self.grid.nx || !lx.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("lattice size {lx} must be a power of two >= nx")));
        }
        let ts = ys.iter().map(|&y| self.grid.interval.unit_checked(y)).collect::<Result<Vec<_>>>()?;
        let ny = self.grid.ny;
        let half = self.grid.half();
        let ifft = FftPlanner::new().plan_fft_inverse(lx);
        // along x for each Chebyshev index: a_j(x_i)
        let mut ax = vec![0.0; ny * lx];
        let mut buf = vec![ZERO; lx];
        for j in 0..ny {
            buf.iter_mut().for_each(|b| *b = ZERO);
            for m in -half + 1..half {
                buf[m.rem_euclid(lx as i64) as usize] = self.coeff(m, j);
            }
            ifft.process(&mut buf);
            for i in 0..lx {
                ax[j * lx + i] = buf[i].re;
            }
        }
        let basis = cheb::basis_matrix(&ts, ny);
        let nl = ts.len();
        let mut out = vec![0.0; lx * nl];
        out.par_chunks_mut(nl).enumerate().for_each(|(i, row)| {
            for l in 0..nl {
                let b = &basis[l * ny..(l + 1) * ny];
                let mut acc = 0.0;
                for j in 0..ny {
                    acc += ax[j * lx + i] * b[j];
                }
                row[l] = acc;
            }
        });
        Ok(out)
    }

    /// Values at the fitting nodes, in [`GridSpec::nodes`] order.
    pub fn node_values(&self) -> Vec<f64> {
        self.lattice(self.grid.nx, &self.grid.y_nodes()).expect("fitting nodes lie in the interval")
    }

    /// `∂_x^ox ∂_y^oy f`; requires `ox + oy <= ny / 2`.
    pub fn derivative(&self, ox: u32, oy: u32) -> Result<Self> {
        if (ox + oy) as usize > self.grid.ny / 2 {
            return Err(Error::InvalidArgument(format!(
                "derivative order {} exceeds ny/2 = {}",
                ox + oy,
                self.grid.ny / 2
            )));
        }
        let mut out = if ox > 0 {
            let i_pow = Complex64::new(0.0, 1.0).powu(ox);
            self.map_modes(|m, _| i_pow * (2.0 * PI * m as f64).powi(ox as i32))
        } else {
            self.clone()
        };
        if oy > 0 {
            let scale = (1.0 / self.grid.interval.half_width()).powi(oy as i32);
            let half = self.grid.half();
            for m in -half + 1..half {
                let mut row = out.row(m).to_vec();
                for _ in 0..oy {
                    row = cheb::differentiate(&row);
                }
                for (dst, src) in out.row_mut(m).iter_mut().zip(row) {
                    *dst = src * scale;
                }
            }
            out.symmetrize();
        }
        Ok(out)
    }

    /// x-average `[f](y)`: every `m != 0` mode zeroed.
    pub fn average_over_x(&self) -> Self {
        let mut out = Self::zeros(self.grid);
        out.row_mut(0).copy_from_slice(self.row(0));
        out
    }

    /// `f - [f]`.
    pub fn zero_mean_part(&self) -> Self {
        let mut out = self.clone();
        out.row_mut(0).iter_mut().for_each(|c| *c = ZERO);
        out
    }

    pub fn is_x_independent(&self) -> bool {
        let half = self.grid.half();
        (-half..half).filter(|&m| m != 0).all(|m| self.row(m).iter().all(|c| *c == ZERO))
    }

    /// `f∘U0`, i.e. `(x, y) ↦ f(x + y, y)`. Each Fourier row is multiplied
    /// by `e^{2 pi i m y}` at the Lobatto nodes and transformed back, so the
    /// result is exact in `x` and interpolated in `y`.
    pub fn shear(&self) -> Self {
        let grid = self.grid;
        let ny = grid.ny;
        let ys = grid.y_nodes();
        let table = cheb::LobattoTable::new(ny);
        let mut out = Self::zeros(grid);
        let mut vals = vec![ZERO; ny];
        for m in 0..grid.half() {
            table.inverse(self.row(m), &mut vals);
            for (v, &y) in vals.iter_mut().zip(&ys) {
                let t = (m as f64 * y).rem_euclid(1.0);
                *v *= Complex64::from_polar(1.0, 2.0 * PI * t);
            }
            let start = out.index(m, 0);
            table.forward(&vals, &mut out.coeffs[start..start + ny]);
            for j in 0..ny {
                let c = out.coeffs[start + j].conj();
                let mirror = out.index(-m, j);
                out.coeffs[mirror] = c;
            }
        }
        out.symmetrize();
        out
    }

    /// Resamples on the Lobatto nodes of `target` (which must lie inside the
    /// current interval) and refits.
    pub fn refit_on_interval(&self, target: Interval) -> Result<Self> {
        let own = self.grid.interval;
        if !own.contains(&target) {
            let y = if target.lo < own.lo { target.lo } else { target.hi };
            return Err(Error::Domain { y, lo: own.lo, hi: own.hi });
        }
        let grid = self.grid.with_interval(target);
        let ny = grid.ny;
        let ts: Vec<f64> = grid.y_nodes().into_iter().map(|y| own.to_unit(y).clamp(-1.0, 1.0)).collect();
        let table = cheb::LobattoTable::new(ny);
        let mut out = Self::zeros(grid);
        let half = grid.half();
        let mut vals = vec![ZERO; ny];
        for m in -half + 1..half {
            let row = self.row(m);
            for (v, &t) in vals.iter_mut().zip(&ts) {
                *v = cheb::clenshaw_c(row, t);
            }
            let start = out.index(m, 0);
            table.forward(&vals, &mut out.coeffs[start..start + ny]);
        }
        out.symmetrize();
        Ok(out)
    }

    /// Re-expresses `f` on another grid over a sub-interval, possibly with
    /// different resolution, by pointwise sampling.
    pub fn resample(&self, grid: GridSpec) -> Result<Self> {
        if grid.nx == self.grid.nx && grid.ny == self.grid.ny {
            return self.refit_on_interval(grid.interval);
        }
        Self::try_fit(grid, |x, y| self.evaluate(x, y))
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_grid(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(Self { grid: self.grid, coeffs })
    }

    pub fn scale(&self, c: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        Self { grid: self.grid, coeffs }
    }

    pub fn algebra(&self, other: &Self, op: AlgebraOp) -> Result<Self> {
        match op {
            AlgebraOp::Add => self.add(other),
            AlgebraOp::Sub => self.sub(other),
            AlgebraOp::Scale(c) => Ok(self.scale(c)),
        }
    }
}

/// Two-component function sharing one grid: a perturbation or a conjugacy
/// generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVector")]
pub struct VectorFunction {
    pub c1: CylinderFunction,
    pub c2: CylinderFunction,
}

#[derive(Deserialize)]
struct RawVector {
    c1: CylinderFunction,
    c2: CylinderFunction,
}

impl TryFrom<RawVector> for VectorFunction {
    type Error = Error;
    fn try_from(r: RawVector) -> Result<Self> {
        VectorFunction::new(r.c1, r.c2)
    }
}

impl VectorFunction {
    pub fn new(c1: CylinderFunction, c2: CylinderFunction) -> Result<Self> {
        c1.check_grid(&c2)?;
        Ok(Self { c1, c2 })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { c1: CylinderFunction::zeros(grid), c2: CylinderFunction::zeros(grid) }
    }

    pub fn fit<S>(grid: GridSpec, sampler: S) -> Result<Self>
    where
        S: Fn(f64, f64) -> (f64, f64) + Sync,
    {
        Self::try_fit(grid, |x, y| Ok(sampler(x, y)))
    }

    pub fn try_fit<S>(grid: GridSpec, sampler: S) -> Result<Self>
    where
        S: Fn(f64, f64) -> Result<(f64, f64)> + Sync,
    {
        let nodes = grid.nodes();
        let vals: Vec<Result<(f64, f64)>> = nodes.par_iter().map(|&(x, y)| sampler(x, y)).collect();
        let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
        for (n, v) in nodes.iter().zip(&vals) {
            for c in [v.0, v.1] {
                if !c.is_finite() {
                    return Err(Error::Sampling { x: n.0, y: n.1, value: c });
                }
            }
        }
        let v1: Vec<f64> = vals.iter().map(|v| v.0).collect();
        let v2: Vec<f64> = vals.iter().map(|v| v.1).collect();
        Ok(Self {
            c1: CylinderFunction::from_node_values(grid, &v1),
            c2: CylinderFunction::from_node_values(grid, &v2),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.c1.grid()
    }

    pub fn interval(&self) -> Interval {
        self.c1.interval()
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let t = self.c1.grid.interval.unit_checked(y)?;
        let ph = CylinderFunction::phases(self.c1.grid.nx, x);
        Ok((self.c1.eval_at(&ph, t), self.c2.eval_at(&ph, t)))
    }

    pub fn map(&self, f: impl Fn(&CylinderFunction) -> CylinderFunction) -> Self {
        Self { c1: f(&self.c1), c2: f(&self.c2) }
    }

    pub fn try_map(&self, f: impl Fn(&CylinderFunction) -> Result<CylinderFunction>) -> Result<Self> {
        Ok(Self { c1: f(&self.c1)?, c2: f(&self.c2)? })
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(Self { c1: self.c1.add(&o.c1)?, c2: self.c2.add(&o.c2)? })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(Self { c1: self.c1.sub(&o.c1)?, c2: self.c2.sub(&o.c2)? })
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|f| f.scale(c))
    }

    pub fn average_over_x(&self) -> Self {
        self.map(CylinderFunction::average_over_x)
    }

    pub fn refit_on_interval(&self, target: Interval) -> Result<Self> {
        self.try_map(|f| f.refit_on_interval(target))
    }

    pub fn resample(&self, grid: GridSpec) -> Result<Self> {
        self.try_map(|f| f.resample(grid))
    }

    pub fn is_zero(&self) -> bool {
        self.c1.is_zero() && self.c2.is_zero()
    }

    /// `max(‖c1‖_r, ‖c2‖_r)`.
    pub fn holder_norm(&self, r: f64) -> Result<f64> {
        self.holder_norm_with(r, &NormSettings::default())
    }

    pub fn holder_norm_with(&self, r: f64, settings: &NormSettings) -> Result<f64> {
        Ok(holder_norm_with(&self.c1, r, settings)?.max(holder_norm_with(&self.c2, r, settings)?))
    }

    pub fn sup_norm(&self) -> f64 {
        sup_norm(&self.c1).max(sup_norm(&self.c2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(nx: usize, ny: usize, lo: f64, hi: f64) -> GridSpec {
        GridSpec::new(nx, ny, Interval::new(lo, hi).unwrap()).unwrap()
    }

    #[test]
    fn zero_sampler_gives_zero_coefficients() {
        let f = CylinderFunction::fit(grid(16, 8, -1.0, 1.0), |_, _| 0.0).unwrap();
        assert!(f.is_zero());
    }

    #[test]
    fn single_sine_mode() {
        let f = CylinderFunction::fit(grid(16, 8, -1.0, 1.0), |x, _| (2.0 * PI * x).sin()).unwrap();
        for m in -8..8 {
            for j in 0..8 {
                let c = f.coeff(m, j);
                if (m == 1 || m == -1) && j == 0 {
                    assert!((c.norm() - 0.5).abs() < 1e-14);
                } else {
                    assert!(c.norm() < 1e-14, "m={m} j={j} {c}");
                }
            }
        }
    }

    #[test]
    fn y_squared_is_half_t0_plus_half_t2() {
        let f = CylinderFunction::fit(grid(16, 8, -1.0, 1.0), |_, y| y * y).unwrap();
        let want = [0.5, 0.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0];
        for (j, w) in want.iter().enumerate() {
            assert!((f.coeff(0, j).re - w).abs() < 1e-14);
        }
        // independent pointwise check
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (x, y) = (rng.gen::<f64>(), rng.gen_range(-1.0..=1.0));
            assert!((f.evaluate(x, y).unwrap() - y * y).abs() <= 1e-12);
        }
    }

    #[test]
    fn evaluate_examples() {
        let g = grid(16, 8, -1.0, 1.0);
        let s = CylinderFunction::fit(g, |x, _| (2.0 * PI * x).sin()).unwrap();
        assert!((s.evaluate(0.25, 0.3).unwrap() - 1.0).abs() < 1e-12);
        for &(x, y) in &[(0.125, 0.2), (0.765625, -0.9), (-3.375, 0.5)] {
            assert_eq!(s.evaluate(x + 1.0, y).unwrap(), s.evaluate(x, y).unwrap());
        }
        // x + 1 rounds for these
        for &(x, y) in &[(0.1, 0.2), (0.77, -0.9), (-3.4, 0.5)] {
            assert!((s.evaluate(x + 1.0, y).unwrap() - s.evaluate(x, y).unwrap()).abs() <= 1e-14);
        }
        let p = CylinderFunction::fit(g, |x, y| (2.0 * PI * x).cos() * y).unwrap();
        assert!((p.evaluate(1.0 / 3.0, 0.5).unwrap() + 0.25).abs() < 1e-12);
    }

    #[test]
    fn evaluate_rejects_points_outside() {
        let f = CylinderFunction::fit(grid(16, 8, 0.0, 1.0), |_, y| y).unwrap();
        assert!(f.evaluate(0.0, 1.0 + 5e-13).is_ok());
        match f.evaluate(0.0, 1.1) {
            Err(Error::Domain { y, lo, hi }) => assert_eq!((y, lo, hi), (1.1, 0.0, 1.0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn derivative_examples() {
        let g = grid(16, 8, -1.0, 1.0);
        let s = CylinderFunction::fit(g, |x, _| (2.0 * PI * x).sin()).unwrap();
        let ds = s.derivative(1, 0).unwrap();
        for i in 0..64 {
            let x = i as f64 / 64.0;
            assert!((ds.evaluate(x, 0.1).unwrap() - 2.0 * PI * (2.0 * PI * x).cos()).abs() < 1e-10);
        }
        let c = CylinderFunction::constant(g, 3.0);
        assert!(c.derivative(1, 0).unwrap().is_zero());

        let g2 = grid(16, 8, 0.0, 2.0);
        let cube = CylinderFunction::fit(g2, |_, y| y * y * y).unwrap();
        let d2 = cube.derivative(0, 2).unwrap();
        for (x, y) in g2.nodes() {
            assert!((d2.evaluate(x, y).unwrap() - 6.0 * y).abs() < 1e-10);
        }
        assert!(cube.derivative(3, 2).is_err());
    }

    #[test]
    fn average_examples() {
        let g = grid(16, 8, -1.0, 1.0);
        let s = CylinderFunction::fit(g, |x, _| (2.0 * PI * x).sin()).unwrap();
        assert!(s.average_over_x().max_abs_coeff() < 1e-15);
        let q = CylinderFunction::fit(g, |_, y| y * y).unwrap();
        assert_eq!(q.average_over_x(), q);
        let c2 = CylinderFunction::fit(g, |x, _| (2.0 * PI * x).cos().powi(2)).unwrap();
        let a = c2.average_over_x();
        assert!((a.coeff(0, 0).re - 0.5).abs() < 1e-14);
        assert!(a.coeffs().iter().enumerate().all(|(i, c)| i == a.index(0, 0) || c.norm() < 1e-15));
    }

    #[test]
    fn refit_examples() {
        let g = grid(16, 12, 0.0, 2.0);
        let f = CylinderFunction::fit(g, |x, y| (2.0 * PI * x).sin() * y + y * y).unwrap();
        let same = f.refit_on_interval(g.interval()).unwrap();
        for (a, b) in f.coeffs().iter().zip(same.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
        let lin = CylinderFunction::fit(g, |_, y| y).unwrap();
        let sub = lin.refit_on_interval(Interval::new(0.5, 1.5).unwrap()).unwrap();
        for (x, y) in sub.grid().nodes() {
            assert!((sub.evaluate(x, y).unwrap() - y).abs() < 1e-12);
        }
        assert!(matches!(lin.refit_on_interval(Interval::new(-0.1, 1.0).unwrap()), Err(Error::Domain { .. })));
    }

    #[test]
    fn refit_random_polynomial_on_shrunk_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = grid(32, 16, -0.5, 1.5);
        let a: Vec<[f64; 4]> = (0..4).map(|_| [0.0; 4].map(|_| rng.gen_range(-1.0..1.0))).collect();
        let exact = |x: f64, y: f64| -> f64 {
            let mut s = 0.0;
            for (m, row) in a.iter().enumerate() {
                let poly = row[0] + row[1] * y + row[2] * y * y + row[3] * y * y * y;
                s += poly * (2.0 * PI * m as f64 * x + 0.3 * m as f64).cos();
            }
            s
        };
        let f = CylinderFunction::fit(g, exact).unwrap();
        let delta = 0.25;
        let target = g.interval().shrink(delta / 4.0).unwrap();
        let r = f.refit_on_interval(target).unwrap();
        for _ in 0..100 {
            let (x, y) = (rng.gen::<f64>(), rng.gen_range(target.lo()..=target.hi()));
            assert!((r.evaluate(x, y).unwrap() - f.evaluate(x, y).unwrap()).abs() <= 1e-10);
        }
    }

    #[test]
    fn algebra_examples() {
        let g = grid(16, 8, -1.0, 1.0);
        let s = CylinderFunction::fit(g, |x, y| (2.0 * PI * x).sin() + y).unwrap();
        let z = CylinderFunction::zeros(g);
        assert_eq!(s.add(&z).unwrap(), s);
        assert!(s.sub(&s).unwrap().is_zero());
        let sin = CylinderFunction::fit(g, |x, _| (2.0 * PI * x).sin()).unwrap();
        let three = sin.algebra(&sin, AlgebraOp::Scale(3.0)).unwrap();
        assert!((three.evaluate(0.25, 0.0).unwrap() - 3.0).abs() < 1e-12);
        let other = CylinderFunction::zeros(grid(32, 8, -1.0, 1.0));
        assert!(matches!(s.add(&other), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn non_finite_samples_are_reported() {
        let err = CylinderFunction::fit(grid(8, 4, 0.0, 1.0), |x, _| if x > 0.5 { f64::NAN } else { 0.0 });
        match err {
            Err(Error::Sampling { x, .. }) => assert!(x > 0.5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lattice_matches_pointwise_evaluation() {
        let g = grid(16, 8, 0.0, 1.0);
        let f = CylinderFunction::fit(g, |x, y| (2.0 * PI * 3.0 * x).cos() * y * y + (2.0 * PI * x).sin()).unwrap();
        let ys = [0.0, 0.3, 0.77, 1.0];
        let vals = f.lattice(64, &ys).unwrap();
        for i in 0..64 {
            for (l, &y) in ys.iter().enumerate() {
                let want = f.evaluate(i as f64 / 64.0, y).unwrap();
                assert!((vals[i * ys.len() + l] - want).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn interval_widen_shrink() {
        let i = Interval::new(0.25, 0.75).unwrap();
        let w = i.widen(0.25).unwrap();
        assert_eq!((w.lo(), w.hi()), (0.0, 1.0));
        assert_eq!(w.shrink(0.25).unwrap(), i);
        assert!(i.shrink(0.3).is_err());
        assert!(Interval::new(1.0, 1.0).is_err());
    }

    #[test]
    fn grid_guards() {
        let i = Interval::new(0.0, 1.0).unwrap();
        assert!(GridSpec::new(4, 8, i).is_err());
        assert!(GridSpec::new(12, 8, i).is_err());
        assert!(GridSpec::new(8, 3, i).is_err());
        assert!(GridSpec::new(8, 4, i).is_ok());
    }
}
