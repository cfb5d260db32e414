//! The inductive conjugation step and the full iteration.
//!
//! State `i` holds `f^(i)`, `k^(i)` on `T x I_{delta_i}` where `I_d` is the
//! interval `I` widened by `d`. Each step picks `N_i` from the previous
//! `C^0` error, builds `h` from the smoothed `k`, conjugates both maps by
//! `H = id + h` and shrinks the domain by `2 ‖h‖_1 + ‖f, k‖_0`.

mod report;

use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::{apply_delta_alpha, solve_vector};
use crate::diagnostics::{commutator_residual, intersection_check, semiconjugacy_residual, SemiConjugacy};
use crate::diophantine::DiophantineParams;
use crate::error::{Error, Result};
use crate::funcspace::{GridSpec, Interval, NormSettings, VectorFunction, DOMAIN_TOL};
use crate::maps::{conjugate, Base, Conjugacy, CylinderMap};
use crate::smoothing::{smooth_vector, CutoffProfile};

pub use report::{Preflight, RunReport, StepRow};

/// Run parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KamConfig {
    pub dio: DiophantineParams,
    /// The interval `I`; the maps must be defined on `I_{delta0}`.
    pub interval: Interval,
    pub delta0: f64,
    /// Resolution; its interval is replaced by the current `I_{delta_i}`.
    pub grid: GridSpec,
    /// Stop once `E_{i,0} < tol_e0`.
    pub tol_e0: f64,
    pub max_iter: usize,
    /// Declared Lipschitz bound of the initial semi-conjugacy.
    pub lipschitz0: f64,
    pub profile: CutoffProfile,
    pub norms: NormSettings,
    /// Pre-flight threshold for the commutator and semi-conjugacy residuals.
    pub hypothesis_tol: f64,
    /// Horizontal circles scanned by the intersection check.
    pub intersection_samples: usize,
}

impl KamConfig {
    /// Defaults: `tol_e0 = 1e-9`, 12 iterations, `lipschitz0 = 2`.
    pub fn new(dio: DiophantineParams, interval: Interval, delta0: f64, nx: usize, ny: usize) -> Result<Self> {
        let cfg = Self {
            dio,
            interval,
            delta0,
            grid: GridSpec::new(nx, ny, interval)?,
            tol_e0: 1e-9,
            max_iter: 12,
            lipschitz0: 2.0,
            profile: CutoffProfile::default(),
            norms: NormSettings::default(),
            hypothesis_tol: 1e-8,
            intersection_samples: 33,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.delta0 > 0.0 && self.delta0 <= 0.5) {
            bad.push(format!("delta0 must lie in (0, 1/2], got {}", self.delta0));
        }
        if !(self.tol_e0 > 0.0) {
            bad.push(format!("tol_e0 must be positive, got {}", self.tol_e0));
        }
        if !(self.lipschitz0 > 1.0) {
            bad.push(format!("lipschitz0 must exceed 1, got {}", self.lipschitz0));
        }
        if !(self.hypothesis_tol > 0.0) {
            bad.push(format!("hypothesis_tol must be positive, got {}", self.hypothesis_tol));
        }
        if self.intersection_samples < 2 {
            bad.push("intersection_samples must be at least 2".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad))
        }
    }

    /// `I_d`.
    pub fn domain(&self, d: f64) -> Result<Interval> {
        self.interval.widen(d)
    }

    /// Norm index actually used for `E_{i,mu}`: `mu` capped by the grid.
    pub fn mu_effective(&self) -> u32 {
        self.dio.mu.min((self.grid.ny() / 4) as u32)
    }
}

/// One history entry; step 0 has no `N`, `U` or timing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub i: usize,
    pub n: Option<f64>,
    pub delta: f64,
    pub e0: f64,
    pub emu: f64,
    pub u1: Option<f64>,
    pub lipschitz: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KamState {
    pub i: usize,
    pub delta: f64,
    pub f: VectorFunction,
    pub k: VectorFunction,
    pub h_stack: Vec<Conjugacy>,
    pub lipschitz: f64,
    pub history: Vec<StepRecord>,
}

impl KamState {
    /// State 0 with `f`, `k` refit on `I_{delta0}`.
    pub fn initial(f: &VectorFunction, k: &VectorFunction, config: &KamConfig) -> Result<Self> {
        let dom = config.domain(config.delta0)?;
        let g = config.grid.with_interval(dom);
        let onto = |p: &VectorFunction| -> Result<VectorFunction> {
            if p.grid() == &g {
                return Ok(p.clone());
            }
            if !p.interval().contains(&dom) {
                return Err(Error::Contract(format!(
                    "perturbation on {} does not cover I_delta0 = {dom}",
                    p.interval()
                )));
            }
            VectorFunction::try_fit(g, |x, y| p.evaluate(x, y))
        };
        let (f, k) = (onto(f)?, onto(k)?);
        let (e0, emu) = error_norms(&f, &k, config)?;
        Ok(Self {
            i: 0,
            delta: config.delta0,
            f,
            k,
            h_stack: Vec::new(),
            lipschitz: config.lipschitz0,
            history: vec![StepRecord {
                i: 0,
                n: None,
                delta: config.delta0,
                e0,
                emu,
                u1: None,
                lipschitz: config.lipschitz0,
                wall_ms: 0.0,
            }],
        })
    }

    /// `E_{i,0}` of the current state.
    pub fn e0(&self) -> f64 {
        self.history.last().map_or(f64::NAN, |r| r.e0)
    }

    pub fn domain(&self, config: &KamConfig) -> Result<Interval> {
        config.domain(self.delta)
    }
}

/// `(‖f, k‖_0, ‖f, k‖_mu)` with `mu` from [`KamConfig::mu_effective`].
fn error_norms(f: &VectorFunction, k: &VectorFunction, config: &KamConfig) -> Result<(f64, f64)> {
    let e0 = f.sup_norm().max(k.sup_norm());
    let mu = config.mu_effective() as f64;
    let emu = f.holder_norm_with(mu, &config.norms)?.max(k.holder_norm_with(mu, &config.norms)?);
    Ok((e0, emu))
}

/// `N = E^{-1 / (4 (rho + 1))}`.
pub fn schedule_n(e_prev0: f64, rho: u32) -> Result<f64> {
    if !(e_prev0 > 0.0 && e_prev0 < 1.0) {
        return Err(Error::Contract(format!("perturbation too large for a step: E = {e_prev0:e} must lie in (0, 1)")));
    }
    Ok(e_prev0.powf(-1.0 / (4.0 * (rho as f64 + 1.0))))
}

/// `h = (xi_1, -[S_N f_1] + xi_2)` where `xi` is the zero-mean solution of
/// `Δ_α xi = S_N k - [S_N k]`. Fails if `Δ_α h` misses that right-hand side
/// by more than `1e-10`.
pub fn build_h(
    f: &VectorFunction,
    k: &VectorFunction,
    dio: &DiophantineParams,
    n: f64,
    profile: &CutoffProfile,
) -> Result<VectorFunction> {
    let sk = smooth_vector(k, n, profile)?;
    let rhs = sk.sub(&sk.average_over_x())?;
    let xi = solve_vector(&rhs, dio)?;
    let sf1_avg = crate::smoothing::smooth(&f.c1, n, profile)?.average_over_x();
    let h = VectorFunction::new(xi.c1, xi.c2.sub(&sf1_avg)?)?;
    let residual = apply_delta_alpha(&h, dio.alpha).sub(&rhs)?.sup_norm();
    if residual > 1e-10 {
        return Err(Error::Numerical(format!("‖Δ_α h - (S_N k - [S_N k])‖_0 = {residual:e}")));
    }
    Ok(h)
}

/// Why a step could not be taken.
#[derive(Debug)]
pub enum StepError {
    /// `delta - 2 theta - theta' <= 0`.
    DomainExhausted {
        delta_tilde: f64,
    },
    Failed(Error),
}

impl From<Error> for StepError {
    fn from(e: Error) -> Self {
        StepError::Failed(e)
    }
}

/// One conjugation step.
pub fn kam_step(state: &KamState, config: &KamConfig) -> std::result::Result<KamState, StepError> {
    let start = Instant::now();
    let e_prev = state.e0();
    let n = schedule_n(e_prev, config.dio.rho)?;
    let h = build_h(&state.f, &state.k, &config.dio, n, &config.profile)?;
    let h = Conjugacy::new(h)?;
    let theta = h.c1_norm;
    let delta_tilde = state.delta - 2.0 * theta - e_prev;
    if !(delta_tilde > 0.0) {
        return Err(StepError::DomainExhausted { delta_tilde });
    }
    let target = config.domain(delta_tilde)?;
    let grid = config.grid;
    let alpha = config.dio.alpha;
    let big_f = CylinderMap::twist().with_pert(state.f.clone());
    let big_k = CylinderMap::translation(alpha).with_pert(state.k.clone());
    let f_new = conjugate(&big_f, &h, grid, target)?.pert.expect("conjugate returns a perturbation");
    let k_new = conjugate(&big_k, &h, grid, target)?.pert.expect("conjugate returns a perturbation");
    let (e0, emu) = error_norms(&f_new, &k_new, config)?;
    let lipschitz = state.lipschitz * (1.0 + 2.0 * theta);
    let mut history = state.history.clone();
    let i = state.i + 1;
    history.push(StepRecord {
        i,
        n: Some(n),
        delta: delta_tilde,
        e0,
        emu,
        u1: Some(theta),
        lipschitz,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    });
    if e0 > e_prev.powf(1.25) {
        warn!("step {i}: E_i0 = {e0:e} exceeds E_(i-1),0^(5/4) = {:e}", e_prev.powf(1.25));
    }
    info!("step {i}: N = {n:.4}, E_i0 = {e0:e}, U_i1 = {theta:e}, delta = {delta_tilde:.6}");
    let mut h_stack = state.h_stack.clone();
    h_stack.push(h);
    Ok(KamState { i, delta: delta_tilde, f: f_new, k: k_new, h_stack, lipschitz, history })
}

/// `H^(1)∘…∘H^(l)` on `T x target`, evaluated pointwise and refit.
pub fn compose_conjugacy(h_stack: &[Conjugacy], grid: GridSpec, target: Interval) -> Result<Conjugacy> {
    let g = grid.with_interval(target);
    if h_stack.is_empty() {
        return Ok(Conjugacy::identity(g));
    }
    let gen = VectorFunction::try_fit(g, |x, y| {
        let (mut zx, mut zy) = (x, y);
        for (idx, h) in h_stack.iter().enumerate().rev() {
            let d = h.domain();
            if zy < d.lo() - DOMAIN_TOL || zy > d.hi() + DOMAIN_TOL {
                return Err(Error::Contract(format!(
                    "conjugacy chain breaks at H^({}): y = {zy} outside {d} (from ({x}, {y}))",
                    idx + 1
                )));
            }
            (zx, zy) = h.apply(zx, zy)?;
        }
        Ok((zx - x, zy - y))
    })?;
    Conjugacy::new(gen)
}

/// `(‖H^{-1}∘F∘H - U0‖_0, ‖H^{-1}∘K∘H - T_α‖_0)` over off-node points of
/// `target`, with `H^{-1}` evaluated by fixed-point iteration.
pub fn conjugation_residuals(f: &CylinderMap, k: &CylinderMap, h: &Conjugacy, target: Interval) -> Result<(f64, f64)> {
    let pts = crate::maps::off_node_points(h.gen.grid(), target);
    let one = |map: &CylinderMap| -> Result<f64> {
        let errs: Vec<Result<f64>> = pts
            .par_iter()
            .map(|&(x, y)| {
                let (a, b) = h.apply(x, y)?;
                let (c, d) = map.apply(a, b)?;
                let (p, q) = h.inverse_point(c, d)?;
                let (bx, by) = map.base.apply(x, y);
                Ok((p - bx).abs().max((q - by).abs()))
            })
            .collect();
        errs.into_iter().try_fold(0.0_f64, |m, e| Ok(m.max(e?)))
    };
    Ok((one(f)?, one(k)?))
}

/// Which hypothesis the pre-flight rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Hypothesis {
    Diophantine,
    Commutator,
    Intersection,
    SemiConjugacy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", content = "detail")]
pub enum KamStatus {
    Converged,
    HypothesisViolated(Hypothesis),
    DomainExhausted,
    MaxIterations,
    StepFailure(String),
}

impl KamStatus {
    pub fn name(&self) -> &'static str {
        match self {
            KamStatus::Converged => "Converged",
            KamStatus::HypothesisViolated(_) => "HypothesisViolated",
            KamStatus::DomainExhausted => "DomainExhausted",
            KamStatus::MaxIterations => "MaxIterations",
            KamStatus::StepFailure(_) => "StepFailure",
        }
    }
}

#[derive(Clone, Debug)]
pub struct KamResult {
    pub status: KamStatus,
    pub h_total: Option<Conjugacy>,
    pub final_state: KamState,
    pub report: RunReport,
}

/// Checks the hypotheses in the order Diophantine, commutator,
/// intersection, semi-conjugacy. Pure: inputs are only read.
pub fn preflight(f: &CylinderMap, k: &CylinderMap, w0: &SemiConjugacy, config: &KamConfig) -> Result<Preflight> {
    let mut pre = Preflight::default();
    let dom = config.domain(config.delta0)?;
    let grid = config.grid.with_interval(dom);
    let needed = (config.grid.nx() / 2) as u64;
    pre.diophantine_checked_to = needed.max(config.dio.check_bound);
    if let Err(e) = config.dio.verified(needed) {
        pre.failed = Some(Hypothesis::Diophantine);
        pre.detail = Some(e.to_string());
        return Ok(pre);
    }
    let c = commutator_residual(f, k, grid)?;
    pre.commutator = Some(c.direct);
    if !(c.direct <= config.hypothesis_tol) {
        pre.failed = Some(Hypothesis::Commutator);
        pre.detail = Some(format!("‖F∘K - K∘F‖_0 = {:e} > {:e}", c.direct, config.hypothesis_tol));
        return Ok(pre);
    }
    let ic = intersection_check(f, grid, config.intersection_samples)?;
    pre.intersection_margin = Some(ic.margin);
    if !ic.pass {
        pre.failed = Some(Hypothesis::Intersection);
        pre.detail = Some(format!("f2 keeps one sign on the circle y = {} (margin {:e})", ic.worst_y, ic.margin));
        return Ok(pre);
    }
    let s = semiconjugacy_residual(w0, k, config.dio.alpha, grid)?;
    pre.semiconjugacy = Some(s.residual);
    pre.slope = Some(s.slope);
    if !(s.residual <= config.hypothesis_tol) || s.slope > config.lipschitz0 {
        pre.failed = Some(Hypothesis::SemiConjugacy);
        pre.detail = Some(format!(
            "residual {:e} (limit {:e}), slope {:e} against bound {}",
            s.residual, config.hypothesis_tol, s.slope, config.lipschitz0
        ));
    }
    Ok(pre)
}

/// Runs the iteration for `F = U0 + f`, `K = T_α + k` with α taken from
/// `config.dio`.
pub fn run(f: &CylinderMap, k: &CylinderMap, w0: &SemiConjugacy, config: &KamConfig) -> Result<KamResult> {
    config.validate()?;
    if f.base != Base::Twist {
        return Err(Error::InvalidArgument(format!(
            "F must be over the twist U0, got {} (reduce frequency twists first)",
            f.base.name()
        )));
    }
    match k.base {
        Base::Translation(a) if (a - config.dio.alpha).abs() <= 1e-15 => {}
        _ => {
            return Err(Error::InvalidArgument(format!(
                "K must be over T_alpha with alpha = {}, got {}",
                config.dio.alpha,
                k.base.name()
            )))
        }
    }
    let start = Instant::now();
    let dom = config.domain(config.delta0)?;
    let g0 = config.grid.with_interval(dom);
    let fp = f.pert_or_zero(g0);
    let kp = k.pert_or_zero(g0);
    let pre = preflight(f, k, w0, config)?;
    let mut state = KamState::initial(&fp, &kp, config)?;
    if let Some(which) = pre.failed {
        let status = KamStatus::HypothesisViolated(which);
        let report = RunReport::new(config, &state, &status, pre, None, start);
        return Ok(KamResult { status, h_total: None, final_state: state, report });
    }
    let status = loop {
        if state.e0() < config.tol_e0 {
            break KamStatus::Converged;
        }
        if state.i >= config.max_iter {
            break KamStatus::MaxIterations;
        }
        match kam_step(&state, config) {
            Ok(next) => state = next,
            Err(StepError::DomainExhausted { delta_tilde }) => {
                warn!("domain exhausted: delta_tilde = {delta_tilde:e}");
                break KamStatus::DomainExhausted;
            }
            Err(StepError::Failed(e)) => break KamStatus::StepFailure(e.to_string()),
        }
    };
    if status != KamStatus::Converged {
        let report = RunReport::new(config, &state, &status, pre, None, start);
        return Ok(KamResult { status, h_total: None, final_state: state, report });
    }
    let half = (config.delta0 / 2.0).min(state.delta);
    let target = config.domain(half)?;
    let verified = compose_conjugacy(&state.h_stack, config.grid, target)
        .and_then(|h| conjugation_residuals(f, k, &h, target).map(|r| (h, r)));
    let (status, h_total, residuals) = match verified {
        Ok((h, (rf, rk))) => {
            let limit = 10.0 * config.tol_e0;
            if rf <= limit && rk <= limit {
                (KamStatus::Converged, Some(h), Some((rf, rk)))
            } else {
                let detail = format!("final residuals ({rf:e}, {rk:e}) exceed 10 tol = {limit:e}");
                (KamStatus::StepFailure(detail), Some(h), Some((rf, rk)))
            }
        }
        Err(e) => (KamStatus::StepFailure(format!("composing H_total: {e}")), None, None),
    };
    let report = RunReport::new(config, &state, &status, pre, residuals, start);
    Ok(KamResult { status, h_total, final_state: state, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::CylinderFunction;
    use crate::maps::{manufacture_commuting_pair, standard_family};
    use crate::GOLDEN;
    use std::f64::consts::PI;

    fn golden() -> DiophantineParams {
        DiophantineParams::new(GOLDEN, 1.0, 1.0, 10_000).unwrap()
    }

    fn config(nx: usize, ny: usize) -> KamConfig {
        KamConfig::new(golden(), Interval::new(0.25, 0.75).unwrap(), 0.25, nx, ny).unwrap()
    }

    fn h_gen(g: GridSpec, amp: f64) -> VectorFunction {
        VectorFunction::fit(g, |x, y| {
            let (s, c) = (2.0 * PI * x).sin_cos();
            (amp * (s + 0.5 * y * c), amp * (c - 0.25 * y * s))
        })
        .unwrap()
    }

    #[test]
    fn schedule_examples() {
        assert!((schedule_n(1e-8, 3).unwrap() - 10f64.powf(0.5)).abs() < 1e-12);
        assert!((schedule_n(1e-4, 3).unwrap() - 10f64.powf(0.25)).abs() < 1e-12);
        assert!(schedule_n(1.0, 3).is_err());
        assert!(schedule_n(0.0, 3).is_err());
    }

    #[test]
    fn build_h_examples() {
        let g = GridSpec::new(32, 16, Interval::new(0.0, 1.0).unwrap()).unwrap();
        let p = CutoffProfile::default();
        let z = VectorFunction::zeros(g);
        assert!(build_h(&z, &z, &golden(), 3.0, &p).unwrap().is_zero());

        let gy =
            VectorFunction::new(CylinderFunction::fit(g, |_, y| 1e-3 * y * y).unwrap(), CylinderFunction::zeros(g))
                .unwrap();
        let h = build_h(&gy, &z, &golden(), 3.0, &p).unwrap();
        let want = crate::smoothing::smooth(&gy.c1, 3.0, &p).unwrap();
        for &(x, y) in &[(0.1, 0.2), (0.6, 0.9)] {
            assert_eq!(h.c1.evaluate(x, y).unwrap(), 0.0);
            assert!((h.c2.evaluate(x, y).unwrap() + want.evaluate(x, y).unwrap()).abs() < 1e-15);
        }

        let k = h_gen(g, 1e-3);
        let h = build_h(&z, &k, &golden(), 3.0, &p).unwrap();
        let sk = smooth_vector(&k, 3.0, &p).unwrap();
        let rhs = sk.sub(&sk.average_over_x()).unwrap();
        assert!(apply_delta_alpha(&h, GOLDEN).sub(&rhs).unwrap().sup_norm() <= 1e-10);
    }

    #[test]
    fn compose_conjugacy_examples() {
        let g = GridSpec::new(16, 8, Interval::new(0.0, 1.0).unwrap()).unwrap();
        let target = Interval::new(0.2, 0.8).unwrap();
        let id = compose_conjugacy(&[], g, target).unwrap();
        assert!(id.gen.is_zero());

        let h = Conjugacy::new(VectorFunction::fit(g, |x, y| (1e-3 * (2.0 * PI * x).sin() * y, 1e-3 * y)).unwrap())
            .unwrap();
        let one = compose_conjugacy(&[h.clone()], g, target).unwrap();
        for &(x, y) in &[(0.1, 0.3), (0.7, 0.75)] {
            let (a, b) = one.gen.evaluate(x, y).unwrap();
            let (p, q) = h.gen.evaluate(x, y).unwrap();
            assert!((a - p).abs() <= 1e-12 && (b - q).abs() <= 1e-12);
        }

        let t = |c: f64| Conjugacy::new(VectorFunction::fit(g, move |_, _| (c, 0.0)).unwrap()).unwrap();
        let two = compose_conjugacy(&[t(0.01), t(0.02)], g, target).unwrap();
        let (a, b) = two.gen.evaluate(0.4, 0.5).unwrap();
        assert!((a - 0.03).abs() < 1e-15 && b.abs() < 1e-15);

        let up = Conjugacy::new(VectorFunction::fit(g, |_, _| (0.0, 0.5)).unwrap()).unwrap();
        let err = compose_conjugacy(&[h, up], g, target).unwrap_err().to_string();
        assert!(err.contains("H^(1)"), "{err}");
    }

    #[test]
    fn unperturbed_pair_converges_immediately() {
        let cfg = config(16, 8);
        let r =
            run(&CylinderMap::twist(), &CylinderMap::translation(GOLDEN), &SemiConjugacy::projection(cfg.grid), &cfg)
                .unwrap();
        assert_eq!(r.status, KamStatus::Converged);
        assert_eq!(r.final_state.i, 0);
        assert!(r.h_total.unwrap().gen.is_zero());
    }

    #[test]
    fn zero_perturbation_step_keeps_state() {
        let cfg = config(16, 8);
        let g = cfg.grid.with_interval(cfg.domain(cfg.delta0).unwrap());
        let mut s = KamState::initial(&VectorFunction::zeros(g), &VectorFunction::zeros(g), &cfg).unwrap();
        s.history[0].e0 = 1e-12;
        let next = kam_step(&s, &cfg).unwrap();
        assert_eq!(next.i, 1);
        assert!(next.h_stack[0].gen.is_zero());
        assert_eq!(next.delta, cfg.delta0 - 1e-12);
        assert!(next.f.is_zero() && next.k.is_zero());
    }

    #[test]
    fn rational_rotation_is_rejected() {
        let dio = DiophantineParams::new(1.0 / 3.0, 1.0, 1.0, 1).unwrap();
        let cfg = KamConfig::new(dio, Interval::new(0.25, 0.75).unwrap(), 0.25, 16, 8).unwrap();
        let g = cfg.grid.with_interval(cfg.domain(0.25).unwrap());
        let f = standard_family(0.01, 3, 2, g).unwrap();
        let k = CylinderMap::translation(1.0 / 3.0);
        let r = run(&f, &k, &SemiConjugacy::projection(g), &cfg).unwrap();
        assert_eq!(r.status, KamStatus::HypothesisViolated(Hypothesis::Diophantine));
        assert_eq!(r.final_state.i, 0);
    }

    #[test]
    fn constant_lift_is_rejected() {
        let cfg = config(16, 8);
        let g = cfg.grid.with_interval(cfg.domain(0.25).unwrap());
        let f = CylinderMap::twist().with_pert(VectorFunction::fit(g, |_, _| (0.0, 1e-3)).unwrap());
        let r = run(&f, &CylinderMap::translation(GOLDEN), &SemiConjugacy::projection(g), &cfg).unwrap();
        assert_eq!(r.status, KamStatus::HypothesisViolated(Hypothesis::Intersection));
        assert_eq!(r.report.rows.len(), 1);
    }

    #[test]
    fn manufactured_pair_step_ledgers() {
        let cfg = config(32, 16);
        let wide = GridSpec::new(32, 16, Interval::new(-0.1, 1.1).unwrap()).unwrap();
        let pair = manufacture_commuting_pair(&h_gen(wide, 1e-3), GOLDEN, wide, cfg.domain(0.25).unwrap()).unwrap();
        let s0 = KamState::initial(pair.f.pert.as_ref().unwrap(), pair.k.pert.as_ref().unwrap(), &cfg).unwrap();
        let s1 = kam_step(&s0, &cfg).unwrap();
        let (r0, r1) = (s0.history[0], s1.history[1]);
        let u = r1.u1.unwrap();
        assert_eq!(r1.delta, r0.delta - 2.0 * u - r0.e0);
        assert!(r1.lipschitz / r0.lipschitz <= 1.0 + 2.0 * u + 1e-12);
        assert!(r1.e0 <= 10.0 * r0.e0.powf(1.25), "{} vs {}", r1.e0, r0.e0);
    }
}
