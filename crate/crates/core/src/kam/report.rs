//! Run tables for [`super::run`].

use std::time::Instant;

use serde::Serialize;

use super::{Hypothesis, KamConfig, KamState, KamStatus};

/// Hypothesis measurements, filled up to the first failure.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Preflight {
    pub diophantine_checked_to: u64,
    pub commutator: Option<f64>,
    pub intersection_margin: Option<f64>,
    pub semiconjugacy: Option<f64>,
    pub slope: Option<f64>,
    pub failed: Option<Hypothesis>,
    pub detail: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct StepRow {
    pub i: usize,
    pub N_i: Option<f64>,
    pub delta_i: f64,
    pub E_i0: f64,
    pub E_imu: f64,
    pub U_i1: Option<f64>,
    pub lipschitz_i: f64,
    pub wall_ms: f64,
    /// `log E_i0 / log E_(i-1),0`.
    pub decay_exponent: Option<f64>,
    /// `U_i1 / (N_i^(1 + rho) E_(i-1),0)`.
    pub h_bound_ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub status: KamStatus,
    pub rho: u32,
    pub mu: u32,
    /// Index used for `E_imu`, `mu` capped at `ny / 4`.
    pub mu_effective: u32,
    pub preflight: Preflight,
    pub rows: Vec<StepRow>,
    pub delta_final: f64,
    /// `‖H^-1∘F∘H - U0‖_0`, `‖H^-1∘K∘H - T_alpha‖_0` on `I_{delta0/2}`.
    pub residual_f: Option<f64>,
    pub residual_k: Option<f64>,
    /// Steps after the first with `E_i0 > E_(i-1),0^(5/4)`.
    pub decay_violations: Vec<usize>,
    pub wall_ms: f64,
    pub notes: Vec<String>,
}

impl RunReport {
    pub(super) fn new(
        config: &KamConfig,
        state: &KamState,
        status: &KamStatus,
        preflight: Preflight,
        residuals: Option<(f64, f64)>,
        start: Instant,
    ) -> Self {
        let rho = config.dio.rho;
        let hist = &state.history;
        let rows: Vec<StepRow> = hist
            .iter()
            .enumerate()
            .map(|(idx, r)| {
                let prev = idx.checked_sub(1).map(|p| hist[p].e0);
                StepRow {
                    i: r.i,
                    N_i: r.n,
                    delta_i: r.delta,
                    E_i0: r.e0,
                    E_imu: r.emu,
                    U_i1: r.u1,
                    lipschitz_i: r.lipschitz,
                    wall_ms: r.wall_ms,
                    decay_exponent: prev.filter(|&p| p > 0.0 && r.e0 > 0.0).map(|p| r.e0.ln() / p.ln()),
                    h_bound_ratio: match (r.u1, r.n, prev) {
                        (Some(u), Some(n), Some(p)) if p > 0.0 => Some(u / (n.powi(rho as i32 + 1) * p)),
                        _ => None,
                    },
                }
            })
            .collect();
        let decay_violations =
            hist.windows(2).skip(1).filter(|w| w[1].e0 > w[0].e0.powf(1.25)).map(|w| w[1].i).collect();
        let mut notes = vec![
            "finite-step certificate: convergence is reported from C^0 residuals after finitely many steps".to_string(),
            "intersection property checked on horizontal circles only".to_string(),
        ];
        if config.mu_effective() < config.dio.mu {
            notes.push(format!(
                "E_imu measured at index {} instead of mu = {} (grid resolution)",
                config.mu_effective(),
                config.dio.mu
            ));
        }
        if state.delta < config.delta0 / 2.0 {
            notes.push(format!("delta_final = {} fell below delta0 / 2", state.delta));
        }
        Self {
            status: status.clone(),
            rho,
            mu: config.dio.mu,
            mu_effective: config.mu_effective(),
            preflight,
            rows,
            delta_final: state.delta,
            residual_f: residuals.map(|r| r.0),
            residual_k: residuals.map(|r| r.1),
            decay_violations,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            notes,
        }
    }

    /// `i,N_i,delta_i,E_i0,E_imu,U_i1,lipschitz_i`; absent values are empty
    /// fields. Timings stay in the JSON so the table is reproducible.
    pub fn steps_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        let mut out = String::from("i,N_i,delta_i,E_i0,E_imu,U_i1,lipschitz_i\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.i,
                opt(r.N_i),
                r.delta_i,
                r.E_i0,
                r.E_imu,
                opt(r.U_i1),
                r.lipschitz_i
            ));
        }
        out
    }
}
