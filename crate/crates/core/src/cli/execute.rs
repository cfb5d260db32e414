//! Subcommand dispatch and artifact persistence.

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::config::{DioSpec, MapsPayload, Payload, RunConfig, SemiSpec};
use crate::cohomology::solve_delta_alpha;
use crate::corpus::{
    conjugacy_generator, dilated_corpus, finite_regularity_corpus, smooth_corpus, test_corpus, DilatedCorpus,
    FixedCorpus,
};
use crate::diagnostics::{
    commutator_residual, counterexample_2d, intersection_check, k2_average_probe, phase_portrait, portrait_seeds,
    semiconjugacy_residual, SemiConjugacy,
};
use crate::diophantine::{derived_params, DiophantineParams};
use crate::dsl::{lower_to_function, parse, Periodicity};
use crate::error::{Error, Result};
use crate::funcspace::{GridSpec, Interval, NormSettings, VectorFunction};
use crate::kam::{run, Hypothesis, KamConfig, KamStatus, Preflight};
use crate::maps::{manufacture_commuting_pair, reduce_by_frequency, standard_family, Base, CylinderMap, Frequency};
use crate::smoothing::{remainder_decay_slopes, verify_smoothing_bounds, CutoffProfile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

/// Exit status of a finished run and the report written as `report.json`.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

/// Exit code for an error that aborted a run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotDiophantine { .. } | Error::Degenerate { .. } => EXIT_HYPOTHESIS,
        Error::Config(_) | Error::Parse(_) | Error::Periodicity { .. } | Error::Io(_) | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// SHA-256 of the resolved configuration as written to `config.json`.
pub fn config_hash(config: &RunConfig) -> String {
    let digest = Sha256::digest(config_text(config).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn config_text(config: &RunConfig) -> String {
    let mut s = serde_json::to_string_pretty(&config.to_json()).expect("config serializes");
    s.push('\n');
    s
}

/// Runs `config` and, when `out` is given, writes `config.json`,
/// `report.json` and the subcommand's CSV tables there.
pub fn execute(config: &RunConfig, out: Option<&Path>) -> Result<Outcome> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("config.json"), config_text(config))?;
    }
    let start = Instant::now();
    let run = || dispatch(config);
    let result = match config.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Error::Config(vec![format!("cannot start {n} threads: {e}")])),
        },
        None => run(),
    };
    let (code, mut report, tables) = match result {
        Ok(d) => (d.code, d.report, d.tables),
        Err(e) => {
            let code = exit_code(&e);
            (code, json!({ "status": "Error", "error": e.to_string() }), Vec::new())
        }
    };
    let obj = report.as_object_mut().expect("report is an object");
    obj.insert("subcommand".into(), json!(config.subcommand.key()));
    obj.insert("exit_code".into(), json!(code));
    obj.insert("wall_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
    obj.insert(
        "reproducibility".into(),
        json!({
            "config_sha256": config_hash(config),
            "engine_version": env!("CARGO_PKG_VERSION"),
            "seed": config.seed,
        }),
    );
    if let Some(dir) = out {
        for (name, body) in &tables {
            std::fs::write(dir.join(name), body)?;
        }
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)? + "\n")?;
    }
    Ok(Outcome { code, report })
}

struct Dispatch {
    code: i32,
    report: Value,
    tables: Vec<(&'static str, String)>,
}

impl Dispatch {
    fn ok(report: Value) -> Self {
        Self { code: EXIT_OK, report, tables: Vec::new() }
    }
}

fn dispatch(config: &RunConfig) -> Result<Dispatch> {
    match &config.payload {
        Payload::Cohomology { phi } => cohomology(config, phi.as_deref()),
        Payload::Kam(m) => kam(config, m),
        Payload::Diagnose(m) => diagnose(config, m),
        Payload::StandardMap { eps, q, r, seeds, iterations } => {
            standard_map(config, *eps, *q, *r, *seeds, *iterations)
        }
        Payload::Counterexample2d { delta, n_scan } => {
            let r = counterexample_2d(*delta, *n_scan)?;
            Ok(Dispatch::ok(json!({ "status": "Ok", "counterexample": r })))
        }
        Payload::Constants { n_list, s, l, decay_ls, y_scale } => constants(config, n_list, *s, *l, decay_ls, *y_scale),
    }
}

fn diophantine(config: &RunConfig) -> Result<DiophantineParams> {
    let alpha = config.alpha.ok_or_else(|| Error::Config(vec!["missing required key 'alpha'".into()]))?;
    match config.dio {
        DioSpec::Explicit { sigma, tau } => DiophantineParams::new(alpha, sigma, tau, config.check_bound),
        DioSpec::Auto(m) => DiophantineParams::estimated(alpha, m),
    }
}

fn norm_settings(config: &RunConfig) -> NormSettings {
    NormSettings { seed: config.seed, ..NormSettings::default() }
}

fn cohomology(config: &RunConfig, phi: Option<&str>) -> Result<Dispatch> {
    let dio = diophantine(config)?;
    let grid = GridSpec::new(config.nx, config.ny, config.interval)?;
    let members = match phi {
        Some(src) => vec![("phi".to_string(), lower_to_function(&parse(src)?, grid, Periodicity::Strict)?)],
        None => test_corpus().iter().map(|p| Ok((p.id.clone(), p.fit(grid)?))).collect::<Result<_>>()?,
    };
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (id, f) in members {
        let sol = solve_delta_alpha(&f, &dio)?;
        worst = worst.max(sol.residual_c0);
        rows.push(json!({
            "id": id,
            "residual_c0": sol.residual_c0,
            "mean_u": sol.u.average_over_x().sup_norm(),
            "u_c0": sol.u.sup_norm(),
            "bound_ratio": sol.bound_ratio,
        }));
    }
    let pass = worst <= 1e-10;
    Ok(Dispatch {
        code: if pass { EXIT_OK } else { EXIT_NUMERICAL },
        report: json!({
            "status": if pass { "Ok" } else { "ResidualTooLarge" },
            "diophantine": dio,
            "max_residual_c0": worst,
            "members": rows,
        }),
        tables: Vec::new(),
    })
}

/// Maps ready for the iteration, in reduced coordinates when a frequency
/// map was given.
struct Problem {
    f: CylinderMap,
    k: CylinderMap,
    w: Option<SemiConjugacy>,
    interval: Interval,
    delta0: f64,
    grid: GridSpec,
    notes: Vec<String>,
}

fn build_problem(config: &RunConfig, m: &MapsPayload, alpha: f64) -> Result<Problem> {
    let dom = config.interval.widen(config.delta0)?;
    let grid = GridSpec::new(config.nx, config.ny, dom)?;
    let mut notes = Vec::new();
    if let Some(c1) = m.manufactured {
        let wide = grid.with_interval(dom.widen((4.0 * c1).max(0.1))?);
        let pair = manufacture_commuting_pair(&conjugacy_generator(wide, c1)?, alpha, wide, dom)?;
        let w = match &m.semiconjugacy {
            Some(SemiSpec::Manufactured) => Some(pair.w_true.clone()),
            Some(s) => Some(semi(s, grid)?),
            None => None,
        };
        return Ok(Problem { f: pair.f, k: pair.k, w, interval: config.interval, delta0: config.delta0, grid, notes });
    }
    let lower = |s: &str| lower_to_function(&parse(s)?, grid, Periodicity::Strict);
    let fp = VectorFunction::new(lower(&m.f[0])?, lower(&m.f[1])?)?;
    let kp = VectorFunction::new(lower(&m.k[0])?, lower(&m.k[1])?)?;
    let k = CylinderMap::translation(alpha).with_pert(kp);
    let Some(src) = &m.frequency else {
        let f = CylinderMap::twist().with_pert(fp);
        let w = m.semiconjugacy.as_ref().map(|s| semi(s, grid)).transpose()?;
        return Ok(Problem { f, k, w, interval: config.interval, delta0: config.delta0, grid, notes });
    };
    let omega = Frequency::parse(src)?;
    let interval = omega.image(config.interval)?;
    let f = CylinderMap::new(Base::FrequencyTwist(omega), Some(fp));
    let (f, k) = reduce_by_frequency(&f, &k, grid)?;
    let rdom = f.domain().expect("reduced map carries a domain");
    // widening by the exact margin can land one ulp outside the reduced domain
    let delta0 = (rdom.margin_over(&interval) * (1.0 - 1e-9)).min(0.5);
    notes.push(format!(
        "reduced by omega(y) = {src}: interval {interval}, delta0 {delta0}; semi-conjugacy read in reduced coordinates"
    ));
    let grid = grid.with_interval(rdom);
    let w = m.semiconjugacy.as_ref().map(|s| semi(s, grid)).transpose()?;
    Ok(Problem { f, k, w, interval, delta0, grid, notes })
}

fn semi(spec: &SemiSpec, grid: GridSpec) -> Result<SemiConjugacy> {
    match spec {
        SemiSpec::Projection => Ok(SemiConjugacy::projection(grid)),
        SemiSpec::Manufactured => {
            Err(Error::Config(vec!["semiconjugacy \"manufactured\" needs a manufactured pair".into()]))
        }
        SemiSpec::Expr { v, lipschitz } => {
            let v = lower_to_function(&parse(v)?, grid, Periodicity::Strict)?;
            match lipschitz {
                Some(l) => SemiConjugacy::new(v, *l),
                None => SemiConjugacy::with_measured_lipschitz(v),
            }
        }
    }
}

fn kam_config(config: &RunConfig, m: &MapsPayload, p: &Problem, dio: DiophantineParams) -> Result<KamConfig> {
    let base = KamConfig::new(dio, p.interval, p.delta0, config.nx, config.ny)?;
    let lipschitz0 = m.lipschitz0.or(p.w.as_ref().map(|w| w.lipschitz)).unwrap_or(base.lipschitz0);
    let cfg = KamConfig {
        tol_e0: config.tol,
        max_iter: config.max_iter,
        lipschitz0,
        profile: CutoffProfile { y_scale: m.y_scale, ..CutoffProfile::default() },
        norms: norm_settings(config),
        ..base
    };
    cfg.validate()?;
    Ok(cfg)
}

fn diophantine_violation(e: Error) -> Result<Dispatch> {
    if exit_code(&e) != EXIT_HYPOTHESIS {
        return Err(e);
    }
    let status = KamStatus::HypothesisViolated(Hypothesis::Diophantine);
    let pre = Preflight { failed: Some(Hypothesis::Diophantine), detail: Some(e.to_string()), ..Preflight::default() };
    Ok(Dispatch {
        code: EXIT_HYPOTHESIS,
        report: json!({ "status": status, "preflight": pre, "error": e.to_string() }),
        tables: Vec::new(),
    })
}

fn kam(config: &RunConfig, m: &MapsPayload) -> Result<Dispatch> {
    let dio = match diophantine(config) {
        Ok(d) => d,
        Err(e) => return diophantine_violation(e),
    };
    let p = build_problem(config, m, dio.alpha)?;
    let w = p.w.clone().ok_or_else(|| Error::Config(vec!["missing required key 'kam.semiconjugacy'".into()]))?;
    let cfg = kam_config(config, m, &p, dio)?;
    let result = run(&p.f, &p.k, &w, &cfg)?;
    let mut report = result.report;
    report.notes.extend(p.notes);
    let code = match result.status {
        KamStatus::Converged => EXIT_OK,
        KamStatus::HypothesisViolated(_) => EXIT_HYPOTHESIS,
        _ => EXIT_NUMERICAL,
    };
    let steps = report.steps_csv();
    let mut value = serde_json::to_value(&report)?;
    value["diophantine"] = serde_json::to_value(dio)?;
    Ok(Dispatch { code, report: value, tables: vec![("steps.csv", steps)] })
}

fn diagnose(config: &RunConfig, m: &MapsPayload) -> Result<Dispatch> {
    let dio = match diophantine(config) {
        Ok(d) => d,
        Err(e) => return diophantine_violation(e),
    };
    let p = build_problem(config, m, dio.alpha)?;
    let cfg = kam_config(config, m, &p, dio)?;
    let grid = p.grid.with_interval(cfg.domain(cfg.delta0)?);
    let tol = cfg.hypothesis_tol;
    let mut failed = Vec::new();
    let needed = (config.nx / 2) as u64;
    let dio_ok = dio.verified(needed).is_ok();
    if !dio_ok {
        failed.push("diophantine");
    }
    let comm = commutator_residual(&p.f, &p.k, grid)?;
    if !(comm.direct <= tol) {
        failed.push("commutator");
    }
    let k2 = k2_average_probe(&p.f, &p.k, grid)?;
    let inter = intersection_check(&p.f, grid, cfg.intersection_samples)?;
    if !inter.pass {
        failed.push("intersection");
    }
    let semi = match &p.w {
        Some(w) => {
            let s = semiconjugacy_residual(w, &p.k, dio.alpha, grid)?;
            if !(s.residual <= tol) || s.slope > cfg.lipschitz0 {
                failed.push("semiconjugacy");
            }
            Some(s)
        }
        None => None,
    };
    Ok(Dispatch {
        code: if failed.is_empty() { EXIT_OK } else { EXIT_HYPOTHESIS },
        report: json!({
            "status": if failed.is_empty() { "Ok" } else { "HypothesisViolated" },
            "failed": failed,
            "diophantine": { "params": dio, "verified_to": needed.max(dio.check_bound), "pass": dio_ok },
            "commutator": comm,
            "k2_average": k2,
            "intersection": inter,
            "semiconjugacy": semi,
            "lipschitz0": cfg.lipschitz0,
            "hypothesis_tol": tol,
            "notes": p.notes,
        }),
        tables: Vec::new(),
    })
}

fn standard_map(config: &RunConfig, eps: f64, q: u32, r: u32, seeds: usize, iterations: usize) -> Result<Dispatch> {
    let dom = config.interval.widen(config.delta0)?;
    let grid = GridSpec::new(config.nx, config.ny, dom)?;
    let s = standard_family(eps, q, r, grid)?;
    let wrap = dom.width() >= 1.0;
    let portrait = phase_portrait(&s, &portrait_seeds(seeds, dom, config.seed), iterations, wrap)?;
    let inter = intersection_check(&s, grid, 33)?;
    // S commutes with T_{1/q}; the residual measures the fitted family.
    let comm = commutator_residual(&s, &CylinderMap::translation(1.0 / q as f64), grid)?;
    Ok(Dispatch {
        code: EXIT_OK,
        report: json!({
            "status": "Ok",
            "eps": eps, "q": q, "r": r,
            "domain": dom,
            "wrap_y": wrap,
            "rows": portrait.rows.len(),
            "escaped": portrait.escaped,
            "intersection": inter,
            "commutator_with_rational_translation": comm,
        }),
        tables: vec![("portrait.csv", portrait.to_csv())],
    })
}

fn constants(config: &RunConfig, ns: &[f64], s: f64, l: f64, decay_ls: &[f64], y_scale: f64) -> Result<Dispatch> {
    let grid = GridSpec::new(config.nx, config.ny, config.interval)?;
    let profile = CutoffProfile { y_scale, ..CutoffProfile::default() };
    let table =
        verify_smoothing_bounds(&DilatedCorpus(dilated_corpus()), grid, ns, s, l, &profile, &norm_settings(config))?;
    let (spread_s, spread_r) = table.spread();
    // the remainder needs modes well past 2N, hence the finer x grid
    let n_max = ns.iter().fold(1.0_f64, |a, &n| a.max(n));
    let nx_fine = ((4.0 * n_max) as usize).next_power_of_two().max(config.nx);
    let fine = GridSpec::new(nx_fine, 8, config.interval)?;
    let decay = decay_ls
        .iter()
        .map(|&dl| {
            let mut members = finite_regularity_corpus(dl, config.seed);
            members.extend(smooth_corpus());
            let slopes = remainder_decay_slopes(&FixedCorpus(members), fine, ns, &profile, 1e-13)?;
            let min_slope = slopes.iter().filter_map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
            Ok(json!({ "l": dl, "min_slope": min_slope, "pass": min_slope >= dl - 0.5, "slopes": slopes }))
        })
        .collect::<Result<Vec<Value>>>()?;
    let dio = match config.alpha {
        Some(_) => Some(diophantine(config)?),
        None => None,
    };
    let derived = match config.dio {
        DioSpec::Explicit { sigma, tau } => Some(derived_params(sigma, tau)?),
        DioSpec::Auto(_) => None,
    };
    let stable = spread_s <= 0.2 && spread_r <= 0.2;
    let pass = stable && decay.iter().all(|d| d["pass"] == true);
    Ok(Dispatch {
        code: if pass { EXIT_OK } else { EXIT_NUMERICAL },
        report: json!({
            "status": if pass { "Ok" } else { "BoundCheckFailed" },
            "s": s, "l": l, "n_list": ns,
            "constants": table.constants,
            "spread": { "smoothing": spread_s, "remainder": spread_r, "stable": stable },
            "decay": decay,
            "diophantine": dio,
            "derived": derived,
        }),
        tables: vec![("constants.csv", table.to_csv())],
    })
}
