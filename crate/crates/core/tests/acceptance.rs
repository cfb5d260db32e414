//! Acceptance suite. Each test writes one `criterion N PASS|FAIL ...` line
//! straight to stderr, so the lines show without `--nocapture`.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use cylinder_kam::cli::{execute, exit_code, parse_config, Subcommand, EXIT_CONFIG, EXIT_HYPOTHESIS, EXIT_OK};
use cylinder_kam::cohomology::solve_delta_alpha;
use cylinder_kam::corpus::{
    conjugacy_generator, dilated_corpus, finite_regularity_corpus, smooth_corpus, test_corpus, DilatedCorpus,
    FixedCorpus,
};
use cylinder_kam::diagnostics::{
    commutator_residual, counterexample_2d, intersection_check, k2_average_probe, SemiConjugacy,
};
use cylinder_kam::diophantine::DiophantineParams;
use cylinder_kam::funcspace::{holder_norm, NormSettings};
use cylinder_kam::kam::{run, Hypothesis, KamConfig, KamStatus};
use cylinder_kam::maps::{manufacture_commuting_pair, reduce_by_frequency, Base, CylinderMap, Frequency};
use cylinder_kam::smoothing::{interpolation_check, remainder_decay_slopes, verify_smoothing_bounds, CutoffProfile};
use cylinder_kam::{CylinderFunction, GridSpec, Interval, VectorFunction, GOLDEN};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n:>2} {verdict} {detail}");
    assert!(pass, "criterion {n} failed: {detail}");
}

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn golden() -> DiophantineParams {
    DiophantineParams::estimated(GOLDEN, 10_000).unwrap()
}

/// Least-squares slope through `(ln x, ln y)`.
fn loglog_slope(pts: &[(f64, f64)]) -> f64 {
    let p: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = p.len() as f64;
    let mx = p.iter().map(|q| q.0).sum::<f64>() / n;
    let my = p.iter().map(|q| q.1).sum::<f64>() / n;
    let sxy: f64 = p.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    let sxx: f64 = p.iter().map(|q| (q.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn criterion_01_cohomological_solver_exactness() {
    let dio = golden();
    let grid = GridSpec::new(32, 16, iv(0.0, 1.0)).unwrap();
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut mean_exact = true;
    for p in test_corpus() {
        let sol = solve_delta_alpha(&p.fit(grid).unwrap(), &dio).unwrap();
        worst = worst.max(sol.residual_c0);
        mean_exact &= (0..grid.ny()).all(|j| sol.u.coeff(0, j).norm() == 0.0);
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-10 && mean_exact && secs < 1.0;
    report(1, pass, &format!("max residual {worst:.2e}, [u] = 0 exactly: {mean_exact}, {secs:.3} s"));
}

#[test]
fn criterion_02_norm_bound_shape() {
    let dio = golden();
    // golden mean is of bounded type: tau = 1 in the limit, so rho = 2
    assert_eq!(dio.rho, 2);
    let grid = GridSpec::new(32, 16, iv(0.0, 1.0)).unwrap();
    let mut worst: f64 = 0.0;
    for p in test_corpus() {
        let phi = p.fit(grid).unwrap();
        let sol = solve_delta_alpha(&phi, &dio).unwrap();
        let ratio = sol.u.sup_norm() / holder_norm(&phi, dio.rho as f64).unwrap();
        worst = worst.max(ratio);
    }
    let pass = worst <= dio.lemma_constant;
    report(
        2,
        pass,
        &format!(
            "max ‖u‖_0/‖phi‖_rho = {worst:.3e} <= C = {:.3} (tau {:.4}, rho {})",
            dio.lemma_constant, dio.tau, dio.rho
        ),
    );
}

#[test]
fn criterion_03_commutator_quadratic_smallness() {
    let dom = iv(0.0, 1.0);
    let grid = GridSpec::new(64, 32, dom).unwrap();
    let wide = grid.with_interval(iv(-0.1, 1.1));
    let mut op = Vec::new();
    let mut k2 = Vec::new();
    for eps in [1e-2, 3e-3, 1e-3] {
        let pair = manufacture_commuting_pair(&conjugacy_generator(wide, eps).unwrap(), GOLDEN, wide, dom).unwrap();
        op.push((eps, commutator_residual(&pair.f, &pair.k, grid).unwrap().operator));
        k2.push((eps, k2_average_probe(&pair.f, &pair.k, grid).unwrap().avg_k2));
    }
    let (so, sk) = (loglog_slope(&op), loglog_slope(&k2));
    report(3, so >= 1.8 && sk >= 1.8, &format!("slope ‖L(f,k)‖_0 {so:.3}, slope ‖[k2]‖_0 {sk:.3}"));
}

#[test]
fn criterion_04_smoothing_inequalities() {
    let grid = GridSpec::new(64, 16, iv(0.0, 1.0)).unwrap();
    let ns = [4.0, 8.0, 16.0];
    let profile = CutoffProfile::default();
    let settings = NormSettings { pair_samples: 1024, ..NormSettings::default() };
    let mut pass = true;
    let mut detail = Vec::new();
    for (s, l) in [(0.0, 1.0), (0.0, 2.0), (1.0, 2.0)] {
        let t =
            verify_smoothing_bounds(&DilatedCorpus(dilated_corpus()), grid, &ns, s, l, &profile, &settings).unwrap();
        let (ds, dr) = t.spread();
        let finite = t.constants.iter().all(|c| c.1.is_finite() && c.2.is_finite() && c.1 > 0.0 && c.2 > 0.0);
        pass &= finite && ds <= 0.2 && dr <= 0.2;
        detail.push(format!("(s,l)=({s},{l}) spread {ds:.1e}/{dr:.1e}"));
    }
    let fine = GridSpec::new(128, 8, iv(0.0, 1.0)).unwrap();
    for l in [1.0, 2.0, 3.0] {
        let mut members = finite_regularity_corpus(l, 7 + l as u64);
        members.extend(smooth_corpus());
        let slopes = remainder_decay_slopes(&FixedCorpus(members), fine, &ns, &profile, 1e-13).unwrap();
        let min = slopes.iter().filter_map(|s| s.1).fold(f64::INFINITY, f64::min);
        pass &= min >= l - 0.5;
        detail.push(format!("l={l} min decay slope {min:.2}"));
    }
    report(4, pass, &detail.join(", "));
}

#[test]
fn criterion_05_interpolation_pure_mode() {
    let grid = GridSpec::new(32, 16, iv(0.0, 1.0)).unwrap();
    let f = CylinderFunction::fit(grid, |x, _| (2.0 * PI * 3.0 * x).cos()).unwrap();
    // ‖f‖_r = (6 pi)^r for a unit mode, so the exact ratio is 1
    let r = interpolation_check(&f, 0.0, 1.0, 2.0, &NormSettings::default()).unwrap();
    report(5, (r - 1.0).abs() <= 5e-2, &format!("ratio {r:.6}"));
}

struct Fixture {
    f: CylinderMap,
    k: CylinderMap,
    w: SemiConjugacy,
    config: KamConfig,
}

fn kam_fixture() -> Fixture {
    let config = KamConfig::new(golden(), iv(0.25, 0.75), 0.25, 64, 32).unwrap();
    let wide = GridSpec::new(64, 32, iv(-0.1, 1.1)).unwrap();
    let pair = manufacture_commuting_pair(
        &conjugacy_generator(wide, 1e-3).unwrap(),
        GOLDEN,
        wide,
        config.domain(0.25).unwrap(),
    )
    .unwrap();
    let config = KamConfig { lipschitz0: pair.w_true.lipschitz, ..config };
    Fixture { f: pair.f, k: pair.k, w: pair.w_true, config }
}

#[test]
fn criterion_06_07_end_to_end_convergence_and_decay() {
    let fx = kam_fixture();
    let start = Instant::now();
    let result = run(&fx.f, &fx.k, &fx.w, &fx.config).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let r = &result.report;
    let steps = r.rows.len() - 1;
    let (rf, rk) = (r.residual_f.unwrap_or(f64::INFINITY), r.residual_k.unwrap_or(f64::INFINITY));
    let pass6 = result.status == KamStatus::Converged
        && steps <= 8
        && rf <= 1e-8
        && rk <= 1e-8
        && r.delta_final >= 0.125
        && secs <= 60.0;
    let e: Vec<f64> = r.rows.iter().map(|row| row.E_i0).collect();
    let decay_ok = e.windows(2).skip(1).all(|w| w[1] <= w[0].powf(1.2));
    let exps: Vec<String> = r.rows.iter().filter_map(|row| row.decay_exponent).map(|x| format!("{x:.2}")).collect();
    let line6 = format!(
        "{} in {steps} steps, residuals F {rf:.1e} K {rk:.1e}, delta_final {:.4}, {secs:.1} s",
        result.status.name(),
        r.delta_final
    );
    let es: Vec<String> = e.iter().map(|x| format!("{x:.1e}")).collect();
    let line7 = format!("E_i0 [{}], log-ratio exponents [{}]", es.join(", "), exps.join(", "));
    let _ = writeln!(std::io::stderr(), "criterion  6 {} {line6}", if pass6 { "PASS" } else { "FAIL" });
    report(7, decay_ok && steps >= 1, &line7);
    assert!(pass6, "criterion 6 failed: {line6}");
}

fn run_cli(text: &str, sub: Subcommand, out: &Path) -> (i32, serde_json::Value) {
    match parse_config(text, sub) {
        Ok(c) => {
            let o = execute(&c, Some(out)).unwrap();
            (o.code, o.report)
        }
        Err(e) => (exit_code(&e), serde_json::json!({ "error": e.to_string() })),
    }
}

#[test]
fn criterion_08_hypothesis_gating() {
    let tmp = tempfile::tempdir().unwrap();

    // S_eps with q = 3 commutes with T_{1/3}
    let rational = r#"{
        "alpha": 0.3333333333333333,
        "kam": {
            "f": {"x": "0.9*sin(2*pi*3*x)/(2*pi*3)^2", "y": "0.9*sin(2*pi*3*x)/(2*pi*3)^2"},
            "semiconjugacy": "projection"
        }
    }"#;
    let (code_a, rep_a) = run_cli(rational, Subcommand::Kam, &tmp.path().join("a"));
    let pass_a = code_a == EXIT_HYPOTHESIS && rep_a["preflight"]["failed"] == "Diophantine";

    let fx = kam_fixture();
    let grid = fx.config.grid.with_interval(fx.config.domain(0.25).unwrap());
    let pert = VectorFunction::fit(grid, |_, _| (0.0, 1e-3)).unwrap();
    let f = CylinderMap::twist().with_pert(pert);
    let k = CylinderMap::translation(GOLDEN);
    let check = intersection_check(&f, grid, 33).unwrap();
    let w = SemiConjugacy::projection(grid);
    let config = KamConfig { lipschitz0: 2.0, ..fx.config.clone() };
    let result = run(&f, &k, &w, &config).unwrap();
    let pass_b = !check.pass
        && result.status == KamStatus::HypothesisViolated(Hypothesis::Intersection)
        && result.final_state.history.len() == 1
        && result.h_total.is_none();

    let no_w = r#"{"alpha": "golden", "kam": {"manufactured": {"c1": 1e-3}}}"#;
    let (code_c, rep_c) = run_cli(no_w, Subcommand::Kam, &tmp.path().join("c"));
    let pass_c = code_c == EXIT_CONFIG && rep_c["error"].as_str().is_some_and(|e| e.contains("semiconjugacy"));

    report(
        8,
        pass_a && pass_b && pass_c,
        &format!(
            "(a) exit {code_a}, failed {}; (b) intersection margin {:.1e}, status {}; (c) exit {code_c}",
            rep_a["preflight"]["failed"],
            check.margin,
            result.status.name()
        ),
    );
}

#[test]
fn criterion_09_two_torus_counterexample() {
    let r = counterexample_2d(0.05, 100_000).unwrap();
    // h(0) = cos(pi) - cos(0), h(1/2) = cos(2 pi) - cos(pi)
    let pass = r.min_gap > 0.0 && (r.h0 + 2.0).abs() <= 1e-12 && (r.h_half - 2.0).abs() <= 1e-12;
    report(9, pass, &format!("min gap {:.6} at x = {}, h(0) = {}, h(1/2) = {}", r.min_gap, r.argmin, r.h0, r.h_half));
}

#[test]
fn criterion_10_standard_map_portrait() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"{"seed": 11, "standard-map": {"eps": 1.0, "q": 3, "r": 2, "seeds": 50, "iterations": 2000}}"#;
    let (c1, _) = run_cli(text, Subcommand::StandardMap, &tmp.path().join("one"));
    let (c2, _) = run_cli(text, Subcommand::StandardMap, &tmp.path().join("two"));
    let a = std::fs::read(tmp.path().join("one/portrait.csv")).unwrap();
    let b = std::fs::read(tmp.path().join("two/portrait.csv")).unwrap();
    let rows = a.iter().filter(|&&c| c == b'\n').count() - 1;
    let pass = c1 == EXIT_OK && c2 == EXIT_OK && a == b && rows == 50 * 2000;
    report(10, pass, &format!("{rows} rows, byte-identical: {}", a == b));
}

#[test]
fn criterion_11_reduction_by_frequency() {
    let base = iv(0.1, 0.6);
    let grid = GridSpec::new(32, 16, base).unwrap();
    let f2 = |x: f64, y: f64| 1e-3 * ((2.0 * PI * x).sin() + 0.5 * y * y * (4.0 * PI * x).cos());
    let pert = VectorFunction::fit(grid, |x, y| (1e-3 * (2.0 * PI * x).cos() * y, f2(x, y))).unwrap();
    let f = CylinderMap::new(Base::FrequencyTwist(Frequency::parse("2*y").unwrap()), Some(pert));
    let (fr, _) = reduce_by_frequency(&f, &CylinderMap::translation(GOLDEN), grid).unwrap();
    let p = fr.pert.as_ref().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (x, eta) = (rng.gen::<f64>(), rng.gen_range(0.2..1.2));
        worst = worst.max((p.evaluate(x, eta).unwrap().1 - 2.0 * f2(x, eta / 2.0)).abs());
    }
    report(11, worst <= 1e-10, &format!("max |f2' - 2 f2(x, y/2)| = {worst:.2e} over 100 points"));
}
