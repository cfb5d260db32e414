//! Measures the smoothing constants over `N` and the remainder decay rates
//! for functions of finite regularity.

use cylinder_kam::corpus::{dilated_corpus, finite_regularity_corpus, DilatedCorpus, FixedCorpus};
use cylinder_kam::funcspace::NormSettings;
use cylinder_kam::smoothing::{remainder_decay_slopes, verify_smoothing_bounds, CutoffProfile};
use cylinder_kam::{GridSpec, Interval};

fn main() -> cylinder_kam::Result<()> {
    let grid = GridSpec::new(64, 16, Interval::new(0.0, 1.0)?)?;
    let ns = [4.0, 8.0, 16.0];
    let profile = CutoffProfile::default();
    let settings = NormSettings { pair_samples: 1024, ..NormSettings::default() };
    for (s, l) in [(0.0, 1.0), (0.0, 2.0), (1.0, 3.0)] {
        let t = verify_smoothing_bounds(&DilatedCorpus(dilated_corpus()), grid, &ns, s, l, &profile, &settings)?;
        let (ds, dr) = t.spread();
        for (n, cs, cr) in &t.constants {
            println!("s={s} l={l} N={n:>2}: C_S = {cs:.4}, C_R = {cr:.4e}");
        }
        println!("  spread {ds:.1e} / {dr:.1e}");
    }
    let fine = GridSpec::new(128, 8, Interval::new(0.0, 1.0)?)?;
    for l in [1.0, 2.0, 3.0] {
        let slopes = remainder_decay_slopes(&FixedCorpus(finite_regularity_corpus(l, 1)), fine, &ns, &profile, 1e-13)?;
        let v: Vec<String> = slopes.iter().map(|(id, s)| format!("{id}: {:.2}", s.unwrap_or(f64::NAN))).collect();
        println!("l = {l}: decay of ‖R_N f‖_0 in log2 N  {}", v.join(", "));
    }
    Ok(())
}
