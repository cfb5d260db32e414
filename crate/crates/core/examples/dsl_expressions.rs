//! Parses perturbation expressions, prints their canonical form and audits
//! periodicity in `x`.

use cylinder_kam::dsl::{lower_to_function, parse, periodicity_gap, Periodicity, BUNDLED};
use cylinder_kam::{GridSpec, Interval};

fn main() -> cylinder_kam::Result<()> {
    let grid = GridSpec::new(32, 16, Interval::new(0.0, 1.0)?)?;
    for src in BUNDLED.iter().copied().chain(["1e-3*x", "sin(2*pi*x"]) {
        let e = match parse(src) {
            Ok(e) => e,
            Err(err) => {
                println!("{src:<40} parse error: {err}");
                continue;
            }
        };
        let (gap, _) = periodicity_gap(&e, &grid);
        let fitted = lower_to_function(&e, grid, Periodicity::Strict);
        println!(
            "{src:<40} -> {e}  e(0.3, 0.5) = {:+.6}  gap {gap:.1e}  {}",
            e.eval(0.3, 0.5),
            if fitted.is_ok() { "ok" } else { "rejected" }
        );
    }
    Ok(())
}
