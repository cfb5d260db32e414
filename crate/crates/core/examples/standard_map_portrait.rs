//! Orbit cloud of the generalized standard family; writes CSV to the path
//! given as first argument, or prints a summary.
//!
//! ```text
//! cargo run --release --example standard_map_portrait -- portrait.csv [eps] [q]
//! ```

use cylinder_kam::diagnostics::{commutator_residual, phase_portrait, portrait_seeds};
use cylinder_kam::maps::{standard_family, CylinderMap};
use cylinder_kam::{GridSpec, Interval};

fn main() -> cylinder_kam::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let eps: f64 = args.get(1).map_or(1.0, |s| s.parse().expect("eps"));
    let q: u32 = args.get(2).map_or(3, |s| s.parse().expect("q"));

    let dom = Interval::new(0.0, 1.0)?;
    let grid = GridSpec::new(64, 16, dom)?;
    let s = standard_family(eps, q, 2, grid)?;
    let c = commutator_residual(&s, &CylinderMap::translation(1.0 / q as f64), grid)?;
    println!("‖S∘T_(1/q) - T_(1/q)∘S‖_0 = {:.2e}", c.direct);

    let portrait = phase_portrait(&s, &portrait_seeds(50, dom, 1), 2000, true)?;
    println!("{} rows, {} escaped orbits", portrait.rows.len(), portrait.escaped.len());
    match args.first() {
        Some(path) => std::fs::write(path, portrait.to_csv())?,
        None => {
            for row in portrait.rows.iter().step_by(10_000) {
                println!("{row:?}");
            }
        }
    }
    Ok(())
}
