//! The torus `y = psi(x)` in `T² x R²` that misses its image under the
//! twist: scans the gap function for several `delta`.

use cylinder_kam::diagnostics::{counterexample_2d, torus_g, torus_h};

fn main() -> cylinder_kam::Result<()> {
    for delta in [0.01, 0.05, 0.1, 0.15] {
        let r = counterexample_2d(delta, 100_000)?;
        println!(
            "delta = {delta:<5} min max(|g|,|h|) = {:.6} at x = {:.5}  h(0) = {}, h(1/2) = {}",
            r.min_gap, r.argmin, r.h0, r.h_half
        );
    }
    for x in [0.0, 0.25, 0.5, 0.75] {
        println!("x = {x}: g = {:+.6}, h = {:+.6}", torus_g(0.05, x), torus_h(0.05, x));
    }
    Ok(())
}
