//! Fits a function on `T x [0, 1]`, evaluates it off-grid and measures
//! Hölder norms against closed forms.

use std::f64::consts::PI;

use cylinder_kam::funcspace::holder_norm;
use cylinder_kam::{CylinderFunction, GridSpec, Interval};

fn main() -> cylinder_kam::Result<()> {
    let grid = GridSpec::new(32, 16, Interval::new(0.0, 1.0)?)?;
    let exact = |x: f64, y: f64| (2.0 * PI * x).sin() * (1.0 + y * y) + 0.25 * (6.0 * PI * x).cos();
    let f = CylinderFunction::fit(grid, exact)?;

    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let (x, y) = (0.37 * k as f64 % 1.0, (k as f64 / 49.0).min(1.0));
        worst = worst.max((f.evaluate(x, y)? - exact(x, y)).abs());
    }
    println!("off-grid max error: {worst:.2e}");

    let dx = f.derivative(1, 0)?;
    println!("‖∂x f‖_0 = {:.6} (bound 2 pi * 2 + 6 pi / 4 = {:.6})", dx.sup_norm(), 4.0 * PI + 1.5 * PI);
    for r in [0.0, 0.5, 1.0, 2.0] {
        println!("‖f‖_{r} = {:.6}", holder_norm(&f, r)?);
    }
    println!("x-average at y = 1: {:.3e}", f.average_over_x().evaluate(0.0, 1.0)?);
    Ok(())
}
