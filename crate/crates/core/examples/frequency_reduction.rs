//! Rewrites `F0(omega) + f` over the plain twist by `y ↦ omega(y)` and
//! compares the new vertical perturbation with its closed form.

use std::f64::consts::PI;

use cylinder_kam::maps::{reduce_by_frequency, Base, CylinderMap, Frequency};
use cylinder_kam::{GridSpec, Interval, VectorFunction, GOLDEN};

fn main() -> cylinder_kam::Result<()> {
    let iv = Interval::new(0.2, 0.6)?;
    let grid = GridSpec::new(32, 16, iv)?;
    let f2 = |x: f64, y: f64| 1e-3 * (2.0 * PI * x).sin() * (1.0 + y);
    let pert = VectorFunction::fit(grid, |x, y| (0.0, f2(x, y)))?;

    for src in ["2*y", "y + 0.5*y^3"] {
        let omega = Frequency::parse(src)?;
        let f = CylinderMap::new(Base::FrequencyTwist(omega.clone()), Some(pert.clone()));
        let (fr, kr) = reduce_by_frequency(&f, &CylinderMap::translation(GOLDEN), grid)?;
        let p = fr.pert.as_ref().expect("reduced perturbation");
        let mut worst: f64 = 0.0;
        for k in 0..100 {
            let x = (k as f64 * GOLDEN).fract();
            let y = iv.lo() + iv.width() * (k as f64 + 0.5) / 100.0;
            let eta = omega.eval(y);
            let want = omega.eval(y + f2(x, y)) - eta;
            worst = worst.max((p.evaluate(x, eta)?.1 - want).abs());
        }
        println!("omega = {src:<12} new interval {}  K base {}  max error {worst:.2e}", p.interval(), kr.base.name());
    }
    Ok(())
}
