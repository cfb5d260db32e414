//! Runs the pre-flight checks on a manufactured commuting pair and on two
//! pairs that break a hypothesis.

use cylinder_kam::corpus::conjugacy_generator;
use cylinder_kam::diagnostics::SemiConjugacy;
use cylinder_kam::diophantine::DiophantineParams;
use cylinder_kam::kam::{preflight, KamConfig};
use cylinder_kam::maps::{manufacture_commuting_pair, CylinderMap};
use cylinder_kam::{Interval, VectorFunction, GOLDEN};

fn main() -> cylinder_kam::Result<()> {
    let dio = DiophantineParams::estimated(GOLDEN, 10_000)?;
    let config = KamConfig::new(dio, Interval::new(0.25, 0.75)?, 0.25, 64, 32)?;
    let dom = config.domain(0.25)?;
    let grid = config.grid.with_interval(dom);
    let wide = grid.with_interval(Interval::new(-0.1, 1.1)?);
    let pair = manufacture_commuting_pair(&conjugacy_generator(wide, 1e-3)?, GOLDEN, wide, dom)?;
    let cfg = KamConfig { lipschitz0: pair.w_true.lipschitz, ..config.clone() };
    println!("manufactured: {:?}", preflight(&pair.f, &pair.k, &pair.w_true, &cfg)?);

    // F no longer commutes with K once f is nudged
    let nudge = VectorFunction::fit(grid, |x, _| (0.0, 1e-4 * (2.0 * std::f64::consts::PI * x).sin()))?;
    let f = CylinderMap::twist().with_pert(pair.f.pert_or_zero(grid).add(&nudge)?);
    println!("nudged:       {:?}", preflight(&f, &pair.k, &pair.w_true, &cfg)?.failed);

    let lift = CylinderMap::twist().with_pert(VectorFunction::fit(grid, |_, _| (0.0, 1e-3))?);
    let w = SemiConjugacy::projection(grid);
    let cfg = KamConfig { lipschitz0: 2.0, ..config };
    println!("vertical lift: {:?}", preflight(&lift, &CylinderMap::translation(GOLDEN), &w, &cfg)?.failed);
    Ok(())
}
