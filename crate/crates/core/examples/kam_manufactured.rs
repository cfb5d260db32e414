//! Linearizes a manufactured commuting pair `(H∘U0∘H^-1, H∘T_α∘H^-1)` and
//! prints the step table.
//!
//! ```text
//! cargo run --release --example kam_manufactured -- [c1] [nx] [ny]
//! ```

use cylinder_kam::corpus::conjugacy_generator;
use cylinder_kam::diophantine::DiophantineParams;
use cylinder_kam::kam::{run, KamConfig};
use cylinder_kam::maps::manufacture_commuting_pair;
use cylinder_kam::{GridSpec, Interval, GOLDEN};

fn main() -> cylinder_kam::Result<()> {
    env_logger::init();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let c1: f64 = args.first().map_or(1e-3, |s| s.parse().expect("c1"));
    let nx: usize = args.get(1).map_or(64, |s| s.parse().expect("nx"));
    let ny: usize = args.get(2).map_or(32, |s| s.parse().expect("ny"));

    let dio = DiophantineParams::estimated(GOLDEN, 10_000)?;
    let config = KamConfig::new(dio, Interval::new(0.25, 0.75)?, 0.25, nx, ny)?;
    let wide = GridSpec::new(nx, ny, Interval::new(-0.1, 1.1)?)?;
    let pair = manufacture_commuting_pair(&conjugacy_generator(wide, c1)?, GOLDEN, wide, config.domain(0.25)?)?;
    let config = KamConfig { lipschitz0: pair.w_true.lipschitz, ..config };

    let result = run(&pair.f, &pair.k, &pair.w_true, &config)?;
    print!("{}", result.report.steps_csv());
    println!("status: {:?}", result.status);
    println!("residuals: F {:?}, K {:?}", result.report.residual_f, result.report.residual_k);
    println!("delta_final: {}", result.report.delta_final);
    println!("wall: {:.0} ms", result.report.wall_ms);
    Ok(())
}
