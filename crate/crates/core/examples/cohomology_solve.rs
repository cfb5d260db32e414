//! Solves `u∘T_alpha - u = phi - [phi]` for the test corpus and for a DSL
//! expression, and shows the resonance refusal for a rational rotation.

use cylinder_kam::cohomology::{delta_alpha, solve_delta_alpha};
use cylinder_kam::corpus::test_corpus;
use cylinder_kam::diophantine::DiophantineParams;
use cylinder_kam::dsl::{lower_to_function, parse, Periodicity};
use cylinder_kam::{GridSpec, Interval, GOLDEN};

fn main() -> cylinder_kam::Result<()> {
    let dio = DiophantineParams::estimated(GOLDEN, 10_000)?;
    let grid = GridSpec::new(32, 16, Interval::new(0.0, 1.0)?)?;
    println!("id   residual    ‖u‖_0/‖phi‖_rho");
    for p in test_corpus() {
        let sol = solve_delta_alpha(&p.fit(grid)?, &dio)?;
        println!("{:<4} {:.2e}    {:.4e}", p.id, sol.residual_c0, sol.bound_ratio.unwrap_or(f64::NAN));
    }

    let phi = lower_to_function(&parse("sin(2*pi*x)*y + 0.3*cos(2*pi*5*x) + 0.7")?, grid, Periodicity::Strict)?;
    let sol = solve_delta_alpha(&phi, &dio)?;
    let back = delta_alpha(&sol.u, GOLDEN).sub(&phi.zero_mean_part())?;
    println!(
        "expression: residual {:.2e}, mean of phi dropped: {:.3}",
        back.sup_norm(),
        phi.average_over_x().evaluate(0.0, 0.5)?
    );

    match DiophantineParams::new(0.25, 0.1, 1.0, 64) {
        Ok(_) => println!("1/4 unexpectedly accepted"),
        Err(e) => println!("1/4: {e}"),
    }
    Ok(())
}
