//! Estimates `(sigma, tau)` for a few irrationals and prints the derived
//! exponents `rho`, `mu` and the solver constant.

use cylinder_kam::diophantine::{check_diophantine, estimate_constants, small_divisor, DiophantineParams};
use cylinder_kam::GOLDEN;

fn main() -> cylinder_kam::Result<()> {
    let alphas = [
        ("golden", GOLDEN),
        ("sqrt2 - 1", std::f64::consts::SQRT_2 - 1.0),
        ("e - 2", std::f64::consts::E - 2.0),
        ("pi - 3", std::f64::consts::PI - 3.0),
    ];
    println!("{:<10} {:>8} {:>8} {:>4} {:>4} {:>12}", "alpha", "sigma", "tau", "rho", "mu", "C");
    for (name, a) in alphas {
        let p = DiophantineParams::estimated(a, 10_000)?;
        println!("{name:<10} {:>8.4} {:>8.4} {:>4} {:>4} {:>12.3}", p.sigma, p.tau, p.rho, p.mu, p.lemma_constant);
    }

    // Fibonacci denominators give the record small divisors of the golden mean
    for m in [1, 2, 3, 5, 8, 13, 21, 34, 55, 89] {
        println!("m = {m:>3}: |e^(2 pi i m alpha) - 1| = {:.6}", small_divisor(GOLDEN, m)?);
    }

    let (sigma, tau) = estimate_constants(GOLDEN, 10_000)?;
    let c = check_diophantine(GOLDEN, sigma * 1.5, tau, 10_000);
    println!("1.5 sigma first violated at m = {:?}", c.first_violation);

    match estimate_constants(1.0 / 3.0, 1000) {
        Ok(_) => println!("1/3 unexpectedly accepted"),
        Err(e) => println!("1/3: {e}"),
    }
    Ok(())
}
