//! Constructive simultaneous linearization of commuting cylinder maps.
//!
//! A pair `F = U0 + f`, `K = T_alpha + k` of commuting diffeomorphisms of
//! `T x I` (twist map plus perturbation, rigid translation plus
//! perturbation) is driven to `(U0, T_alpha)` by a Nash–Moser style
//! iteration: solve the small-divisor equation for `K`, smooth, conjugate,
//! shrink the domain, repeat.
//!
//! Functions on the cylinder are stored spectrally, Fourier in the angle
//! `x` and Chebyshev in the action `y` (see [`funcspace`]). The remaining
//! modules build on that representation:
//!
//! * [`diophantine`] small divisors and the constants derived from `(sigma, tau)`
//! * [`cohomology`] the operators `Delta_alpha`, `Delta_U0` and the exact solver
//! * [`smoothing`] the operators `S_N`, `R_N` and their measured constants
//! * [`maps`] map algebra, near-identity inversion, conjugation, reduction
//! * [`kam`] the inductive step and the full iteration
//! * [`diagnostics`] hypothesis checks, phase portraits, the 2-torus counterexample
//! * [`dsl`] perturbation expressions such as `0.1*sin(2*pi*3*x)/(2*pi*3)^2`
//! * [`cli`] JSON-configured batch runs used by the `cylkam` binary

pub mod cli;
pub mod cohomology;
pub mod corpus;
pub mod diagnostics;
pub mod diophantine;
pub mod dsl;
pub mod error;
pub mod funcspace;
pub mod kam;
pub mod maps;
pub mod smoothing;

pub use error::{Error, Result};
pub use funcspace::{CylinderFunction, GridSpec, Interval, VectorFunction};

/// `(sqrt(5) - 1) / 2`.
pub const GOLDEN: f64 = 0.618_033_988_749_894_8;
