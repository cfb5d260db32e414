//! Deterministic test functions: sums of `cos(2 pi m x + phase) P(y)` with
//! low-degree polynomials `P`.
//!
//! Three families are bundled. [`test_corpus`] is the ten-member corpus used
//! by the solver and norm checks, [`smooth_corpus`] has geometrically
//! decaying spectra, and [`dilated_corpus`] holds templates whose x
//! frequencies scale with the smoothing parameter `N`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::funcspace::{CylinderFunction, GridSpec, VectorFunction};

/// One term `cos(2 pi freq x + phase) * sum_k poly[k] y^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub freq: f64,
    pub phase: f64,
    pub poly: Vec<f64>,
}

/// A trigonometric-polynomial test function with a stable id.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    pub id: String,
    pub terms: Vec<Term>,
}

impl TrigPoly {
    /// Closed-form value; independent of the spectral machinery.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let p = t.poly.iter().rev().fold(0.0, |acc, c| acc * y + c);
                (2.0 * PI * t.freq * x + t.phase).cos() * p
            })
            .sum()
    }

    /// Frequencies multiplied by `n`; every product must be an integer.
    pub fn dilate(&self, n: f64) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let f = t.freq * n;
                if (f - f.round()).abs() > 1e-9 {
                    return Err(Error::InvalidArgument(format!(
                        "dilating {} by {n} gives non-integer frequency {f}",
                        self.id
                    )));
                }
                Ok(Term { freq: f.round(), ..t.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { id: self.id.clone(), terms })
    }

    pub fn fit(&self, grid: GridSpec) -> Result<CylinderFunction> {
        CylinderFunction::fit(grid, |x, y| self.eval(x, y))
    }
}

/// A family of test functions, possibly depending on the smoothing scale.
pub trait Corpus {
    fn members(&self, grid: GridSpec, n: f64) -> Result<Vec<(String, CylinderFunction)>>;
}

/// Members independent of `n`.
pub struct FixedCorpus(pub Vec<TrigPoly>);

impl Corpus for FixedCorpus {
    fn members(&self, grid: GridSpec, _n: f64) -> Result<Vec<(String, CylinderFunction)>> {
        self.0.iter().map(|p| Ok((p.id.clone(), p.fit(grid)?))).collect()
    }
}

/// Templates whose frequencies are multiplied by `n`.
pub struct DilatedCorpus(pub Vec<TrigPoly>);

impl Corpus for DilatedCorpus {
    fn members(&self, grid: GridSpec, n: f64) -> Result<Vec<(String, CylinderFunction)>> {
        self.0.iter().map(|p| Ok((p.id.clone(), p.dilate(n)?.fit(grid)?))).collect()
    }
}

fn random_poly(rng: &mut ChaCha8Rng, degree: usize) -> Vec<f64> {
    (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Ten members with modes `|m| <= 5` and cubic y-dependence.
pub fn test_corpus() -> Vec<TrigPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_517);
    (0..10)
        .map(|i| {
            let n_terms = 1 + i % 3;
            let mut terms: Vec<Term> = (0..n_terms)
                .map(|_| Term {
                    freq: rng.gen_range(0..=5) as f64,
                    phase: rng.gen_range(0.0..2.0 * PI),
                    poly: random_poly(&mut rng, 3),
                })
                .collect();
            // keep at least one oscillating term
            if terms.iter().all(|t| t.freq == 0.0) {
                terms[0].freq = 1.0 + i as f64 % 5.0;
            }
            TrigPoly { id: format!("c{i}"), terms }
        })
        .collect()
}

/// Ten members with amplitudes `0.35^m` for `m = 0..=20`.
pub fn smooth_corpus() -> Vec<TrigPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(77_031);
    (0..10)
        .map(|i| {
            let terms = (0..=20)
                .map(|m| {
                    let amp = 0.35_f64.powi(m);
                    let poly = random_poly(&mut rng, 2).into_iter().map(|c| c * amp).collect();
                    Term { freq: m as f64, phase: rng.gen_range(0.0..2.0 * PI), poly }
                })
                .collect();
            TrigPoly { id: format!("s{i}"), terms }
        })
        .collect()
}

/// Ten templates with frequencies in `{1/4, 1/2, ..., 7/4}`; dilating by
/// `N` a multiple of 4 gives integer modes spread over the cutoff band.
pub fn dilated_corpus() -> Vec<TrigPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(4_1_2);
    (0..10)
        .map(|i| {
            let n_terms = 1 + i % 3;
            let terms = (0..n_terms)
                .map(|_| Term {
                    freq: rng.gen_range(1..=7) as f64 / 4.0,
                    phase: rng.gen_range(0.0..2.0 * PI),
                    poly: random_poly(&mut rng, 2),
                })
                .collect();
            TrigPoly { id: format!("d{i}"), terms }
        })
        .collect()
}

/// Three members `sum_{m < 64} m^-(l + 3/2) cos(2 pi m x + phase_m) (1 + c_m y)`,
/// in `C^l` and not much smoother; `‖R_N f‖_0` decays like `N^-(l + 1/2)`.
pub fn finite_regularity_corpus(l: f64, seed: u64) -> Vec<TrigPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..3)
        .map(|i| TrigPoly {
            id: format!("r{l}_{i}"),
            terms: (1..64)
                .map(|m| {
                    let amp = (m as f64).powf(-(l + 1.5));
                    Term {
                        freq: m as f64,
                        phase: rng.gen_range(0.0..2.0 * PI),
                        poly: vec![amp, amp * rng.gen_range(-0.1..0.1)],
                    }
                })
                .collect(),
        })
        .collect()
}

/// Single-mode conjugacy generator
/// `(sin 2 pi x + y cos 2 pi x / 2, cos 2 pi x - y sin 2 pi x / 4)` scaled to
/// `‖h‖_1 = c1`.
pub fn conjugacy_generator(grid: GridSpec, c1: f64) -> Result<VectorFunction> {
    let raw = VectorFunction::fit(grid, |x, y| {
        let (s, c) = (2.0 * PI * x).sin_cos();
        (s + 0.5 * y * c, c - 0.25 * y * s)
    })?;
    Ok(raw.scale(c1 / raw.holder_norm(1.0)?))
}
