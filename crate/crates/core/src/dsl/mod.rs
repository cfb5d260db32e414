//! Perturbation expressions in `x`, `y` and `pi` with `+ - * / ^`,
//! `sin` and `cos`.
//!
//! ```
//! use cylinder_kam::dsl::parse;
//! let e = parse("0.1*sin(2*pi*3*x)/(2*pi*3)^2").unwrap();
//! assert!((e.eval(1.0 / 12.0, 0.0) - 2.8145e-4).abs() < 1e-7);
//! ```

mod parser;

use std::fmt;

use crate::error::{Error, Result};
use crate::funcspace::{CylinderFunction, GridSpec};

pub use parser::{parse, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
}

/// Expression tree.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Y,
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Y => y,
            Expr::Pi => std::f64::consts::PI,
            Expr::Neg(e) => -e.eval(x, y),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x, y), b.eval(x, y));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
            Expr::Pow(e, n) => e.eval(x, y).powi(*n as i32),
            Expr::Call(Func::Sin, e) => e.eval(x, y).sin(),
            Expr::Call(Func::Cos, e) => e.eval(x, y).cos(),
        }
    }

    /// True if the tree mentions neither `x` nor `y`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Pi => true,
            Expr::X | Expr::Y => false,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.is_constant(),
            Expr::Bin(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn mentions_x(&self) -> bool {
        match self {
            Expr::X => true,
            Expr::Num(_) | Expr::Pi | Expr::Y => false,
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Call(_, e) => e.mentions_x(),
            Expr::Bin(_, a, b) => a.mentions_x() || b.mentions_x(),
        }
    }
}

impl fmt::Display for Expr {
    /// Fully parenthesised; parses back to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{:?}` keeps a decimal point and round-trips exactly
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::X => f.write_str("x"),
            Expr::Y => f.write_str("y"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Pow(e, n) => write!(f, "({e}^{n})"),
            Expr::Call(Func::Sin, e) => write!(f, "sin({e})"),
            Expr::Call(Func::Cos, e) => write!(f, "cos({e})"),
        }
    }
}

/// Periodicity handling in [`lower_to_function`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Periodicity {
    /// A gap above `1e-9` is an error.
    Strict,
    /// A gap above `1e-9` is logged.
    Lenient,
}

const AUDIT_POINTS: usize = 32;
const AUDIT_TOL: f64 = 1e-9;

/// Largest `|e(0, y) - e(1, y)|` over 32 equispaced `y` in the grid interval,
/// with the `y` where it occurs.
pub fn periodicity_gap(expr: &Expr, grid: &GridSpec) -> (f64, f64) {
    let iv = grid.interval();
    (0..AUDIT_POINTS)
        .map(|k| {
            let y = iv.lo() + iv.width() * k as f64 / (AUDIT_POINTS - 1) as f64;
            ((expr.eval(0.0, y) - expr.eval(1.0, y)).abs(), y)
        })
        .fold((0.0, iv.lo()), |a, b| if b.0 > a.0 { b } else { a })
}

/// Fits the expression on `grid` after a periodicity audit in `x`.
pub fn lower_to_function(expr: &Expr, grid: GridSpec, mode: Periodicity) -> Result<CylinderFunction> {
    let (gap, y) = periodicity_gap(expr, &grid);
    if !(gap <= AUDIT_TOL) {
        match mode {
            Periodicity::Strict => return Err(Error::Periodicity { y, gap }),
            Periodicity::Lenient => log::warn!("expression {expr} is not 1-periodic in x: gap {gap:e} at y = {y}"),
        }
    }
    CylinderFunction::fit(grid, |x, y| expr.eval(x, y))
}

/// Expressions exercised by the round-trip and evaluator tests.
pub const BUNDLED: &[&str] = &[
    "0",
    "x + y",
    "0.1*sin(2*pi*3*x)/ (2*pi*3)^2",
    "sin(2*pi*x)*y",
    "-cos(2*pi*x)^2 + 0.5",
    "1e-3*(sin(2*pi*x) + 0.5*cos(4*pi*x)*y^2)",
    "-(-y)^3 - -x",
    "y/2 - 3*y^2/(1+1)",
    "cos(sin(2*pi*x) * pi) * (y - 0.25)",
    "2^10 * 1e-4 * sin(2*pi*(x - y))",
];
