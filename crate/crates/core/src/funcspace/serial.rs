//! JSON form `{nx, ny, lo, hi, coeffs: [[re, im], ...]}`, row-major in `(m, j)`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CylinderFunction, GridSpec, Interval};

#[derive(Serialize, Deserialize)]
struct Wire {
    nx: usize,
    ny: usize,
    lo: f64,
    hi: f64,
    coeffs: Vec<[f64; 2]>,
}

impl Serialize for CylinderFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let g = self.grid();
        Wire {
            nx: g.nx(),
            ny: g.ny(),
            lo: g.interval().lo(),
            hi: g.interval().hi(),
            coeffs: self.coeffs().iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CylinderFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = Wire::deserialize(d)?;
        let iv = Interval::new(w.lo, w.hi).map_err(D::Error::custom)?;
        let grid = GridSpec::new(w.nx, w.ny, iv).map_err(D::Error::custom)?;
        let coeffs = w.coeffs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
        CylinderFunction::from_coeffs(grid, coeffs).map_err(D::Error::custom)
    }
}
