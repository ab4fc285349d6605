use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Abscissae of the five PCHIP knots, shared by every genotype.
pub const KNOT_X: [f64; 5] = [0.0, 27.0, 54.0, 81.0, 108.0];

/// Half-width of the admissible top-knot offsets, mm.
pub const TOP_OFFSET_LIMIT: f64 = 4.0;

/// Half-width of the admissible bottom-knot offsets, mm.
pub const BOTTOM_OFFSET_LIMIT: f64 = 2.0;

/// Length of the flattened genotype: five top offsets then five bottom.
pub const GENOTYPE_DIM: usize = 10;

/// Knot offsets that perturb the reference spoke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignGenotype {
    pub top_offsets: [f64; 5],
    pub bottom_offsets: [f64; 5],
}

impl DesignGenotype {
    pub fn new(top_offsets: [f64; 5], bottom_offsets: [f64; 5]) -> Result<Self> {
        let g = Self {
            top_offsets,
            bottom_offsets,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn zero() -> Self {
        Self {
            top_offsets: [0.0; 5],
            bottom_offsets: [0.0; 5],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_range = |v: &f64, limit: f64| v.is_finite() && v.abs() <= limit;
        if !self.top_offsets.iter().all(|v| in_range(v, TOP_OFFSET_LIMIT)) {
            return Err(Error::Domain(format!(
                "top offsets {:?} outside ±{TOP_OFFSET_LIMIT} mm",
                self.top_offsets
            )));
        }
        if !self.bottom_offsets.iter().all(|v| in_range(v, BOTTOM_OFFSET_LIMIT)) {
            return Err(Error::Domain(format!(
                "bottom offsets {:?} outside ±{BOTTOM_OFFSET_LIMIT} mm",
                self.bottom_offsets
            )));
        }
        Ok(())
    }

    /// Box bounds of the flattened genotype, `(lower, upper)` per coordinate.
    pub fn bounds() -> Vec<(f64, f64)> {
        let mut b = vec![(-TOP_OFFSET_LIMIT, TOP_OFFSET_LIMIT); 5];
        b.extend([(-BOTTOM_OFFSET_LIMIT, BOTTOM_OFFSET_LIMIT); 5]);
        b
    }

    pub fn to_array(&self) -> [f64; GENOTYPE_DIM] {
        let mut out = [0.0; GENOTYPE_DIM];
        out[..5].copy_from_slice(&self.top_offsets);
        out[5..].copy_from_slice(&self.bottom_offsets);
        out
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        if values.len() != GENOTYPE_DIM {
            return Err(Error::Domain(format!(
                "genotype needs {GENOTYPE_DIM} values, got {}",
                values.len()
            )));
        }
        let mut top = [0.0; 5];
        let mut bottom = [0.0; 5];
        top.copy_from_slice(&values[..5]);
        bottom.copy_from_slice(&values[5..]);
        Self::new(top, bottom)
    }

    /// Uniform draw over the genotype box; top offsets are drawn first, in
    /// knot order, then bottom offsets.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut top = [0.0; 5];
        let mut bottom = [0.0; 5];
        for v in &mut top {
            *v = rng.random_range(-TOP_OFFSET_LIMIT..=TOP_OFFSET_LIMIT);
        }
        for v in &mut bottom {
            *v = rng.random_range(-BOTTOM_OFFSET_LIMIT..=BOTTOM_OFFSET_LIMIT);
        }
        Self {
            top_offsets: top,
            bottom_offsets: bottom,
        }
    }
}
