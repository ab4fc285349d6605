use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{DesignGenotype, Pchip, PolynomialCurve, KNOT_X, SAMPLE_COUNT, SPOKE_LENGTH_MM};

/// Relative area deviation allowed between a generated profile and the base.
pub const AREA_TOLERANCE: f64 = 1e-3;

/// Uniform top-curve shift applied per area-correction step, mm.
pub const AREA_STEP_MM: f64 = 1e-3;

/// Cap on area-correction steps (20 mm of total shift).
pub const MAX_AREA_ITERATIONS: usize = 20_000;

/// Generated profiles thinner than this anywhere are rejected, mm.
pub const MIN_THICKNESS_MM: f64 = 0.5;

/// Sampled top and bottom spoke curves on `[0, 108]` mm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpokeProfile {
    pub design_id: String,
    x: Vec<f64>,
    y_top: Vec<f64>,
    y_bottom: Vec<f64>,
}

/// Result of [`generate_profile`].
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedProfile {
    pub profile: SpokeProfile,
    /// Signed number of [`AREA_STEP_MM`] steps applied to the top curve.
    pub shift_steps: i64,
    /// Area of the perturbed profile before correction, mm².
    pub area_before: f64,
}

impl GeneratedProfile {
    pub fn shift_mm(&self) -> f64 {
        self.shift_steps as f64 * AREA_STEP_MM
    }
}

/// The 150 equidistant abscissae on `[0, 108]` mm.
pub fn sample_abscissae() -> Vec<f64> {
    let last = (SAMPLE_COUNT - 1) as f64;
    (0..SAMPLE_COUNT)
        .map(|i| i as f64 * SPOKE_LENGTH_MM / last)
        .collect()
}

/// The reference spoke sampled from its polynomial fits.
pub fn base_profile() -> SpokeProfile {
    let top = PolynomialCurve::reference_top();
    let bottom = PolynomialCurve::reference_bottom();
    let x = sample_abscissae();
    let y_top = x.iter().map(|&v| top.horner(v)).collect();
    let y_bottom = x.iter().map(|&v| bottom.horner(v)).collect();
    SpokeProfile::new("BASE", x, y_top, y_bottom).expect("reference profile is valid")
}

impl SpokeProfile {
    pub fn new(
        design_id: impl Into<String>,
        x: Vec<f64>,
        y_top: Vec<f64>,
        y_bottom: Vec<f64>,
    ) -> Result<Self> {
        let profile = Self {
            design_id: design_id.into(),
            x,
            y_top,
            y_bottom,
        };
        profile.validate()?;
        Ok(profile)
    }

    fn validate(&self) -> Result<()> {
        let n = self.x.len();
        if n != SAMPLE_COUNT || self.y_top.len() != n || self.y_bottom.len() != n {
            return Err(Error::Domain(format!(
                "profile needs {SAMPLE_COUNT} samples per curve, got x={}, top={}, bottom={}",
                n,
                self.y_top.len(),
                self.y_bottom.len()
            )));
        }
        if self.x[0] != 0.0 || self.x[n - 1] != SPOKE_LENGTH_MM {
            return Err(Error::Domain(format!(
                "profile must span [0, {SPOKE_LENGTH_MM}] mm, got [{}, {}]",
                self.x[0],
                self.x[n - 1]
            )));
        }
        if self.x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("profile abscissae must increase strictly".into()));
        }
        if self.y_top.iter().chain(&self.y_bottom).any(|v| !v.is_finite()) {
            return Err(Error::Domain("profile ordinates must be finite".into()));
        }
        if let Some(i) = self.thickness().iter().position(|&t| t <= 0.0) {
            return Err(Error::Infeasible(format!(
                "{}: non-positive thickness at x = {} mm",
                self.design_id, self.x[i]
            )));
        }
        Ok(())
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y_top(&self) -> &[f64] {
        &self.y_top
    }

    pub fn y_bottom(&self) -> &[f64] {
        &self.y_bottom
    }

    pub fn thickness(&self) -> Vec<f64> {
        self.y_top
            .iter()
            .zip(&self.y_bottom)
            .map(|(t, b)| t - b)
            .collect()
    }

    pub fn min_thickness(&self) -> f64 {
        self.thickness().into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn with_id(mut self, design_id: impl Into<String>) -> Self {
        self.design_id = design_id.into();
        self
    }
}

/// Trapezoidal area between the curves, mm².
pub fn profile_area(profile: &SpokeProfile) -> f64 {
    trapezoid(profile.x(), &profile.thickness())
}

pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Perturbs `base` with PCHIP knot offsets, then shifts the top curve in
/// 0.001 mm steps until the area is within 0.1 % of the base area.
pub fn generate_profile(base: &SpokeProfile, genotype: &DesignGenotype) -> Result<GeneratedProfile> {
    genotype.validate()?;
    let top_fit = Pchip::fit(&KNOT_X, &genotype.top_offsets)?;
    let bottom_fit = Pchip::fit(&KNOT_X, &genotype.bottom_offsets)?;
    let top_delta = top_fit.eval_many(base.x())?;
    let bottom_delta = bottom_fit.eval_many(base.x())?;

    let y_top: Vec<f64> = base.y_top.iter().zip(&top_delta).map(|(y, d)| y + d).collect();
    let y_bottom: Vec<f64> = base
        .y_bottom
        .iter()
        .zip(&bottom_delta)
        .map(|(y, d)| y + d)
        .collect();

    let target = profile_area(base);
    let thickness: Vec<f64> = y_top.iter().zip(&y_bottom).map(|(t, b)| t - b).collect();
    let area_before = trapezoid(base.x(), &thickness);
    let span = base.x[base.x.len() - 1] - base.x[0];

    // A uniform shift s of the top curve changes the trapezoid area by s * span.
    let relative_error = |k: i64| ((area_before + k as f64 * AREA_STEP_MM * span) - target).abs() / target;
    let mut k: i64 = 0;
    let mut iterations = 0;
    while relative_error(k) > AREA_TOLERANCE {
        if iterations >= MAX_AREA_ITERATIONS {
            return Err(Error::NonConvergence {
                iterations,
                relative_error: relative_error(k),
            });
        }
        let area = area_before + k as f64 * AREA_STEP_MM * span;
        k += if area > target { -1 } else { 1 };
        iterations += 1;
    }

    let shift = k as f64 * AREA_STEP_MM;
    let y_top: Vec<f64> = if k == 0 {
        y_top
    } else {
        y_top.into_iter().map(|y| y + shift).collect()
    };

    let min_t = y_top
        .iter()
        .zip(&y_bottom)
        .map(|(t, b)| t - b)
        .fold(f64::INFINITY, f64::min);
    if !(min_t > MIN_THICKNESS_MM) {
        return Err(Error::Infeasible(format!(
            "minimum thickness {min_t:.4} mm is below the {MIN_THICKNESS_MM} mm floor"
        )));
    }

    let profile = SpokeProfile {
        design_id: base.design_id.clone(),
        x: base.x.clone(),
        y_top,
        y_bottom,
    };
    let achieved = (profile_area(&profile) - target).abs() / target;
    if achieved > AREA_TOLERANCE {
        return Err(Error::NonConvergence {
            iterations,
            relative_error: achieved,
        });
    }
    Ok(GeneratedProfile {
        profile,
        shift_steps: k,
        area_before,
    })
}
