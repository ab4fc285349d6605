//! Spoke geometry: reference polynomials, PCHIP perturbation, the
//! area-equivalence loop and feature extraction.

mod features;
mod genotype;
pub mod io;
mod pchip;
mod polynomial;
mod profile;

pub use features::{extract_features, FeatureVector, FEATURE_COUNT, THICKNESS_STATIONS};
pub use genotype::{DesignGenotype, BOTTOM_OFFSET_LIMIT, GENOTYPE_DIM, KNOT_X, TOP_OFFSET_LIMIT};
pub use pchip::Pchip;
pub use polynomial::PolynomialCurve;
pub use profile::{
    base_profile, generate_profile, profile_area, sample_abscissae, GeneratedProfile, SpokeProfile,
    AREA_STEP_MM, AREA_TOLERANCE, MAX_AREA_ITERATIONS, MIN_THICKNESS_MM,
};

/// Spoke length along x, in mm.
pub const SPOKE_LENGTH_MM: f64 = 108.0;

/// Number of equidistant samples describing each curve.
pub const SAMPLE_COUNT: usize = 150;
