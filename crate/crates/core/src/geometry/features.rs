use serde::{Deserialize, Serialize};

use super::{DesignGenotype, SpokeProfile, SPOKE_LENGTH_MM};

/// Number of surrogate input features.
pub const FEATURE_COUNT: usize = 19;

/// Number of equidistant thickness stations.
pub const THICKNESS_STATIONS: usize = 12;

/// Surrogate inputs: bottom knot offsets, 12 station thicknesses, the
/// minimum thickness and its position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub bottom_knot_y: [f64; 5],
    pub thickness_12: [f64; THICKNESS_STATIONS],
    pub d_min: f64,
    pub pd_min: f64,
}

impl FeatureVector {
    /// Flattened in dataset column order: `b1..b5, t1..t12, dmin, pdmin`.
    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        let mut out = [0.0; FEATURE_COUNT];
        out[..5].copy_from_slice(&self.bottom_knot_y);
        out[5..17].copy_from_slice(&self.thickness_12);
        out[17] = self.d_min;
        out[18] = self.pd_min;
        out
    }

    pub fn from_array(values: &[f64; FEATURE_COUNT]) -> Self {
        let mut bottom_knot_y = [0.0; 5];
        let mut thickness_12 = [0.0; THICKNESS_STATIONS];
        bottom_knot_y.copy_from_slice(&values[..5]);
        thickness_12.copy_from_slice(&values[5..17]);
        Self {
            bottom_knot_y,
            thickness_12,
            d_min: values[17],
            pd_min: values[18],
        }
    }

    pub fn names() -> [String; FEATURE_COUNT] {
        std::array::from_fn(|i| match i {
            0..=4 => format!("b{}", i + 1),
            5..=16 => format!("t{}", i - 4),
            17 => "dmin".to_string(),
            _ => "pdmin".to_string(),
        })
    }
}

/// Station abscissae `i * 108 / 11`, both ends included.
pub(crate) fn station_x() -> [f64; THICKNESS_STATIONS] {
    std::array::from_fn(|i| i as f64 * SPOKE_LENGTH_MM / (THICKNESS_STATIONS - 1) as f64)
}

pub fn extract_features(profile: &SpokeProfile, genotype: &DesignGenotype) -> FeatureVector {
    let x = profile.x();
    let t = profile.thickness();

    let thickness_12 = station_x().map(|xs| interpolate(x, &t, xs));

    let (mut i_min, mut d_min) = (0, t[0]);
    for (i, &v) in t.iter().enumerate().skip(1) {
        if v < d_min {
            d_min = v;
            i_min = i;
        }
    }

    FeatureVector {
        bottom_knot_y: genotype.bottom_offsets,
        thickness_12,
        d_min,
        pd_min: x[i_min],
    }
}

fn interpolate(x: &[f64], y: &[f64], at: f64) -> f64 {
    let j = x.partition_point(|&v| v <= at);
    if j == 0 {
        return y[0];
    }
    if j >= x.len() {
        return y[x.len() - 1];
    }
    let (x0, x1) = (x[j - 1], x[j]);
    let s = (at - x0) / (x1 - x0);
    y[j - 1] + s * (y[j] - y[j - 1])
}
