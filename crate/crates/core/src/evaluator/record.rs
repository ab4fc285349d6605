use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five performance outputs of a spoke design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Rfc,
    Rft,
    Sedc,
    Sedt,
    VibRms,
}

impl OutputKind {
    pub const ALL: [OutputKind; 5] = [
        OutputKind::Rfc,
        OutputKind::Rft,
        OutputKind::Sedc,
        OutputKind::Sedt,
        OutputKind::VibRms,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OutputKind::Rfc => "rfc",
            OutputKind::Rft => "rft",
            OutputKind::Sedc => "sedc",
            OutputKind::Sedt => "sedt",
            OutputKind::VibRms => "vib_rms",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for OutputKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OutputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OutputKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown output `{s}`")))
    }
}

/// Stiffness, durability and vibration outputs of one design.
///
/// Reaction forces are in N at 20 mm displacement, strain energy densities
/// in N/mm², `vib_rms` is the 100–470 Hz band RMS of the vibration spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRecord {
    pub rfc: f64,
    pub rft: f64,
    pub sedc: f64,
    pub sedt: f64,
    pub vib_rms: f64,
}

/// Outputs the proxy assigns to the reference spoke.
pub const REFERENCE_RECORD: PerformanceRecord = PerformanceRecord {
    rfc: 1_000.0,
    rft: 10_000.0,
    sedc: 0.10,
    sedt: 2.565,
    vib_rms: 2.4216,
};

impl PerformanceRecord {
    pub fn new(rfc: f64, rft: f64, sedc: f64, sedt: f64, vib_rms: f64) -> Result<Self> {
        let r = Self {
            rfc,
            rft,
            sedc,
            sedt,
            vib_rms,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.to_array();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Data(format!("non-finite performance value in {v:?}")));
        }
        if !(self.rfc > 0.0 && self.rft > 0.0 && self.vib_rms > 0.0) {
            return Err(Error::Data(format!(
                "rfc, rft and vib_rms must be positive, got {v:?}"
            )));
        }
        if self.sedc < 0.0 || self.sedt < 0.0 {
            return Err(Error::Data(format!(
                "strain energy densities must be non-negative, got {v:?}"
            )));
        }
        Ok(())
    }

    pub fn get(&self, kind: OutputKind) -> f64 {
        match kind {
            OutputKind::Rfc => self.rfc,
            OutputKind::Rft => self.rft,
            OutputKind::Sedc => self.sedc,
            OutputKind::Sedt => self.sedt,
            OutputKind::VibRms => self.vib_rms,
        }
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.rfc, self.rft, self.sedc, self.sedt, self.vib_rms]
    }

    /// Builds a record without validating it; used for surrogate predictions
    /// which may stray outside the physical ranges.
    pub fn from_array_unchecked(v: [f64; 5]) -> Self {
        Self {
            rfc: v[0],
            rft: v[1],
            sedc: v[2],
            sedt: v[3],
            vib_rms: v[4],
        }
    }

    /// Percentage change of each output relative to `base`.
    pub fn improvement_over(&self, base: &PerformanceRecord) -> [f64; 5] {
        let (a, b) = (self.to_array(), base.to_array());
        std::array::from_fn(|i| 100.0 * (a[i] - b[i]) / b[i])
    }
}
