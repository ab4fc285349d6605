//! Deterministic analytic stand-in for the finite-element evaluation.
//!
//! Thicker spokes are stiffer, thin spots concentrate strain energy, and
//! curvature of the upper surface adds compliance. Raw responses are scaled
//! so the reference spoke reproduces [`REFERENCE_RECORD`] exactly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{profile_area, SpokeProfile};

use super::signal::{band_rms, fft_magnitudes, TimeSeries, BAND_HIGH_HZ, BAND_LOW_HZ};
use super::{PerformanceRecord, REFERENCE_RECORD};

/// Weight of the curvature measure in the shared compliance factor `1 + w·kappa`.
pub const CURVATURE_WEIGHT: f64 = 2.0;

const SIGNAL_RATE_HZ: f64 = 2_000.0;
const SIGNAL_DURATION_S: f64 = 1.0;
const ROTATION_CYCLES: usize = 20;
const BASE_NATURAL_FREQUENCY_HZ: f64 = 250.0;
const BURST_DECAY_PER_S: f64 = 40.0;
const MIN_NATURAL_FREQUENCY_HZ: f64 = 50.0;
const MAX_NATURAL_FREQUENCY_HZ: f64 = 950.0;

/// Integral shape measures of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummaries {
    /// Mean thickness, mm.
    pub t_mean: f64,
    /// Harmonic mean thickness, mm.
    pub t_harm: f64,
    /// Mean of `t⁻³`, mm⁻³.
    pub j_bend: f64,
    /// Integrated absolute curvature of the top curve.
    pub kappa: f64,
    /// Minimum thickness over mean thickness.
    pub r_min: f64,
}

pub fn proxy_geometry_summaries(profile: &SpokeProfile) -> Result<GeometrySummaries> {
    let x = profile.x();
    let t = profile.thickness();
    if let Some(i) = t.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Infeasible(format!(
            "{}: thickness {} at x = {} mm",
            profile.design_id, t[i], x[i]
        )));
    }
    let length = x[x.len() - 1] - x[0];
    let integrate = |f: &dyn Fn(usize) -> f64| -> f64 {
        (0..x.len() - 1)
            .map(|i| 0.5 * (x[i + 1] - x[i]) * (f(i) + f(i + 1)))
            .sum()
    };

    let t_mean = integrate(&|i| t[i]) / length;
    let t_harm = length / integrate(&|i| 1.0 / t[i]);
    let j_bend = integrate(&|i| t[i].powi(-3)) / length;
    let curvature = second_derivative(x, profile.y_top());
    let kappa = integrate(&|i| curvature[i].abs());
    let d_min = t.iter().copied().fold(f64::INFINITY, f64::min);

    Ok(GeometrySummaries {
        t_mean,
        t_harm,
        j_bend,
        kappa,
        r_min: d_min / t_mean,
    })
}

/// Three-point second differences; the end samples reuse the stencil of
/// their neighbour.
fn second_derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let interior = |i: usize| {
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        2.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0) / (h0 + h1)
    };
    let mut d = vec![0.0; n];
    if n < 3 {
        return d;
    }
    for (i, v) in d.iter_mut().enumerate().take(n - 1).skip(1) {
        *v = interior(i);
    }
    d[0] = d[1];
    d[n - 1] = d[n - 2];
    d
}

/// Uncalibrated proxy outputs. `vib_rms` is the band RMS of a signal
/// synthesized with unit amplitude scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawResponse {
    pub rfc: f64,
    pub rft: f64,
    pub sedc: f64,
    pub sedt: f64,
    pub vib_rms: f64,
}

impl RawResponse {
    fn to_array(self) -> [f64; 5] {
        [self.rfc, self.rft, self.sedc, self.sedt, self.vib_rms]
    }
}

/// Static part of the raw response, without the vibration term.
fn static_response(s: &GeometrySummaries) -> [f64; 4] {
    let compliance = 1.0 + CURVATURE_WEIGHT * s.kappa;
    let concentration = 1.0 / s.r_min;
    [
        1.0 / (s.j_bend * compliance),
        s.t_harm / compliance,
        concentration / compliance,
        concentration * concentration / compliance,
    ]
}

/// Scale factors that pin the reference spoke to [`REFERENCE_RECORD`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProxyCalibration {
    /// Raw response of the reference spoke.
    pub base_raw: RawResponse,
    /// Outputs the reference spoke must map to.
    pub reference: PerformanceRecord,
    /// Area of the reference spoke, mm².
    pub base_area: f64,
}

impl ProxyCalibration {
    /// Calibrates against `base` so that it evaluates to [`REFERENCE_RECORD`].
    pub fn from_base(base: &SpokeProfile) -> Result<Self> {
        Self::with_reference(base, REFERENCE_RECORD)
    }

    pub fn with_reference(base: &SpokeProfile, reference: PerformanceRecord) -> Result<Self> {
        reference.validate()?;
        let summaries = proxy_geometry_summaries(base)?;
        let [rfc, rft, sedc, sedt] = static_response(&summaries);
        let signal = synthesize(&summaries, rfc, rfc, 1.0)?;
        let vib_rms = band_rms(&fft_magnitudes(&signal.series), BAND_LOW_HZ, BAND_HIGH_HZ)?;
        if !(vib_rms > 0.0) {
            return Err(Error::Numerical("reference vibration band is empty".into()));
        }
        Ok(Self {
            base_raw: RawResponse {
                rfc,
                rft,
                sedc,
                sedt,
                vib_rms,
            },
            reference,
            base_area: profile_area(base),
        })
    }

    /// Multiplicative factor per output, `reference / raw(base)`.
    pub fn scale_factors(&self) -> [f64; 5] {
        let (r, b) = (self.reference.to_array(), self.base_raw.to_array());
        std::array::from_fn(|i| r[i] / b[i])
    }

    /// Amplitude scale of the synthesized vibration signal.
    pub fn amplitude_scale(&self) -> f64 {
        self.reference.vib_rms / self.base_raw.vib_rms
    }

    fn apply(&self, raw: &RawResponse) -> PerformanceRecord {
        // reference * (raw / base) keeps the reference spoke bit-exact.
        let (r, b, v) = (self.reference.to_array(), self.base_raw.to_array(), raw.to_array());
        PerformanceRecord::from_array_unchecked(std::array::from_fn(|i| r[i] * (v[i] / b[i])))
    }
}

struct Synthesized {
    series: TimeSeries,
    natural_frequency_hz: f64,
    clamped: bool,
}

fn synthesize(
    s: &GeometrySummaries,
    rfc_raw: f64,
    rfc_raw_base: f64,
    amplitude_scale: f64,
) -> Result<Synthesized> {
    let unclamped = BASE_NATURAL_FREQUENCY_HZ * (rfc_raw / rfc_raw_base).sqrt();
    let natural_frequency_hz = unclamped.clamp(MIN_NATURAL_FREQUENCY_HZ, MAX_NATURAL_FREQUENCY_HZ);
    let clamped = !(natural_frequency_hz == unclamped);
    let amplitude =
        amplitude_scale * (1.0 / s.r_min - 1.0 + 0.1) / (1.0 + CURVATURE_WEIGHT * s.kappa);

    let n = (SIGNAL_RATE_HZ * SIGNAL_DURATION_S).round() as usize;
    let period = n / ROTATION_CYCLES;
    let omega = 2.0 * PI * natural_frequency_hz;
    let mut samples = vec![0.0; n];
    for cycle in 0..ROTATION_CYCLES {
        let start = cycle * period;
        for (j, v) in samples.iter_mut().enumerate().skip(start) {
            let tau = (j - start) as f64 / SIGNAL_RATE_HZ;
            *v += amplitude * (-BURST_DECAY_PER_S * tau).exp() * (omega * tau).sin();
        }
    }
    Ok(Synthesized {
        series: TimeSeries::new(SIGNAL_RATE_HZ, samples)?,
        natural_frequency_hz,
        clamped,
    })
}

/// Mid-node vibration amplitude signal for `profile`: one second at 2 kHz,
/// a decaying burst at the start of each of 20 rotation cycles.
pub fn synthesize_vibration_signal(
    profile: &SpokeProfile,
    calibration: &ProxyCalibration,
) -> Result<TimeSeries> {
    let s = proxy_geometry_summaries(profile)?;
    let [rfc, ..] = static_response(&s);
    let out = synthesize(&s, rfc, calibration.base_raw.rfc, calibration.amplitude_scale())?;
    if out.clamped {
        log::warn!(
            "{}: natural frequency clamped to {} Hz",
            profile.design_id,
            out.natural_frequency_hz
        );
    }
    Ok(out.series)
}

/// Full proxy result with intermediate quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxyEvaluation {
    pub record: PerformanceRecord,
    pub raw: RawResponse,
    pub summaries: GeometrySummaries,
    pub natural_frequency_hz: f64,
    /// The burst frequency left (0, Nyquist) and was clamped to [50, 950] Hz.
    pub frequency_clamped: bool,
}

pub fn proxy_evaluate_detailed(
    profile: &SpokeProfile,
    calibration: &ProxyCalibration,
) -> Result<ProxyEvaluation> {
    let summaries = proxy_geometry_summaries(profile)?;
    let [rfc, rft, sedc, sedt] = static_response(&summaries);
    let signal = synthesize(&summaries, rfc, calibration.base_raw.rfc, 1.0)?;
    let vib_rms = band_rms(&fft_magnitudes(&signal.series), BAND_LOW_HZ, BAND_HIGH_HZ)?;
    let raw = RawResponse {
        rfc,
        rft,
        sedc,
        sedt,
        vib_rms,
    };
    let record = calibration.apply(&raw);
    record
        .validate()
        .map_err(|e| Error::Infeasible(format!("{}: {e}", profile.design_id)))?;
    if signal.clamped {
        log::warn!(
            "{}: natural frequency clamped to {} Hz",
            profile.design_id,
            signal.natural_frequency_hz
        );
    }
    Ok(ProxyEvaluation {
        record,
        raw,
        summaries,
        natural_frequency_hz: signal.natural_frequency_hz,
        frequency_clamped: signal.clamped,
    })
}

pub fn proxy_evaluate(profile: &SpokeProfile, calibration: &ProxyCalibration) -> Result<PerformanceRecord> {
    proxy_evaluate_detailed(profile, calibration).map(|e| e.record)
}
