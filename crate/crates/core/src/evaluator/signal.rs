//! Time series, radix-2 FFT magnitude spectra and band RMS.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Lower edge of the vibration scoring band, Hz.
pub const BAND_LOW_HZ: f64 = 100.0;

/// Upper edge of the vibration scoring band, Hz.
pub const BAND_HIGH_HZ: f64 = 470.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    sample_rate: f64,
    samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(sample_rate: f64, samples: Vec<f64>) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::Domain(format!("sample rate {sample_rate} must be positive")));
        }
        if samples.len() < 2 {
            return Err(Error::Domain("time series needs at least two samples".into()));
        }
        Ok(Self {
            sample_rate,
            samples,
        })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Writes `t_s,displacement_mm` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t_s", "displacement_mm"])?;
        for (i, v) in self.samples.iter().enumerate() {
            w.write_record([(i as f64 / self.sample_rate).to_string(), v.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<signal>", e))?;
        Ok(())
    }
}

/// One-sided magnitude spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
}

impl Spectrum {
    pub fn resolution(&self) -> f64 {
        self.frequencies.get(1).copied().unwrap_or(0.0)
    }

    /// Writes `f_hz,magnitude` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["f_hz", "magnitude"])?;
        for (f, m) in self.frequencies.iter().zip(&self.magnitudes) {
            w.write_record([f.to_string(), m.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<spectrum>", e))?;
        Ok(())
    }
}

/// In-place iterative radix-2 decimation-in-time FFT (forward, unnormalized).
/// The buffer length must be a power of two.
pub fn fft_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "FFT length {n} is not a power of two");
    if n < 2 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = -2.0 * PI / len as f64;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = Complex64::from_polar(1.0, step * k as f64);
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Full complex spectrum of `samples`, zero-padded to the next power of two.
pub fn padded_spectrum(samples: &[f64]) -> Vec<Complex64> {
    let padded = samples.len().next_power_of_two().max(2);
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    buf.resize(padded, Complex64::new(0.0, 0.0));
    fft_in_place(&mut buf);
    buf
}

/// One-sided magnitude spectrum. The series is zero-padded to the next power
/// of two; magnitudes are `|X_k| / N` for DC and `2 |X_k| / N` otherwise,
/// with `N` the unpadded length.
pub fn fft_magnitudes(series: &TimeSeries) -> Spectrum {
    let n = series.len() as f64;
    let spectrum = padded_spectrum(series.samples());
    let padded = spectrum.len();
    let bins = padded / 2 + 1;
    let df = series.sample_rate() / padded as f64;
    let frequencies = (0..bins).map(|k| k as f64 * df).collect();
    let magnitudes = spectrum[..bins]
        .iter()
        .enumerate()
        .map(|(k, c)| if k == 0 { c.norm() / n } else { 2.0 * c.norm() / n })
        .collect();
    Spectrum {
        frequencies,
        magnitudes,
    }
}

/// Root mean square of the magnitudes whose frequency lies in
/// `[f_lo, f_hi]`, both ends inclusive.
pub fn band_rms(spectrum: &Spectrum, f_lo: f64, f_hi: f64) -> Result<f64> {
    let (sum, count) = spectrum
        .frequencies
        .iter()
        .zip(&spectrum.magnitudes)
        .filter(|(f, _)| **f >= f_lo && **f <= f_hi)
        .fold((0.0, 0usize), |(s, c), (_, m)| (s + m * m, c + 1));
    if count == 0 {
        return Err(Error::Domain(format!(
            "no spectrum bins in [{f_lo}, {f_hi}] Hz"
        )));
    }
    Ok((sum / count as f64).sqrt())
}
