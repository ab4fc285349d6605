use crate::error::{Error, Result};

use super::SPOKE_LENGTH_MM;

/// Top-curve fit, degree 8, lowest order first.
const TOP_COEFFICIENTS: [f64; 9] = [
    10.731,
    -0.8865,
    0.10641,
    -0.0054192,
    0.00015706,
    -2.4846e-06,
    2.1164e-08,
    -9.1524e-11,
    1.5803e-13,
];

/// Bottom-curve fit, degree 4, lowest order first.
const BOTTOM_COEFFICIENTS: [f64; 5] = [0.029891, 0.31518, 0.0052969, -0.00010414, 3.5481e-07];

/// Polynomial in x (mm) with coefficients stored lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialCurve {
    coefficients: Vec<f64>,
}

impl PolynomialCurve {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Domain("polynomial needs at least one coefficient".into()));
        }
        Ok(Self { coefficients })
    }

    /// Upper spoke surface of the reference design.
    pub fn reference_top() -> Self {
        Self {
            coefficients: TOP_COEFFICIENTS.to_vec(),
        }
    }

    /// Lower spoke surface of the reference design.
    pub fn reference_bottom() -> Self {
        Self {
            coefficients: BOTTOM_COEFFICIENTS.to_vec(),
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Evaluates the polynomial with Horner's scheme. `x` must lie on the
    /// spoke, `[0, 108]` mm.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=SPOKE_LENGTH_MM).contains(&x) {
            return Err(Error::Domain(format!(
                "x = {x} mm outside [0, {SPOKE_LENGTH_MM}]"
            )));
        }
        Ok(self.horner(x))
    }

    pub(crate) fn horner(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * x + c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power_sum(coefficients: &[f64], x: f64) -> f64 {
        coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| c * x.powi(i as i32))
            .sum()
    }

    #[test]
    fn reference_intercepts_are_exact() {
        assert_eq!(PolynomialCurve::reference_top().eval(0.0).unwrap(), 10.731);
        assert_eq!(
            PolynomialCurve::reference_bottom().eval(0.0).unwrap(),
            0.029891
        );
    }

    #[test]
    fn degrees_match_fits() {
        assert_eq!(PolynomialCurve::reference_top().degree(), 8);
        assert_eq!(PolynomialCurve::reference_bottom().degree(), 4);
    }

    #[test]
    fn identity_line() {
        let p = PolynomialCurve::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(p.eval(5.0).unwrap(), 5.0);
    }

    #[test]
    fn horner_matches_power_sum() {
        let top = PolynomialCurve::reference_top();
        // Frozen from an exact rational power sum of the stored coefficients at x = 54.
        let frozen = 28.112798629992042;
        let direct = power_sum(top.coefficients(), 54.0);
        assert!((direct - frozen).abs() < 1e-9, "oracle drifted: {direct}");
        assert!((top.eval(54.0).unwrap() - direct).abs() < 1e-10);
        for i in 0..=108 {
            let x = i as f64;
            let a = top.eval(x).unwrap();
            let b = power_sum(top.coefficients(), x);
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn out_of_domain() {
        let top = PolynomialCurve::reference_top();
        assert!(matches!(top.eval(-0.1), Err(Error::Domain(_))));
        assert!(matches!(top.eval(108.5), Err(Error::Domain(_))));
        assert!(matches!(top.eval(f64::NAN), Err(Error::Domain(_))));
    }
}
