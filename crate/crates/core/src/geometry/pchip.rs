use crate::error::{Error, Result};

/// Piecewise cubic Hermite interpolant with Fritsch–Carlson derivative
/// estimates. Monotone knot data yields a monotone interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    pub fn fit(knot_x: &[f64], knot_y: &[f64]) -> Result<Self> {
        if knot_x.len() != knot_y.len() {
            return Err(Error::Domain(format!(
                "knot_x has {} entries but knot_y has {}",
                knot_x.len(),
                knot_y.len()
            )));
        }
        if knot_x.len() < 2 {
            return Err(Error::Domain("PCHIP needs at least two knots".into()));
        }
        if knot_x.iter().chain(knot_y).any(|v| !v.is_finite()) {
            return Err(Error::Domain("knots must be finite".into()));
        }
        if knot_x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("knot_x must be strictly increasing".into()));
        }

        let n = knot_x.len();
        let h: Vec<f64> = knot_x.windows(2).map(|w| w[1] - w[0]).collect();
        let secant: Vec<f64> = (0..n - 1)
            .map(|k| (knot_y[k + 1] - knot_y[k]) / h[k])
            .collect();

        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes[0] = secant[0];
            slopes[1] = secant[0];
        } else {
            for k in 1..n - 1 {
                let (m0, m1) = (secant[k - 1], secant[k]);
                if m0 * m1 <= 0.0 {
                    continue;
                }
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                slopes[k] = (w1 + w2) / (w1 / m0 + w2 / m1);
            }
            slopes[0] = end_slope(h[0], h[1], secant[0], secant[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], secant[n - 2], secant[n - 3]);
        }

        Ok(Self {
            x: knot_x.to_vec(),
            y: knot_y.to_vec(),
            slopes,
        })
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    /// Derivative estimates at the knots.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn span(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.span();
        if !(lo..=hi).contains(&x) {
            return Err(Error::Domain(format!(
                "x = {x} outside interpolation span [{lo}, {hi}]"
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    /// Evaluates at many abscissae; every one must lie inside the span.
    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    fn eval_unchecked(&self, x: f64) -> f64 {
        // Segment k covers [x_k, x_{k+1}); the last knot belongs to the final segment.
        let k = match self.x.partition_point(|&knot| knot <= x) {
            0 => 0,
            p => (p - 1).min(self.x.len() - 2),
        };
        let h = self.x[k + 1] - self.x[k];
        let t = (x - self.x[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * h * self.slopes[k] + h01 * self.y[k + 1] + h11 * h * self.slopes[k + 1]
    }
}

/// One-sided three-point end slope, clamped so the end segment keeps the
/// sign of its secant and does not overshoot next to an extremum.
fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() || m0 == 0.0 {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}
