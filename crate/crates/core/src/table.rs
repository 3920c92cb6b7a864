//! Tabulated models with monotone cubic (Fritsch–Carlson) interpolation.

use crate::error::{Error, Result};
use crate::hamiltonian::{CoefficientBundle, DerivativeBundle, Domain, TwoLevelModel};

/// Shape-preserving piecewise cubic Hermite interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Needs at least 3 strictly increasing, finite knots.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() < 3 {
            return Err(Error::Config(format!(
                "table needs >= 3 knots of equal length, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Config("table values must be finite".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("table lambda values must be strictly increasing".into()));
        }
        let slopes = pchip_slopes(&x, &y);
        Ok(Self { x, y, slopes })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn segment(&self, t: f64) -> usize {
        // index k with x[k] <= t <= x[k+1], clamped to the end segments
        let k = self.x.partition_point(|&v| v <= t);
        k.saturating_sub(1).min(self.x.len() - 2)
    }

    /// Value and first derivative at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let k = self.segment(t);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (y0, y1) = (self.y[k], self.y[k + 1]);
        let (m0, m1) = (self.slopes[k] * h, self.slopes[k + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * m1;
        let deriv = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * m1)
            / h;
        (value, deriv)
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let sec: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
    let mut m = vec![0.0; n];
    for k in 1..n - 1 {
        if sec[k - 1] * sec[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / sec[k - 1] + w2 / sec[k]);
        }
    }
    m[0] = end_slope(h[0], h[1], sec[0], sec[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], sec[n - 2], sec[n - 3]);
    m
}

// one-sided three-point estimate, limited to keep monotonicity
fn end_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d.signum() != s0.signum() || s0 == 0.0 {
        0.0
    } else if s0.signum() != s1.signum() && d.abs() > 3.0 * s0.abs() {
        3.0 * s0
    } else {
        d
    }
}

/// Coefficients given on a λ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TableModel {
    omega0: MonotoneCubic,
    delta: MonotoneCubic,
    gamma: MonotoneCubic,
    domain: Domain,
}

impl TableModel {
    /// `domain` defaults to the table's λ range and may not exceed it.
    pub fn new(
        lambda: Vec<f64>,
        omega0: Vec<f64>,
        delta: Vec<f64>,
        gamma: Vec<f64>,
        domain: Option<Domain>,
    ) -> Result<Self> {
        let omega0 = MonotoneCubic::new(lambda.clone(), omega0)?;
        let delta = MonotoneCubic::new(lambda.clone(), delta)?;
        let gamma = MonotoneCubic::new(lambda, gamma)?;
        let (lo, hi) = omega0.range();
        let domain = match domain {
            None => Domain::new(lo, hi)?,
            Some(d) if d.lo >= lo && d.hi <= hi => d,
            Some(d) => {
                return Err(Error::Config(format!(
                    "domain [{}, {}] exceeds the table range [{lo}, {hi}]",
                    d.lo, d.hi
                )))
            }
        };
        Ok(Self {
            omega0,
            delta,
            gamma,
            domain,
        })
    }
}

impl TwoLevelModel for TableModel {
    fn name(&self) -> &str {
        "custom-table"
    }
    fn domain(&self) -> Domain {
        self.domain
    }
    fn coefficients(&self, lambda: f64) -> CoefficientBundle {
        CoefficientBundle::new(
            self.omega0.eval(lambda).0,
            self.delta.eval(lambda).0,
            self.gamma.eval(lambda).0,
        )
    }
    fn analytic_derivatives(&self, lambda: f64) -> Option<DerivativeBundle> {
        Some(DerivativeBundle::new(
            self.omega0.eval(lambda).1,
            self.delta.eval(lambda).1,
            self.gamma.eval(lambda).1,
        ))
    }
}
