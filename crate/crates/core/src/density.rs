//! Univariate densities as first-class values.
//!
//! A [`ScalarDensity`] is a support interval plus a log-density evaluator;
//! the log-density is the primitive and `pdf = exp(log_pdf)`, which keeps the
//! far tails meaningful on the verification grids. Families that have a
//! cheap analytic score also carry d/dx log f for the samplers.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::quad::{integrate, Interval, QuadError};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Normal density with the given mean and variance.
#[inline]
pub fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    normal_log_pdf(x, mean, var).exp()
}

#[inline]
pub fn normal_log_pdf(x: f64, mean: f64, var: f64) -> f64 {
    let z = x - mean;
    -0.5 * (LN_2PI + var.ln()) - z * z / (2.0 * var)
}

/// A univariate density: support, log-density, normalization status.
#[derive(Clone)]
pub struct ScalarDensity {
    support: Interval,
    log_pdf: RealFn,
    d_log_pdf: Option<RealFn>,
    normalized: bool,
    description: String,
}

impl std::fmt::Debug for ScalarDensity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarDensity")
            .field("support", &self.support)
            .field("normalized", &self.normalized)
            .field("description", &self.description)
            .finish()
    }
}

impl ScalarDensity {
    pub fn new(
        support: Interval,
        log_pdf: RealFn,
        normalized: bool,
        description: impl Into<String>,
    ) -> Self {
        Self { support, log_pdf, d_log_pdf: None, normalized, description: description.into() }
    }

    pub fn with_score(mut self, d_log_pdf: RealFn) -> Self {
        self.d_log_pdf = Some(d_log_pdf);
        self
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn log_pdf(&self, x: f64) -> f64 {
        if self.support.contains(x) {
            (self.log_pdf)(x)
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.log_pdf(x).exp()
    }

    /// d/dx of the density itself, f'(x) = f(x) * d/dx log f(x).
    ///
    /// Uses the registered analytic score when present, otherwise central
    /// differences on the log-density with step max(1e-6, 1e-6 |x|).
    pub fn pdf_derivative(&self, x: f64) -> f64 {
        if !self.support.contains(x) {
            return 0.0;
        }
        let score = match &self.d_log_pdf {
            Some(d) => d(x),
            None => {
                let h = 1e-6_f64.max(1e-6 * x.abs());
                ((self.log_pdf)(x + h) - (self.log_pdf)(x - h)) / (2.0 * h)
            }
        };
        let f = self.pdf(x);
        if f == 0.0 {
            0.0
        } else {
            f * score
        }
    }

    /// Quadrature check of the normalization claim; returns the integral.
    pub fn normalization_integral(&self, tol: f64) -> Result<f64, QuadError> {
        Ok(integrate(|x| self.pdf(x), self.support, tol, tol)?.value)
    }
}

/// Normal(mean, var).
pub fn normal(mean: f64, var: f64) -> ScalarDensity {
    assert!(var > 0.0, "variance must be positive");
    ScalarDensity::new(
        Interval::real_line(),
        Arc::new(move |x| normal_log_pdf(x, mean, var)),
        true,
        format!("normal(mean={mean}, var={var})"),
    )
    .with_score(Arc::new(move |x| -(x - mean) / var))
}

/// Laplace(location, scale): f(x) = exp(-|x-m|/s) / (2s).
pub fn laplace(location: f64, scale: f64) -> ScalarDensity {
    assert!(scale > 0.0, "scale must be positive");
    ScalarDensity::new(
        Interval::real_line(),
        Arc::new(move |x| -(x - location).abs() / scale - (2.0 * scale).ln()),
        true,
        format!("laplace(loc={location}, scale={scale})"),
    )
    .with_score(Arc::new(move |x| -(x - location).signum() / scale))
}

/// Cauchy C(location, scale): f(x) = s / (pi (s^2 + (x-m)^2)).
pub fn cauchy(location: f64, scale: f64) -> ScalarDensity {
    assert!(scale > 0.0, "scale must be positive");
    ScalarDensity::new(
        Interval::real_line(),
        Arc::new(move |x| {
            let z = x - location;
            scale.ln() - PI.ln() - (scale * scale + z * z).ln()
        }),
        true,
        format!("cauchy(loc={location}, scale={scale})"),
    )
    .with_score(Arc::new(move |x| {
        let z = x - location;
        -2.0 * z / (scale * scale + z * z)
    }))
}

pub fn cauchy_cdf(x: f64, location: f64, scale: f64) -> f64 {
    0.5 + ((x - location) / scale).atan() / PI
}

pub fn laplace_cdf(x: f64, location: f64, scale: f64) -> f64 {
    let z = (x - location) / scale;
    if z < 0.0 {
        0.5 * z.exp()
    } else {
        1.0 - 0.5 * (-z).exp()
    }
}

/// Exponential with the given rate, on (0, inf).
pub fn exponential(rate: f64) -> ScalarDensity {
    assert!(rate > 0.0, "rate must be positive");
    ScalarDensity::new(
        Interval::positive_half_line(),
        Arc::new(move |x| rate.ln() - rate * x),
        true,
        format!("exponential(rate={rate})"),
    )
    .with_score(Arc::new(move |_| -rate))
}

/// Gamma(shape, rate) on (0, inf).
pub fn gamma(shape: f64, rate: f64) -> ScalarDensity {
    assert!(shape > 0.0 && rate > 0.0, "shape and rate must be positive");
    let ln_norm = shape * rate.ln() - crate::special::ln_gamma(shape);
    ScalarDensity::new(
        Interval::positive_half_line(),
        Arc::new(move |x| {
            if x <= 0.0 {
                return f64::NEG_INFINITY;
            }
            ln_norm + (shape - 1.0) * x.ln() - rate * x
        }),
        true,
        format!("gamma(shape={shape}, rate={rate})"),
    )
    .with_score(Arc::new(move |x| (shape - 1.0) / x - rate))
}

/// Half-normal on (0, inf): f(y) = (2/sqrt(pi)) exp(-y^2).
pub fn half_normal() -> ScalarDensity {
    let ln_norm = (2.0 / PI.sqrt()).ln();
    ScalarDensity::new(
        Interval::positive_half_line(),
        Arc::new(move |y| ln_norm - y * y),
        true,
        "half-normal",
    )
    .with_score(Arc::new(|y| -2.0 * y))
}

/// Triangular density 1 - |x| on [-1, 1].
pub fn triangular_unit() -> ScalarDensity {
    ScalarDensity::new(
        Interval::new(-1.0, 1.0).expect("static interval"),
        Arc::new(|x: f64| {
            let f = 1.0 - x.abs();
            if f > 0.0 {
                f.ln()
            } else {
                f64::NEG_INFINITY
            }
        }),
        true,
        "triangular on [-1, 1]",
    )
    .with_score(Arc::new(|x: f64| -x.signum() / (1.0 - x.abs())))
}

pub fn triangular_unit_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        0.0
    } else if x < 0.0 {
        0.5 * (1.0 + x) * (1.0 + x)
    } else if x < 1.0 {
        1.0 - 0.5 * (1.0 - x) * (1.0 - x)
    } else {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_values() {
        assert!((normal(0.0, 1.0).pdf(0.0) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-16);
        assert!((cauchy(0.0, 1.0).pdf(0.0) - 1.0 / PI).abs() < 1e-16);
        assert!((laplace(0.0, 1.0).pdf(1.0) - (-1.0_f64).exp() / 2.0).abs() < 1e-16);
        assert!((exponential(1.0).pdf(0.0) - 1.0).abs() < 1e-16);
    }

    #[test]
    fn support_cuts_off_density() {
        let e = exponential(2.0);
        assert_eq!(e.pdf(-0.5), 0.0);
        assert_eq!(e.log_pdf(-0.5), f64::NEG_INFINITY);
        let t = triangular_unit();
        assert_eq!(t.pdf(1.5), 0.0);
    }

    #[test]
    fn families_normalize() {
        for d in [
            normal(0.3, 2.0),
            laplace(-1.0, 0.7),
            cauchy(0.5, 1.5),
            exponential(0.8),
            gamma(2.5, 1.3),
            half_normal(),
            triangular_unit(),
        ] {
            let mass = d.normalization_integral(1e-10).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "{}: {mass}", d.description());
        }
    }

    #[test]
    fn score_matches_finite_difference() {
        let d = normal(0.0, 1.0);
        let x = 0.7;
        let h = 1e-6;
        let fd = (d.pdf(x + h) - d.pdf(x - h)) / (2.0 * h);
        assert!((d.pdf_derivative(x) - fd).abs() < 1e-9);
    }

    #[test]
    fn cdf_helpers() {
        assert!((cauchy_cdf(0.0, 0.0, 1.0) - 0.5).abs() < 1e-16);
        assert!((laplace_cdf(0.0, 0.0, 1.0) - 0.5).abs() < 1e-16);
        assert!((triangular_unit_cdf(0.0) - 0.5).abs() < 1e-16);
        assert_eq!(triangular_unit_cdf(2.0), 1.0);
    }
}
