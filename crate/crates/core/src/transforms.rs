//! Integral transformation machinery: the reciprocal and logistic self-inverse
//! maps, the associated change-of-variable identities on (0, inf), and the
//! mother-to-daughter density construction g(x) = a f(|ax - b/x|).
//!
//! The identities implemented here all reduce an integral of a composed
//! kernel to a plain half-line integral; the verification suites check each
//! one against direct quadrature of both sides.

use std::sync::Arc;

use thiserror::Error;

use crate::density::ScalarDensity;
use crate::quad::{integrate, Interval, QuadError, QuadResult};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("parameter must be positive, got {0}")]
    InvalidParameter(f64),
    #[error("mother density must be normalized on (0, inf)")]
    NotNormalized,
    #[error("mother density must live on (0, inf), got [{0}, {1}]")]
    UnsupportedSupport(f64, f64),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// A monotone decreasing involution on (0, inf): s(s(x)) = x.
#[derive(Clone, Copy, Debug)]
pub enum SelfInverseMap {
    /// s(x) = b / x
    Reciprocal { b: f64 },
    /// s(x) = -log(1 - exp(-a x)) / a, the companion of the logistic map
    Logistic { a: f64 },
}

impl SelfInverseMap {
    pub fn reciprocal(b: f64) -> Result<Self, TransformError> {
        if !(b > 0.0) {
            return Err(TransformError::InvalidParameter(b));
        }
        Ok(Self::Reciprocal { b })
    }

    pub fn logistic(a: f64) -> Result<Self, TransformError> {
        if !(a > 0.0) {
            return Err(TransformError::InvalidParameter(a));
        }
        Ok(Self::Logistic { a })
    }

    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Self::Reciprocal { b } => b / x,
            Self::Logistic { a } => {
                let z = a * x;
                if z > 0.5 {
                    // log(1 - e^{-z}) via ln_1p of the small exponential
                    -(-(-z).exp()).ln_1p() / a
                } else {
                    // 1 - e^{-z} ~ z is far from 1, plain log is exact enough
                    -(-(-z).exp_m1()).ln() / a
                }
            }
        }
    }
}

/// Left side of the two-parameter transformation identity:
/// integral over (0, inf) of f{(a x - b x^{-1})^2} dx.
///
/// Equals (1/a) * integral of f(y^2) dy over (0, inf).
pub fn cs_identity_lhs<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<QuadResult, TransformError> {
    if !(a > 0.0) {
        return Err(TransformError::InvalidParameter(a));
    }
    if !(b > 0.0) {
        return Err(TransformError::InvalidParameter(b));
    }
    let r = integrate(
        move |x| {
            let t = a * x - b / x;
            f(t * t)
        },
        Interval::positive_half_line(),
        tol,
        tol,
    )?;
    Ok(r)
}

/// Generalized form for an arbitrary self-inverse map:
/// integral over (0, inf) of f[{x - s(x)}^2] dx, which equals
/// the integral of f(y^2) dy.
pub fn gen_cs_identity_lhs<F: Fn(f64) -> f64>(
    f: F,
    s: SelfInverseMap,
    tol: f64,
) -> Result<QuadResult, TransformError> {
    let r = integrate(
        move |x| {
            let t = x - s.apply(x);
            f(t * t)
        },
        Interval::positive_half_line(),
        tol,
        tol,
    )?;
    Ok(r)
}

/// Both sides of the shift identity
/// integral f(ax + b/x) x^{-1/2} dx  =  a^{-1/2} integral f(2 sqrt(ab) + y) y^{-1/2} dy,
/// each computed by direct quadrature (after the square substitution that
/// removes the y^{-1/2} endpoint weight).
pub fn liouville_identity_pair<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(QuadResult, QuadResult), TransformError> {
    if !(a > 0.0) {
        return Err(TransformError::InvalidParameter(a));
    }
    if !(b > 0.0) {
        return Err(TransformError::InvalidParameter(b));
    }
    // x = w^2 turns x^{-1/2} dx into 2 dw
    let lhs = integrate(
        |w| 2.0 * f(a * w * w + b / (w * w)),
        Interval::positive_half_line(),
        tol,
        tol,
    )?;
    let shift = 2.0 * (a * b).sqrt();
    let scale = 2.0 / a.sqrt();
    let rhs = integrate(
        move |v| scale * f(shift + v * v),
        Interval::positive_half_line(),
        tol,
        tol,
    )?;
    Ok((lhs, rhs))
}

/// Daughter density g(x) = a f(|a x - b x^{-1}|) of a normalized mother
/// density f on (0, inf).
pub fn daughter_density(
    mother: &ScalarDensity,
    a: f64,
    b: f64,
) -> Result<ScalarDensity, TransformError> {
    if !(a > 0.0) {
        return Err(TransformError::InvalidParameter(a));
    }
    if !(b > 0.0) {
        return Err(TransformError::InvalidParameter(b));
    }
    let support = mother.support();
    if support.lower() != 0.0 || support.upper() != f64::INFINITY {
        return Err(TransformError::UnsupportedSupport(support.lower(), support.upper()));
    }
    if !mother.is_normalized() {
        return Err(TransformError::NotNormalized);
    }
    let m = mother.clone();
    let ln_a = a.ln();
    let description = format!("daughter(a={a}, b={b}) of {}", mother.description());
    Ok(ScalarDensity::new(
        Interval::positive_half_line(),
        Arc::new(move |x| {
            if x <= 0.0 {
                return f64::NEG_INFINITY;
            }
            ln_a + m.log_pdf((a * x - b / x).abs())
        }),
        true,
        description,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PiMapKind {
    /// Pi(y) = {y + (4b + y^2)^{1/2}} / 2, inverse t(x) = x - b/x
    T2,
    /// Pi(y) = log(1 + e^{ay}) / a, inverse t(x) = log(e^{ax} - 1) / a
    Logistic,
}

/// The increasing map Pi from the real line onto (0, inf).
pub fn pi_map(kind: PiMapKind, param: f64, y: f64) -> Result<f64, TransformError> {
    if !(param > 0.0) {
        return Err(TransformError::InvalidParameter(param));
    }
    Ok(match kind {
        PiMapKind::T2 => {
            let b = param;
            let root = (4.0 * b + y * y).sqrt();
            if y >= 0.0 {
                0.5 * (y + root)
            } else {
                // (y + root)/2 = 2b/(root - y), which avoids cancellation
                2.0 * b / (root - y)
            }
        }
        PiMapKind::Logistic => {
            let a = param;
            // softplus(ay)/a without overflow for large |ay|
            let z = a * y;
            if z > 0.0 {
                y + (-z).exp().ln_1p() / a
            } else {
                z.exp().ln_1p() / a
            }
        }
    })
}

/// Inverse of [`pi_map`]: t(x) for x > 0.
pub fn pi_map_inverse(kind: PiMapKind, param: f64, x: f64) -> Result<f64, TransformError> {
    if !(param > 0.0) {
        return Err(TransformError::InvalidParameter(param));
    }
    if !(x > 0.0) {
        return Err(TransformError::InvalidParameter(x));
    }
    Ok(match kind {
        PiMapKind::T2 => x - param / x,
        PiMapKind::Logistic => {
            let a = param;
            let z = a * x;
            if z > 0.5 {
                // log(e^z - 1) = z + log(1 - e^{-z})
                x + (-(-z).exp()).ln_1p() / a
            } else {
                z.exp_m1().ln() / a
            }
        }
    })
}
