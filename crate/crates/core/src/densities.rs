//! Special density families used as mixing distributions: the generalized
//! inverse Gaussian, the Polya-Gamma alternating-series density and its
//! exponential tilt, the inverse Gaussian in its (t alpha^{1/2} e^t ...)
//! form, the two-piece orthant-normal family, and the positive-stable mixing
//! density evaluated by its reflection-form series.
//!
//! Log-densities are the primitive everywhere; pdf values are exp(log_pdf).

use std::f64::consts::PI;
use std::sync::Arc;

use thiserror::Error;

use crate::density::{normal_log_pdf, ScalarDensity};
use crate::quad::Interval;
use crate::series::{alternating_series, SeriesError};
use crate::special::{bessel_k, ln_gamma, sin_pi, std_normal_cdf, SpecialError};

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Special(#[from] SpecialError),
}

const LN_2PI: f64 = 1.837_877_066_409_345_5;

// ---------------------------------------------------------------------------
// Generalized inverse Gaussian
// ---------------------------------------------------------------------------

/// Parameters (lambda, delta, gamma) of the generalized inverse Gaussian:
/// density proportional to x^{lambda-1} exp{-(delta^2/x + gamma^2 x)/2}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GigParams {
    pub lambda: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl GigParams {
    pub fn new(lambda: f64, delta: f64, gamma: f64) -> Result<Self, DensityError> {
        if !(delta >= 0.0) || !(gamma >= 0.0) || !lambda.is_finite() {
            return Err(DensityError::InvalidParam(format!(
                "gig requires delta, gamma >= 0 and finite lambda (lambda={lambda}, delta={delta}, gamma={gamma})"
            )));
        }
        if delta == 0.0 && gamma == 0.0 {
            return Err(DensityError::InvalidParam("gig: delta and gamma cannot both be zero".into()));
        }
        if delta == 0.0 && !(lambda > 0.0) {
            return Err(DensityError::InvalidParam("gig: delta = 0 requires lambda > 0".into()));
        }
        if gamma == 0.0 && !(lambda < 0.0) {
            return Err(DensityError::InvalidParam("gig: gamma = 0 requires lambda < 0".into()));
        }
        Ok(Self { lambda, delta, gamma })
    }

    /// Log of the normalizing constant, using the gamma / inverse-gamma
    /// closed forms at the delta = 0 / gamma = 0 boundaries.
    fn ln_norm(&self) -> Result<f64, DensityError> {
        let &Self { lambda, delta, gamma } = self;
        if delta == 0.0 {
            // gamma distribution with shape lambda, rate gamma^2/2
            Ok(lambda * (gamma * gamma / 2.0).ln() - ln_gamma(lambda))
        } else if gamma == 0.0 {
            // inverse-gamma with shape -lambda, scale delta^2/2
            Ok(-lambda * (delta * delta / 2.0).ln() - ln_gamma(-lambda))
        } else {
            let u = delta * gamma;
            let k = bessel_k(lambda, u)?;
            Ok(lambda * (gamma / delta).ln() - (2.0 * k).ln())
        }
    }
}

pub fn gig_log_pdf(p: &GigParams, x: f64) -> Result<f64, DensityError> {
    if !(x > 0.0) {
        return Err(DensityError::InvalidParam(format!("gig_pdf requires x > 0, got {x}")));
    }
    let ln_norm = p.ln_norm()?;
    let mut v = ln_norm + (p.lambda - 1.0) * x.ln() - 0.5 * p.gamma * p.gamma * x;
    if p.delta > 0.0 {
        v -= 0.5 * p.delta * p.delta / x;
    }
    Ok(v)
}

pub fn gig_pdf(p: &GigParams, x: f64) -> Result<f64, DensityError> {
    Ok(gig_log_pdf(p, x)?.exp())
}

/// The GIG as a [`ScalarDensity`] on (0, inf).
pub fn gig_density(p: GigParams) -> Result<ScalarDensity, DensityError> {
    let ln_norm = p.ln_norm()?;
    let GigParams { lambda, delta, gamma } = p;
    Ok(ScalarDensity::new(
        Interval::positive_half_line(),
        Arc::new(move |x| {
            if x <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let mut v = ln_norm + (lambda - 1.0) * x.ln() - 0.5 * gamma * gamma * x;
            if delta > 0.0 {
                v -= 0.5 * delta * delta / x;
            }
            v
        }),
        true,
        format!("gig(lambda={lambda}, delta={delta}, gamma={gamma})"),
    )
    .with_score(Arc::new(move |x| {
        (lambda - 1.0) / x - 0.5 * gamma * gamma + 0.5 * delta * delta / (x * x)
    })))
}

// ---------------------------------------------------------------------------
// Polya-Gamma
// ---------------------------------------------------------------------------

/// Parameters of the Polya-Gamma density: shape b > 0 and tilting c >= 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolyaGammaParams {
    pub b: f64,
    pub c: f64,
}

impl PolyaGammaParams {
    pub fn new(b: f64, c: f64) -> Result<Self, DensityError> {
        if !(b > 0.0) {
            return Err(DensityError::InvalidParam(format!("polya-gamma requires b > 0, got {b}")));
        }
        if !(c >= 0.0) {
            return Err(DensityError::InvalidParam(format!("polya-gamma requires c >= 0, got {c}")));
        }
        Ok(Self { b, c })
    }
}

/// Below this omega the alternating series is not evaluated; the density is
/// reported as zero with `below_floor` set. The omitted mass is bounded by
/// C exp{-b^2/(8 omega)} integrated over (0, floor), which is below ~3e-14
/// for b >= 1/2 and far below the 1e-6 suite tolerance.
pub const PG_OMEGA_FLOOR: f64 = 1e-3;

// Past this point every partial sum underflows: the density decays like
// exp(-pi^2 omega / 8) and exp(-790) is zero in f64.
const PG_OMEGA_CEILING: f64 = 640.0;

/// A Polya-Gamma density evaluation.
#[derive(Clone, Copy, Debug)]
pub struct PgEval {
    pub value: f64,
    pub below_floor: bool,
    pub terms_used: usize,
    pub truncation_bound: f64,
}

/// Density of PG(b, c) at omega > 0 via the alternating series, with the
/// exponential tilt cosh^b(c/2) exp(-c^2 omega / 2) applied on top of the
/// PG(b, 0) series.
pub fn pg_pdf(p: &PolyaGammaParams, omega: f64) -> Result<PgEval, DensityError> {
    if !(omega > 0.0) {
        return Err(DensityError::InvalidParam(format!("pg_pdf requires omega > 0, got {omega}")));
    }
    if omega < PG_OMEGA_FLOOR {
        return Ok(PgEval { value: 0.0, below_floor: true, terms_used: 0, truncation_bound: 0.0 });
    }
    if omega > PG_OMEGA_CEILING {
        return Ok(PgEval { value: 0.0, below_floor: false, terms_used: 1, truncation_bound: 0.0 });
    }
    let b = p.b;
    // constant 2^{b-1} / (Gamma(b) sqrt(2 pi) omega^{3/2}); Gamma(b) is folded
    // into the term ratio below, which starts at 1 and needs no lgamma calls
    let ln_c0 = (b - 1.0) * std::f64::consts::LN_2 - 0.5 * LN_2PI - 1.5 * omega.ln();
    let c0 = ln_c0.exp();
    let magnitude = |n: usize, rho: f64| -> f64 {
        let k = 2.0 * n as f64 + b;
        c0 * rho * k * (-k * k / (8.0 * omega)).exp()
    };

    // scan the magnitudes to find the monotone entry index and the peak scale
    let mut rho = 1.0_f64; // Gamma(n+b) / (Gamma(n+1) Gamma(b))
    let mut mags: Vec<f64> = Vec::new();
    let mut peak = 0.0_f64;
    let mut entry = 0usize;
    for n in 0..10_000usize {
        let m = magnitude(n, rho);
        if m > peak {
            peak = m;
            entry = n + 1;
        }
        mags.push(m);
        let decreasing_twice = n >= 2 && mags[n] <= mags[n - 1] && mags[n - 1] <= mags[n - 2];
        if decreasing_twice && n > entry {
            break;
        }
        rho *= (n as f64 + b) / (n as f64 + 1.0);
        if n == 9_999 {
            return Err(DensityError::Series(SeriesError::Budget { tol: 0.0, budget: 10_000 }));
        }
    }

    let tol = (1e-16 * peak).max(1e-305);
    let mut rho_n = 1.0_f64;
    let mut last = 0usize;
    let series = alternating_series(
        |n| {
            // terms are requested in order; advance the ratio incrementally
            while last < n {
                rho_n *= (last as f64 + b) / (last as f64 + 1.0);
                last += 1;
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sign * magnitude(n, rho_n)
        },
        entry,
        tol,
        200_000,
    )?;

    let mut value = series.value.max(0.0);
    if p.c > 0.0 {
        let tilt = b * (p.c / 2.0).cosh().ln() - p.c * p.c * omega / 2.0;
        value *= tilt.exp();
    }
    Ok(PgEval {
        value,
        below_floor: false,
        terms_used: series.terms_used,
        truncation_bound: series.truncation_bound,
    })
}

/// Convenience: the PG(b, c) density value, zero below the small-omega floor.
pub fn pg_pdf_value(p: &PolyaGammaParams, omega: f64) -> Result<f64, DensityError> {
    Ok(pg_pdf(p, omega)?.value)
}

// ---------------------------------------------------------------------------
// Inverse Gaussian
// ---------------------------------------------------------------------------

/// Inverse-Gaussian density in the (alpha, t) parameterization
/// f(x) = t alpha^{1/2} e^t / (sqrt(2 pi) x^{3/2}) exp(-alpha t^2/(2x) - x/(2 alpha)),
/// algebraically the inverse Gaussian with mean alpha t and shape alpha t^2.
pub fn inverse_gaussian_pdf(alpha: f64, t: f64, x: f64) -> Result<f64, DensityError> {
    if !(alpha > 0.0) || !(t > 0.0) {
        return Err(DensityError::InvalidParam(format!(
            "inverse_gaussian_pdf requires alpha, t > 0 (alpha={alpha}, t={t})"
        )));
    }
    if !(x > 0.0) {
        return Err(DensityError::InvalidParam(format!("inverse_gaussian_pdf requires x > 0, got {x}")));
    }
    let ln = t.ln() + 0.5 * alpha.ln() + t - 0.5 * LN_2PI - 1.5 * x.ln()
        - alpha * t * t / (2.0 * x)
        - x / (2.0 * alpha);
    Ok(ln.exp())
}

/// The same family as a [`ScalarDensity`] on (0, inf).
pub fn inverse_gaussian_density(alpha: f64, t: f64) -> Result<ScalarDensity, DensityError> {
    if !(alpha > 0.0) || !(t > 0.0) {
        return Err(DensityError::InvalidParam(format!(
            "inverse_gaussian_density requires alpha, t > 0 (alpha={alpha}, t={t})"
        )));
    }
    let ln_c = t.ln() + 0.5 * alpha.ln() + t - 0.5 * LN_2PI;
    Ok(ScalarDensity::new(
        Interval::positive_half_line(),
        Arc::new(move |x| {
            if x <= 0.0 {
                return f64::NEG_INFINITY;
            }
            ln_c - 1.5 * x.ln() - alpha * t * t / (2.0 * x) - x / (2.0 * alpha)
        }),
        true,
        format!("inverse-gaussian(alpha={alpha}, t={t})"),
    ))
}

// ---------------------------------------------------------------------------
// Orthant normal
// ---------------------------------------------------------------------------

/// Parameters of the two-piece orthant-normal density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthantNormalParams {
    pub lambda1: f64,
    pub lambda2: f64,
    pub sigma: f64,
}

impl OrthantNormalParams {
    pub fn new(lambda1: f64, lambda2: f64, sigma: f64) -> Result<Self, DensityError> {
        if !(lambda1 >= 0.0) || !(lambda2 > 0.0) || !(sigma > 0.0) {
            return Err(DensityError::InvalidParam(format!(
                "orthant-normal requires lambda1 >= 0, lambda2 > 0, sigma > 0 (got {lambda1}, {lambda2}, {sigma})"
            )));
        }
        Ok(Self { lambda1, lambda2, sigma })
    }
}

/// Two-piece density: a Gaussian with mean +-lambda1/(2 lambda2) (the sign
/// opposing the half-line) and variance sigma^2/lambda2 on each side of zero,
/// each piece normalized by 2 Phi(-lambda1 / (2 sigma lambda2^{1/2})).
pub fn orthant_normal_pdf(p: &OrthantNormalParams, beta: f64) -> f64 {
    let mean_mag = p.lambda1 / (2.0 * p.lambda2);
    let var = p.sigma * p.sigma / p.lambda2;
    let piece_norm = 2.0 * std_normal_cdf(-p.lambda1 / (2.0 * p.sigma * p.lambda2.sqrt()));
    let mean = if beta < 0.0 { mean_mag } else { -mean_mag };
    (normal_log_pdf(beta, mean, var) - piece_norm.ln()).exp()
}

/// The orthant-normal family as a [`ScalarDensity`] on the real line.
pub fn orthant_normal_density(p: OrthantNormalParams) -> ScalarDensity {
    ScalarDensity::new(
        Interval::real_line(),
        Arc::new(move |beta| {
            let mean_mag = p.lambda1 / (2.0 * p.lambda2);
            let var = p.sigma * p.sigma / p.lambda2;
            let piece_norm = 2.0 * std_normal_cdf(-p.lambda1 / (2.0 * p.sigma * p.lambda2.sqrt()));
            let mean = if beta < 0.0 { mean_mag } else { -mean_mag };
            normal_log_pdf(beta, mean, var) - piece_norm.ln()
        }),
        true,
        format!(
            "orthant-normal(lambda1={}, lambda2={}, sigma={})",
            p.lambda1, p.lambda2, p.sigma
        ),
    )
}

// ---------------------------------------------------------------------------
// Positive-stable mixing density
// ---------------------------------------------------------------------------

/// Mixing density of the exponential-power representation,
/// g(eta) = sum_{j>=1} (-1)^j eta^{-j alpha - 1} / (j! Gamma(-alpha j)),
/// summed in its reflection form
/// term_j = (-1)^{j+1} Gamma(alpha j + 1) sin(pi alpha j) eta^{-alpha j - 1} / (pi j!)
/// with log-space term magnitudes and compensated summation.
pub fn stable_mixing_series(alpha: f64, eta: f64) -> Result<f64, DensityError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(DensityError::InvalidParam(format!(
            "stable_mixing_series requires 0 < alpha < 1, got {alpha}"
        )));
    }
    if !(eta > 0.0) {
        return Err(DensityError::InvalidParam(format!(
            "stable_mixing_series requires eta > 0, got {eta}"
        )));
    }
    let ln_eta = eta.ln();
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut ln_fact = 0.0_f64; // ln j!
    let mut max_mag = 0.0_f64;
    let mut past_peak_small = 0u32;
    for j in 1..=8_000usize {
        let fj = j as f64;
        ln_fact += fj.ln();
        let ln_mag = ln_gamma(alpha * fj + 1.0) - ln_fact - (alpha * fj + 1.0) * ln_eta - PI.ln();
        let s = sin_pi(alpha * fj);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * s * ln_mag.exp();
        let mag = term.abs();
        if mag > max_mag {
            max_mag = mag;
        }
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        // stop once well past the peak and terms have become negligible
        if mag <= 1e-18 * max_mag.max(1e-290) {
            past_peak_small += 1;
            if past_peak_small >= 3 {
                return Ok(sum);
            }
        } else {
            past_peak_small = 0;
        }
    }
    Err(DensityError::Series(SeriesError::Budget { tol: 0.0, budget: 8_000 }))
}

// Exponent at which the series is cut on the left: the peak term magnitude
// grows like exp{(1-alpha) j*(eta)} with j* = alpha^{alpha/(1-alpha)}
// eta^{-alpha/(1-alpha)}, so summation noise blows up as eta -> 0, while the
// density itself decays like exp{-(1-alpha) j*}. At (1-alpha) j* = 15 the
// noise is ~1e-9 and the discarded mass ~5e-8, which
// [`stable_mixing_left_mass`] then restores in closed form.
const STABLE_CUTOFF_EXPONENT: f64 = 15.0;

/// Smallest eta at which the series is numerically trustworthy.
pub fn stable_mixing_left_cutoff(alpha: f64) -> f64 {
    alpha * ((1.0 - alpha) / STABLE_CUTOFF_EXPONENT).powf((1.0 - alpha) / alpha)
}

/// Mass of g below [`stable_mixing_left_cutoff`], by the saddle-point form of
/// the left tail: with c = (1-alpha) alpha^{alpha/(1-alpha)} and
/// A = alpha^{1/(2(1-alpha))} / sqrt(2 pi (1-alpha)), substituting
/// u = c eta^{-alpha/(1-alpha)} collapses the tail integral to
/// A (1-alpha)/(alpha sqrt(c)) Gamma(1/2, T). Exact for alpha = 1/2 (where it
/// reduces to erfc(sqrt(T))), accurate to well under a percent otherwise.
pub fn stable_mixing_left_mass(alpha: f64) -> f64 {
    let t = STABLE_CUTOFF_EXPONENT;
    let c = (1.0 - alpha) * alpha.powf(alpha / (1.0 - alpha));
    let a = alpha.powf(1.0 / (2.0 * (1.0 - alpha))) / (2.0 * PI * (1.0 - alpha)).sqrt();
    a * (1.0 - alpha) / (alpha * c.sqrt()) * PI.sqrt() * crate::special::erfc(t.sqrt())
}

/// Tail mass integral of g over (z, inf), by term-by-term integration of the
/// series: sum_j (-1)^{j+1} Gamma(alpha j + 1) sin(pi alpha j) z^{-alpha j} / (pi j! alpha j).
/// Converges quickly for z well above 1.
pub fn stable_mixing_tail_mass(alpha: f64, z: f64) -> Result<f64, DensityError> {
    if !(alpha > 0.0 && alpha < 1.0) || !(z > 2.0) {
        return Err(DensityError::InvalidParam(format!(
            "stable_mixing_tail_mass requires 0 < alpha < 1 and z > 2 (alpha={alpha}, z={z})"
        )));
    }
    let ln_z = z.ln();
    let mut sum = 0.0_f64;
    let mut ln_fact = 0.0_f64;
    let mut small_run = 0u32;
    for j in 1..=400usize {
        let fj = j as f64;
        ln_fact += fj.ln();
        let ln_mag =
            ln_gamma(alpha * fj + 1.0) - ln_fact - alpha * fj * ln_z - (PI * alpha * fj).ln();
        let s = sin_pi(alpha * fj);
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * s * ln_mag.exp();
        sum += term;
        // rational alpha makes isolated sin factors vanish exactly, so a
        // single small term does not mean the series is done
        if term.abs() < 1e-15 * sum.abs().max(1e-30) && j > 3 {
            small_run += 1;
            if small_run >= 3 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(DensityError::Series(SeriesError::Budget { tol: 0.0, budget: 400 }))
}

/// Closed form of the one-sided stable density with index 1/2:
/// (2 sqrt(pi))^{-1} eta^{-3/2} exp{-1/(4 eta)}.
pub fn levy_half_pdf(eta: f64) -> f64 {
    if eta <= 0.0 {
        return 0.0;
    }
    (-1.0 / (4.0 * eta) - 1.5 * eta.ln()).exp() / (2.0 * PI.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    #[test]
    fn gig_gamma_limit_value() {
        // lambda=1, delta=0, gamma=sqrt(2) is Exp(1): pdf(1) = e^{-1}
        let p = GigParams::new(1.0, 0.0, 2.0_f64.sqrt()).unwrap();
        assert!((gig_pdf(&p, 1.0).unwrap() - (-1.0_f64).exp()).abs() < 1e-15);
        let d = gig_density(p).unwrap();
        let mass = d.normalization_integral(1e-10).unwrap();
        assert!((mass - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gig_general_normalizes() {
        for (l, d, g) in [(1.0, 1.0, 1.0), (-0.7, 2.0, 0.5), (2.5, 0.3, 3.0), (0.5, 1.5, 1.5)] {
            let p = GigParams::new(l, d, g).unwrap();
            let den = gig_density(p).unwrap();
            let mass = den.normalization_integral(1e-10).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "gig({l},{d},{g}): {mass}");
        }
    }

    #[test]
    fn gig_inverse_gamma_limit_normalizes() {
        let p = GigParams::new(-1.5, 2.0, 0.0).unwrap();
        let den = gig_density(p).unwrap();
        let mass = den.normalization_integral(1e-10).unwrap();
        assert!((mass - 1.0).abs() < 1e-8, "{mass}");
    }

    #[test]
    fn gig_small_delta_approaches_gamma_limit() {
        let exact = GigParams::new(1.0, 0.0, 2.0_f64.sqrt()).unwrap();
        let nearby = GigParams::new(1.0, 1e-6, 2.0_f64.sqrt()).unwrap();
        let mut x = 0.1;
        while x <= 10.0 {
            let a = gig_pdf(&exact, x).unwrap();
            let b = gig_pdf(&nearby, x).unwrap();
            assert!((a - b).abs() < 1e-4, "x={x}: {a} vs {b}");
            x += 0.3;
        }
    }

    #[test]
    fn gig_param_validation() {
        assert!(GigParams::new(1.0, 0.0, 0.0).is_err());
        assert!(GigParams::new(-1.0, 0.0, 1.0).is_err());
        assert!(GigParams::new(1.0, 1.0, 0.0).is_err());
        assert!(GigParams::new(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn pg_unit_density_value_against_brute_force() {
        // 5000-term brute-force partial sum at omega = 0.5, b = 1, frozen in
        // tests/oracle_soundness-style fashion below.
        let p = PolyaGammaParams::new(1.0, 0.0).unwrap();
        let brute: f64 = {
            let omega = 0.5_f64;
            let mut s = 0.0;
            for n in (0..5000).rev() {
                let k = 2.0 * n as f64 + 1.0;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                s += sign * k / (2.0 * PI * omega.powi(3)).sqrt() * (-k * k / (8.0 * omega)).exp();
            }
            s
        };
        let got = pg_pdf(&p, 0.5).unwrap();
        assert!(!got.below_floor);
        assert!((got.value - brute).abs() < 1e-13, "{} vs {brute}", got.value);
    }

    #[test]
    fn pg_below_floor_flag() {
        let p = PolyaGammaParams::new(1.0, 0.0).unwrap();
        let e = pg_pdf(&p, 1e-4).unwrap();
        assert!(e.below_floor);
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn pg_normalizes_for_b_grid() {
        for b in [0.5, 1.0, 2.0, 3.0] {
            let p = PolyaGammaParams::new(b, 0.0).unwrap();
            let r = integrate(
                |w| pg_pdf_value(&p, w).unwrap(),
                Interval::new(PG_OMEGA_FLOOR, f64::INFINITY).unwrap(),
                1e-9,
                1e-9,
            )
            .unwrap();
            assert!((r.value - 1.0).abs() < 1e-6, "b={b}: {}", r.value);
        }
    }

    #[test]
    fn pg_tilted_normalizes() {
        for (b, c) in [(1.0, 0.5), (1.0, 1.0), (1.0, 2.0), (2.0, 1.0)] {
            let p = PolyaGammaParams::new(b, c).unwrap();
            let r = integrate(
                |w| pg_pdf_value(&p, w).unwrap(),
                Interval::new(PG_OMEGA_FLOOR, f64::INFINITY).unwrap(),
                1e-9,
                1e-9,
            )
            .unwrap();
            assert!((r.value - 1.0).abs() < 1e-6, "b={b} c={c}: {}", r.value);
        }
    }

    #[test]
    fn inverse_gaussian_matches_mean_shape_expansion() {
        // (mean, shape) = (alpha t, alpha t^2): the e^t factor cancels exactly.
        let cases = [(1.0, 1.0), (2.0, 0.5), (0.7, 2.3)];
        for &(alpha, t) in &cases {
            let mean = alpha * t;
            let shape = alpha * t * t;
            let mut x = 0.05;
            while x < 12.0 {
                let direct = inverse_gaussian_pdf(alpha, t, x).unwrap();
                let standard = (shape / (2.0 * PI * x.powi(3))).sqrt()
                    * (-shape * (x - mean) * (x - mean) / (2.0 * mean * mean * x)).exp();
                assert!(
                    (direct - standard).abs() <= 1e-12 * standard.max(1.0),
                    "alpha={alpha} t={t} x={x}: {direct} vs {standard}"
                );
                x += 0.37;
            }
        }
    }

    #[test]
    fn inverse_gaussian_normalization_and_mean() {
        let d = inverse_gaussian_density(1.0, 1.0).unwrap();
        let mass = d.normalization_integral(1e-10).unwrap();
        assert!((mass - 1.0).abs() < 1e-8, "{mass}");
        let mean = integrate(|x| x * d.pdf(x), d.support(), 1e-10, 1e-10).unwrap().value;
        assert!((mean - 1.0).abs() < 1e-7, "{mean}");

        let d2 = inverse_gaussian_density(2.0, 0.5).unwrap();
        let mass2 = d2.normalization_integral(1e-10).unwrap();
        assert!((mass2 - 1.0).abs() < 1e-8, "{mass2}");
    }

    #[test]
    fn orthant_normal_continuity_and_reduction() {
        let p = OrthantNormalParams::new(1.0, 1.0, 1.0).unwrap();
        let left = orthant_normal_pdf(&p, -1e-300);
        let right = orthant_normal_pdf(&p, 0.0);
        assert!((left - right).abs() < 1e-12);

        // lambda1 = 0 reduces to the plain normal with variance sigma^2/lambda2
        let p0 = OrthantNormalParams::new(0.0, 2.0, 1.5).unwrap();
        let var = 1.5 * 1.5 / 2.0;
        for x in [-1.0, 0.0, 0.8] {
            assert!((orthant_normal_pdf(&p0, x) - crate::density::normal_pdf(x, 0.0, var)).abs() < 1e-14);
        }
    }

    #[test]
    fn orthant_normal_normalizes() {
        for (l1, l2, s) in [(1.0, 1.0, 1.0), (0.0, 0.5, 2.0), (3.0, 2.0, 0.7)] {
            let p = OrthantNormalParams::new(l1, l2, s).unwrap();
            let d = orthant_normal_density(p);
            let mass = d.normalization_integral(1e-10).unwrap();
            assert!((mass - 1.0).abs() < 1e-8, "({l1},{l2},{s}): {mass}");
        }
    }

    #[test]
    fn stable_series_matches_levy_closed_form() {
        // alpha = 1/2 has the closed Levy form; relative agreement across the
        // working range.
        let mut eta = 0.05;
        while eta <= 20.0 {
            let got = stable_mixing_series(0.5, eta).unwrap();
            let truth = levy_half_pdf(eta);
            assert!(
                ((got - truth) / truth).abs() < 1e-10,
                "eta={eta}: {got} vs {truth} (rel {:.2e})",
                ((got - truth) / truth).abs()
            );
            eta *= 1.6;
        }
        // spec spot values
        let g1 = stable_mixing_series(0.5, 1.0).unwrap();
        assert!((g1 - (-0.25_f64).exp() / (2.0 * PI.sqrt())).abs() < 1e-14);
        let g2 = stable_mixing_series(0.5, 2.0).unwrap();
        assert!((g2 - levy_half_pdf(2.0)).abs() < 1e-14);
    }

    #[test]
    fn stable_series_rejects_bad_alpha() {
        assert!(stable_mixing_series(1.0, 1.0).is_err());
        assert!(stable_mixing_series(0.0, 1.0).is_err());
        assert!(stable_mixing_series(0.5, 0.0).is_err());
    }

    #[test]
    fn stable_mixing_normalizes_with_tail_series() {
        for alpha in [0.3, 0.5, 0.7, 0.9] {
            let lo = stable_mixing_left_cutoff(alpha);
            let z = 50.0;
            let body = integrate(
                |e| stable_mixing_series(alpha, e).unwrap(),
                Interval::new(lo, z).unwrap(),
                1e-9,
                1e-9,
            )
            .unwrap();
            let left = stable_mixing_left_mass(alpha);
            let tail = stable_mixing_tail_mass(alpha, z).unwrap();
            let mass = left + body.value + tail;
            assert!(
                (mass - 1.0).abs() < 1e-8,
                "alpha={alpha}: {mass} (left {left}, body {}, tail {tail})",
                body.value
            );
        }
    }

    #[test]
    fn stable_left_mass_exact_at_one_half() {
        // at alpha = 1/2 the saddle form collapses to the Levy CDF
        // erfc(1/(2 sqrt(eta0)))
        let lo = stable_mixing_left_cutoff(0.5);
        let cdf = crate::special::erfc(1.0 / (2.0 * lo.sqrt()));
        assert!(((stable_mixing_left_mass(0.5) - cdf) / cdf).abs() < 1e-12);
    }
}
