//! Alternating series summation with a rigorous truncation bound.

use thiserror::Error;

/// A partial sum together with how it was truncated.
#[derive(Clone, Copy, Debug)]
pub struct SeriesEvalResult {
    pub value: f64,
    pub terms_used: usize,
    /// Magnitude of the first omitted term; once the terms are alternating
    /// and monotonically decreasing this bounds the truncation error.
    pub truncation_bound: f64,
}

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("terms stopped alternating in sign at index {index}")]
    NotAlternating { index: usize },
    #[error("term magnitudes failed to decrease at index {index} (inside the declared monotone regime)")]
    NotDecreasing { index: usize },
    #[error("series did not reach tolerance {tol} within {budget} terms")]
    Budget { tol: f64, budget: usize },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

/// Sum an alternating series until the first term at or past `monotone_from`
/// whose magnitude is at most `tol`; that term is omitted and its magnitude
/// returned as the truncation bound.
///
/// `monotone_from` is the caller's guarantee: from that index on, the term
/// magnitudes decrease. The guarantee is re-checked while summing and a
/// violation is an error, as is running past `budget` terms.
pub fn alternating_series<F: FnMut(usize) -> f64>(
    mut term: F,
    monotone_from: usize,
    tol: f64,
    budget: usize,
) -> Result<SeriesEvalResult, SeriesError> {
    if !(tol > 0.0) {
        return Err(SeriesError::InvalidTolerance(tol));
    }
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64; // Kahan compensation
    let mut prev_mag = f64::INFINITY;
    let mut prev_sign = 0.0_f64;
    for n in 0..budget.max(1) {
        let t = term(n);
        let mag = t.abs();
        if n >= monotone_from {
            if mag <= tol {
                return Ok(SeriesEvalResult { value: sum, terms_used: n.max(1), truncation_bound: mag });
            }
            // the entry index itself may exceed its pre-monotone predecessor
            if n > monotone_from && mag > prev_mag {
                return Err(SeriesError::NotDecreasing { index: n });
            }
        }
        if t != 0.0 {
            if prev_sign != 0.0 && t.signum() == prev_sign {
                return Err(SeriesError::NotAlternating { index: n });
            }
            prev_sign = t.signum();
        }
        let y = t - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        prev_mag = mag;
    }
    Err(SeriesError::Budget { tol, budget: budget.max(1) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alternating_harmonic_reaches_ln2() {
        // 1 - 1/2 + 1/3 - ... = ln 2; monotone from the start.
        let tol = 1e-7;
        let r = alternating_series(|n| {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            s / (n as f64 + 1.0)
        }, 0, tol, 20_000_000)
        .unwrap();
        assert!(r.truncation_bound <= tol);
        assert!((r.value - std::f64::consts::LN_2).abs() <= r.truncation_bound);
        assert!(r.terms_used >= 1);
    }

    #[test]
    #[ignore = "1e10 terms; the tolerance in the fast test above exercises the same contract"]
    fn alternating_harmonic_tight_tolerance() {
        let tol = 1e-10;
        let r = alternating_series(|n| {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            s / (n as f64 + 1.0)
        }, 0, tol, 20_000_000_000)
        .unwrap();
        assert!((r.value - std::f64::consts::LN_2).abs() <= r.truncation_bound);
    }

    #[test]
    fn sine_series_at_one() {
        let r = alternating_series(|n| {
            let k = 2 * n + 1;
            let mut t = 1.0;
            for j in 1..=k {
                t /= j as f64;
            }
            if n.is_multiple_of(2) { t } else { -t }
        }, 0, 1e-14, 100)
        .unwrap();
        assert!((r.value - 1.0_f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn refinement_stays_within_previous_bound() {
        let term = |n: usize| {
            let s = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            s / ((n as f64 + 1.0) * (n as f64 + 1.0))
        };
        let coarse = alternating_series(term, 0, 1e-4, 100_000).unwrap();
        let fine = alternating_series(term, 0, 1e-5, 100_000).unwrap();
        assert!((coarse.value - fine.value).abs() <= coarse.truncation_bound);
    }

    #[test]
    fn growing_terms_in_monotone_regime_error() {
        let out = alternating_series(|n| {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            s * (n as f64 + 1.0)
        }, 0, 1e-8, 1000);
        assert!(matches!(out, Err(SeriesError::NotDecreasing { .. })));
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let out = alternating_series(|n| {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            s / (n as f64 + 1.0)
        }, 0, 1e-12, 100);
        assert!(matches!(out, Err(SeriesError::Budget { .. })));
    }
}
