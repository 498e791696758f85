//! Overlapping Allan deviation of a uniformly sampled scalar series.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct AllanCurve<T> {
    /// Averaging times actually used (snapped to multiples of dt), s.
    pub taus: Vec<T>,
    /// Overlapping Allan deviation per tau, input units.
    pub sigmas: Vec<T>,
    /// Number of squared differences entering each estimate.
    pub counts: Vec<usize>,
    /// True where the requested tau was snapped down to a multiple of dt.
    pub snapped: Vec<bool>,
}

/// Overlapping Allan deviation at the requested averaging times.
///
/// A requested tau that is not a multiple of `dt` is snapped down and
/// flagged; taus too long for at least two clusters are skipped.
pub fn allan_deviation<T: Scalar>(values: &[T], dt: T, taus: &[T]) -> Result<AllanCurve<T>> {
    if dt <= T::zero() {
        return Err(Error::Argument("sample interval must be positive".into()));
    }
    if values.len() < 3 {
        return Err(Error::Argument("series too short for Allan statistics".into()));
    }
    if taus.is_empty() {
        return Err(Error::Argument("at least one averaging time required".into()));
    }

    // Prefix sums for O(1) cluster averages.
    let mut prefix = Vec::with_capacity(values.len() + 1);
    let mut acc = crate::kahan::KahanSum::new();
    prefix.push(T::zero());
    for &v in values {
        acc.add(v);
        prefix.push(acc.value());
    }
    let n = values.len();

    let mut out = AllanCurve {
        taus: Vec::new(),
        sigmas: Vec::new(),
        counts: Vec::new(),
        snapped: Vec::new(),
    };
    for &tau in taus {
        if tau <= T::zero() {
            return Err(Error::Argument("averaging times must be positive".into()));
        }
        let m_f = tau / dt;
        let m = m_f.floor().to_usize().unwrap_or(0).max(1);
        let snapped = (m_f - m_f.floor()).abs() > T::from_f64c(1e-9);
        if 2 * m > n {
            // Fewer than two clusters: estimate undefined at this tau.
            continue;
        }
        let m_t = T::from_f64c(m as f64);
        let count = n - 2 * m + 1;
        let mut sq = crate::kahan::KahanSum::new();
        for j in 0..count {
            let first = prefix[j + m] - prefix[j];
            let second = prefix[j + 2 * m] - prefix[j + m];
            let d = (second - first) / m_t;
            sq.add(d * d);
        }
        let var = sq.value() / (T::from_f64c(2.0) * T::from_f64c(count as f64));
        out.taus.push(m_t * dt);
        out.sigmas.push(var.sqrt());
        out.counts.push(count);
        out.snapped.push(snapped);
    }
    if out.taus.is_empty() {
        return Err(Error::Argument(
            "no requested averaging time admits two clusters".into(),
        ));
    }
    Ok(out)
}
