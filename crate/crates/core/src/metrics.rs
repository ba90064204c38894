//! Distance and test statistics: 1-D Wasserstein, total variation, and the
//! two-sample Kolmogorov–Smirnov test.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::features::{Distribution, SupportKind};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("support mismatch: {left} vs {right}")]
    SupportMismatch {
        left: SupportKind,
        right: SupportKind,
    },
    #[error("distance undefined for an empty distribution")]
    EmptyDistribution,
    #[error("need at least 2 samples per side, got {0} and {1}")]
    InsufficientSamples(usize, usize),
    #[error("sample contains a non-finite value")]
    NonFiniteSample,
}

/// W1 between two numeric distributions: the integral of the absolute CDF
/// difference over the merged support.
pub fn wasserstein_numeric<T: Scalar>(
    p: &Distribution<T>,
    q: &Distribution<T>,
) -> Result<T, MetricError> {
    let (a, b) = match (p, q) {
        (Distribution::Numeric(a), Distribution::Numeric(b)) => (a, b),
        _ => {
            return Err(MetricError::SupportMismatch {
                left: p.kind(),
                right: q.kind(),
            })
        }
    };
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::EmptyDistribution);
    }

    let (mut i, mut j) = (0, 0);
    let (mut cdf_p, mut cdf_q) = (T::zero(), T::zero());
    let mut total = T::zero();
    let mut last = None;
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(u), Some(v)) => u.0.min(v.0),
            (Some(u), None) => u.0,
            (None, Some(v)) => v.0,
            (None, None) => unreachable!(),
        };
        if let Some(prev) = last {
            let gap = T::of_rational(x - prev);
            total = total + (cdf_p - cdf_q).abs() * gap;
        }
        if a.get(i).is_some_and(|u| u.0 == x) {
            cdf_p = cdf_p + a[i].1;
            i += 1;
        }
        if b.get(j).is_some_and(|v| v.0 == x) {
            cdf_q = cdf_q + b[j].1;
            j += 1;
        }
        last = Some(x);
    }
    Ok(total)
}

/// Wasserstein distance under the discrete metric, i.e. total variation:
/// half the L1 distance between mass functions. Labels missing on one side
/// carry zero mass there.
pub fn wasserstein_categorical<T: Scalar>(
    p: &Distribution<T>,
    q: &Distribution<T>,
) -> Result<T, MetricError> {
    let (a, b) = match (p, q) {
        (Distribution::Categorical(a), Distribution::Categorical(b)) => (a, b),
        _ => {
            return Err(MetricError::SupportMismatch {
                left: p.kind(),
                right: q.kind(),
            })
        }
    };
    if a.is_empty() || b.is_empty() {
        return Err(MetricError::EmptyDistribution);
    }
    let mut diff: BTreeMap<&str, T> = BTreeMap::new();
    for (label, m) in a {
        *diff.entry(label).or_insert_with(T::zero) = *m;
    }
    for (label, m) in b {
        let e = diff.entry(label).or_insert_with(T::zero);
        *e = *e - *m;
    }
    let l1 = diff.values().fold(T::zero(), |acc, d| acc + d.abs());
    Ok(l1 / T::of(2.0))
}

/// Dispatches on the support kind of `p`.
pub fn wasserstein<T: Scalar>(p: &Distribution<T>, q: &Distribution<T>) -> Result<T, MetricError> {
    match p.kind() {
        SupportKind::Numeric => wasserstein_numeric(p, q),
        SupportKind::Categorical => wasserstein_categorical(p, q),
    }
}

/// Result of a two-sample Kolmogorov–Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult<T> {
    pub statistic: T,
    pub p_value: T,
    pub n_a: usize,
    pub n_b: usize,
    /// Set when the effective sample size is below 4 and the asymptotic
    /// p-value is a rough approximation.
    pub approximate: bool,
}

/// Kolmogorov distribution tail `Q(λ) = 2 Σ (-1)^(k-1) exp(-2 k² λ²)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100_000u32 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted<T: Scalar>(xs: &[T]) -> Result<Vec<T>, MetricError> {
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(MetricError::NonFiniteSample);
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    Ok(v)
}

/// Two-sample KS test with the asymptotic p-value.
pub fn ks_two_sample<T: Scalar>(a: &[T], b: &[T]) -> Result<KsResult<T>, MetricError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(MetricError::InsufficientSamples(a.len(), b.len()));
    }
    let xs = sorted(a)?;
    let ys = sorted(b)?;
    let (na, nb) = (xs.len(), ys.len());

    // Sweep the merged sample, stepping both CDFs past tied values together.
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < na && j < nb {
        let x = if xs[i] <= ys[j] { xs[i] } else { ys[j] };
        while i < na && xs[i] <= x {
            i += 1;
        }
        while j < nb && ys[j] <= x {
            j += 1;
        }
        let gap = (i as f64 / na as f64 - j as f64 / nb as f64).abs();
        d = d.max(gap);
    }
    // Once one sample is exhausted the remaining gap only shrinks.

    let ne = (na * nb) as f64 / (na + nb) as f64;
    let sqrt_ne = ne.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    Ok(KsResult {
        statistic: T::of(d),
        p_value: T::of(kolmogorov_q(lambda)),
        n_a: na,
        n_b: nb,
        approximate: ne < 4.0,
    })
}
