//! Product-limit survival estimators and the Nelson–Aalen weight sequence.

use crate::error::{Error, Result};
use crate::sample::OrderedSample;

/// Kaplan–Meier survival `prod_{Z_{i:n} <= x} ((n-i)/(n-i+1))^{delta_[i:n]}`.
pub fn kaplan_meier_survival(sample: &OrderedSample, x: f64) -> f64 {
    let n = sample.len();
    let mut surv = 1.0;
    for (idx, (&z, &d)) in sample
        .z_sorted()
        .iter()
        .zip(sample.delta_concomitant())
        .enumerate()
    {
        if z > x {
            break;
        }
        if d {
            let i = idx + 1;
            surv *= (n - i) as f64 / (n - i + 1) as f64;
        }
    }
    surv
}

/// Nelson–Aalen survival `prod_{Z_{i:n} < z} exp(-delta_[i:n] / (n-i+1))`.
///
/// The product runs over order statistics strictly below `z`.
pub fn nelson_aalen_survival(sample: &OrderedSample, z: f64) -> f64 {
    let n = sample.len();
    let mut hazard = 0.0;
    for (idx, (&zi, &d)) in sample
        .z_sorted()
        .iter()
        .zip(sample.delta_concomitant())
        .enumerate()
    {
        if zi >= z {
            break;
        }
        if d {
            hazard += 1.0 / (n - idx) as f64;
        }
    }
    (-hazard).exp()
}

/// `F̄(Z_{n-i+1:n}) / F̄(Z_{n-k:n}) = prod_{j=i+1}^{k} exp(-delta_[n-j+1:n] / j)`
/// for the Nelson–Aalen survival, in closed form.
pub fn na_tail_ratio(sample: &OrderedSample, k: usize, i: usize) -> Result<f64> {
    sample.check_k(k)?;
    if i == 0 || i > k {
        return Err(Error::IndexOutOfRange { i, k });
    }
    let exponent: f64 = (i + 1..=k)
        .filter(|&j| sample.top_delta(j))
        .map(|j| 1.0 / j as f64)
        .sum();
    Ok((-exponent).exp())
}

/// The weights `a_ik = (delta_i / i) * prod_{j=i+1}^{k} exp(-delta_j / j)`,
/// with `delta_i` the indicator of the `i`-th largest observation.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub a: Vec<f64>,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.a.iter().sum()
    }

    pub fn all_zero(&self) -> bool {
        self.a.iter().all(|&w| w == 0.0)
    }
}

pub fn mdpd_weights(sample: &OrderedSample, k: usize) -> Result<WeightVector> {
    sample.check_k(k)?;
    let mut a = vec![0.0; k];
    // Backward pass: `tail` holds sum_{j>i} delta_j / j.
    let mut tail = 0.0f64;
    for i in (1..=k).rev() {
        if sample.top_delta(i) {
            let inv = 1.0 / i as f64;
            a[i - 1] = inv * (-tail).exp();
            tail += inv;
        }
    }
    Ok(WeightVector { a })
}

/// Empirical cdf `H_n(x)` and sub-distribution `H_n^(1)(x)` of the uncensored part.
pub fn empirical_subdistributions(sample: &OrderedSample, x: f64) -> (f64, f64) {
    let n = sample.len() as f64;
    let mut all = 0usize;
    let mut uncensored = 0usize;
    for (&z, &d) in sample.z_sorted().iter().zip(sample.delta_concomitant()) {
        if z > x {
            break;
        }
        all += 1;
        if d {
            uncensored += 1;
        }
    }
    (all as f64 / n, uncensored as f64 / n)
}
