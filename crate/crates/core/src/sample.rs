//! Censored samples, order statistics with concomitant indicators, and the
//! top-order-statistics window every tail estimator works on.
//!
//! Indexing follows the tail convention used throughout the crate: `i = 1`
//! is the largest observation `Z_{n:n}`, `i = k` is `Z_{n-k+1:n}` and the
//! threshold is `Z_{n-k:n}`.

use crate::error::{invalid, Error, Result};

/// One right-censored observation: `z = min(X, C)` and `delta = 1{X <= C}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensoredObservation {
    pub z: f64,
    /// `true` when the lifetime itself was observed.
    pub delta: bool,
}

impl CensoredObservation {
    pub fn new(z: f64, delta: bool) -> Result<Self> {
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::InvalidObservation {
                index: 0,
                reason: format!("z must be finite and positive, got {z}"),
            });
        }
        Ok(Self { z, delta })
    }
}

/// Observations sorted by `z` (ascending) with their censoring indicators
/// carried along as concomitants.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedSample {
    z: Vec<f64>,
    delta: Vec<bool>,
}

impl OrderedSample {
    /// Sorts the observations. Ties in `z` keep their input order.
    pub fn from_observations(observations: &[CensoredObservation]) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::EmptySample);
        }
        for (index, obs) in observations.iter().enumerate() {
            if !(obs.z.is_finite() && obs.z > 0.0) {
                return Err(Error::InvalidObservation {
                    index,
                    reason: format!("z must be finite and positive, got {}", obs.z),
                });
            }
        }
        let mut order: Vec<usize> = (0..observations.len()).collect();
        // `sort_by` is stable, so equal z values stay in input order.
        order.sort_by(|&a, &b| observations[a].z.total_cmp(&observations[b].z));
        Ok(Self {
            z: order.iter().map(|&i| observations[i].z).collect(),
            delta: order.iter().map(|&i| observations[i].delta).collect(),
        })
    }

    /// Convenience constructor from parallel slices.
    pub fn from_parts(z: &[f64], delta: &[bool]) -> Result<Self> {
        if z.len() != delta.len() {
            return Err(invalid(format!(
                "length mismatch: {} times vs {} indicators",
                z.len(),
                delta.len()
            )));
        }
        let obs: Vec<CensoredObservation> = z
            .iter()
            .zip(delta)
            .map(|(&z, &delta)| CensoredObservation { z, delta })
            .collect();
        Self::from_observations(&obs)
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// `Z_{1:n} <= ... <= Z_{n:n}`.
    pub fn z_sorted(&self) -> &[f64] {
        &self.z
    }

    /// `delta_{[1:n]}, ..., delta_{[n:n]}`.
    pub fn delta_concomitant(&self) -> &[bool] {
        &self.delta
    }

    /// Back to a list of observations in sorted order.
    pub fn observations(&self) -> Vec<CensoredObservation> {
        self.z
            .iter()
            .zip(&self.delta)
            .map(|(&z, &delta)| CensoredObservation { z, delta })
            .collect()
    }

    /// Number of uncensored observations.
    pub fn uncensored_count(&self) -> usize {
        self.delta.iter().filter(|&&d| d).count()
    }

    pub(crate) fn check_k(&self, k: usize) -> Result<()> {
        let n = self.len();
        if k == 0 || k >= n {
            return Err(Error::KOutOfRange { k, n });
        }
        Ok(())
    }

    /// `Z_{n-i+1:n}` for `1 <= i <= n`.
    #[inline]
    pub fn top(&self, i: usize) -> f64 {
        self.z[self.len() - i]
    }

    /// `delta_{[n-i+1:n]}` for `1 <= i <= n`.
    #[inline]
    pub fn top_delta(&self, i: usize) -> bool {
        self.delta[self.len() - i]
    }

    /// The threshold `Z_{n-k:n}`.
    pub fn threshold(&self, k: usize) -> Result<f64> {
        self.check_k(k)?;
        Ok(self.z[self.len() - k - 1])
    }

    /// Multiplies every time by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(invalid(format!("scale factor must be positive, got {c}")));
        }
        Ok(Self {
            z: self.z.iter().map(|z| z * c).collect(),
            delta: self.delta.clone(),
        })
    }
}

/// Top-k log-excesses `L_i = log(Z_{n-i+1:n} / Z_{n-k:n})` with their
/// indicators, ordered from the largest observation (`i = 1`) down to `i = k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailWindow {
    pub k: usize,
    pub threshold: f64,
    pub log_excess: Vec<f64>,
    pub delta: Vec<bool>,
}

impl TailWindow {
    pub fn pairs(&self) -> impl Iterator<Item = (f64, bool)> + '_ {
        self.log_excess
            .iter()
            .copied()
            .zip(self.delta.iter().copied())
    }
}

pub fn top_log_excesses(sample: &OrderedSample, k: usize) -> Result<TailWindow> {
    let threshold = sample.threshold(k)?;
    if threshold <= 0.0 {
        return Err(Error::ZeroThreshold);
    }
    let log_threshold = threshold.ln();
    let log_excess = (1..=k)
        .map(|i| sample.top(i).ln() - log_threshold)
        .collect();
    let delta = (1..=k).map(|i| sample.top_delta(i)).collect();
    Ok(TailWindow {
        k,
        threshold,
        log_excess,
        delta,
    })
}

/// The `(k, alpha)` pair selecting the tail window and the robustness level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailConfig {
    pub k: usize,
    pub alpha: f64,
}

impl TailConfig {
    pub fn new(k: usize, alpha: f64) -> Result<Self> {
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid(format!("alpha must be nonnegative, got {alpha}")));
        }
        Ok(Self { k, alpha })
    }
}

/// True-model parameters used by the samplers and the asymptotic constants.
///
/// `gamma1` is the lifetime tail index, `gamma2` the censoring tail index,
/// `eta` the Burr shape and `tau1 <= 0` the second-order parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub eta: f64,
    pub tau1: f64,
}

impl ModelParams {
    pub fn new(gamma1: f64, gamma2: f64, eta: f64, tau1: f64) -> Result<Self> {
        for (name, v) in [("gamma1", gamma1), ("gamma2", gamma2), ("eta", eta)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(tau1 <= 0.0) {
            return Err(invalid(format!("tau1 must be nonpositive, got {tau1}")));
        }
        Ok(Self {
            gamma1,
            gamma2,
            eta,
            tau1,
        })
    }

    /// Builds the model from `gamma1` and the upper uncensored proportion `p`.
    pub fn from_p(gamma1: f64, p: f64, eta: f64, tau1: f64) -> Result<Self> {
        let gamma2 = crate::simulation::gamma2_from_p(gamma1, p)?;
        Self::new(gamma1, gamma2, eta, tau1)
    }

    /// `p = gamma2 / (gamma1 + gamma2)`.
    pub fn p(&self) -> f64 {
        self.gamma2 / (self.gamma1 + self.gamma2)
    }

    pub fn q(&self) -> f64 {
        self.gamma1 / (self.gamma1 + self.gamma2)
    }

    /// Tail index of `Z`: `gamma1 * gamma2 / (gamma1 + gamma2)`.
    pub fn gamma(&self) -> f64 {
        self.gamma1 * self.gamma2 / (self.gamma1 + self.gamma2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obs(pairs: &[(f64, bool)]) -> Vec<CensoredObservation> {
        pairs
            .iter()
            .map(|&(z, delta)| CensoredObservation { z, delta })
            .collect()
    }

    #[test]
    fn sorts_with_concomitants() {
        let s = OrderedSample::from_observations(&obs(&[(3.0, true), (1.0, false), (2.0, true)]))
            .unwrap();
        assert_eq!(s.z_sorted(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.delta_concomitant(), &[false, true, true]);
    }

    #[test]
    fn singleton() {
        let s = OrderedSample::from_observations(&obs(&[(5.0, true)])).unwrap();
        assert_eq!(s.z_sorted(), &[5.0]);
        assert_eq!(s.delta_concomitant(), &[true]);
    }

    #[test]
    fn ties_keep_input_order() {
        let s = OrderedSample::from_observations(&obs(&[(2.0, true), (2.0, false)])).unwrap();
        assert_eq!(s.z_sorted(), &[2.0, 2.0]);
        assert_eq!(s.delta_concomitant(), &[true, false]);
    }

    #[test]
    fn rejects_empty_and_nonpositive() {
        assert_eq!(
            OrderedSample::from_observations(&[]),
            Err(Error::EmptySample)
        );
        let err = OrderedSample::from_observations(&obs(&[(1.0, true), (0.0, true)])).unwrap_err();
        assert!(matches!(err, Error::InvalidObservation { index: 1, .. }));
        let err = OrderedSample::from_observations(&obs(&[(-2.0, true)])).unwrap_err();
        assert!(err.to_string().contains("invalid observation"));
    }

    #[test]
    fn log_excesses_by_hand() {
        let s = OrderedSample::from_parts(&[1.0, 2.0, 4.0], &[true, true, true]).unwrap();
        let w = top_log_excesses(&s, 2).unwrap();
        assert_eq!(w.threshold, 1.0);
        assert!((w.log_excess[0] - 4f64.ln()).abs() < 1e-15);
        assert!((w.log_excess[1] - 2f64.ln()).abs() < 1e-15);
        assert_eq!(w.delta, vec![true, true]);

        let w = top_log_excesses(&s, 1).unwrap();
        assert_eq!(w.log_excess.len(), 1);
        assert!((w.log_excess[0] - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn constant_window_gives_zero_excesses() {
        let s = OrderedSample::from_parts(&[7.0, 7.0, 7.0], &[true, false, true]).unwrap();
        let w = top_log_excesses(&s, 2).unwrap();
        assert_eq!(w.log_excess, vec![0.0, 0.0]);
    }

    #[test]
    fn k_range_is_checked() {
        let s = OrderedSample::from_parts(&[1.0, 2.0, 4.0], &[true, true, true]).unwrap();
        assert_eq!(
            top_log_excesses(&s, 3).unwrap_err(),
            Error::KOutOfRange { k: 3, n: 3 }
        );
        assert!(top_log_excesses(&s, 0).is_err());
    }

    #[test]
    fn model_derived_quantities() {
        let m = ModelParams::new(0.3, 0.7, 0.25, -1.0).unwrap();
        assert!((m.p() - 0.7).abs() < 1e-15);
        assert!((m.q() - 0.3).abs() < 1e-15);
        assert!((m.gamma() - 0.21).abs() < 1e-15);
        assert!(ModelParams::new(0.3, 0.7, 0.25, 0.5).is_err());
        assert!(TailConfig::new(3, -0.1).is_err());
    }
}
