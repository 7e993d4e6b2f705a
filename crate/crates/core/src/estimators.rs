//! Tail-index estimators for randomly right-censored data: Hill, the
//! censored proportion, EFG, Worms, MNS, and the robust MDPD family.
//!
//! The MDPD estimate for `alpha > 0` is the root of the estimating residual
//!
//! ```text
//! rho(g) = sum_i a_i (g - L_i) r_i^{-alpha (1 + 1/g)} - alpha g (g + 1) / (1 + alpha + alpha g)^2
//! ```
//!
//! with `r_i = Z_{n-i+1:n} / Z_{n-k:n}`, `L_i = log r_i` and `a_i` the
//! Nelson–Aalen weights. At `alpha = 0` the estimator is the MNS estimator.

use std::fmt;

use crate::empirical::{kaplan_meier_survival, mdpd_weights, WeightVector};
use crate::error::{invalid, Error, Result};
use crate::root::{brent, geometric_grid, sign_change_brackets};
use crate::sample::{top_log_excesses, OrderedSample, TailConfig, TailWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Hill,
    Efg,
    Worms,
    Mns,
    Mdpd,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Hill => "Hill",
            Method::Efg => "EFG",
            Method::Worms => "Worms",
            Method::Mns => "MNS",
            Method::Mdpd => "MDPD",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hill" => Ok(Method::Hill),
            "efg" => Ok(Method::Efg),
            "worms" => Ok(Method::Worms),
            "mns" => Ok(Method::Mns),
            "mdpd" => Ok(Method::Mdpd),
            other => Err(invalid(format!("unknown method '{other}'"))),
        }
    }
}

/// Root-search settings for the MDPD estimating equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub domain_lo: f64,
    pub domain_hi: f64,
    pub grid_points: usize,
    pub tol_abs: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            domain_lo: 1e-6,
            domain_hi: 50.0,
            grid_points: 200,
            tol_abs: 1e-10,
            max_iter: 200,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.domain_lo > 0.0 && self.domain_hi > self.domain_lo && self.domain_hi.is_finite())
        {
            return Err(invalid(format!(
                "search domain must satisfy 0 < lo < hi, got ({}, {})",
                self.domain_lo, self.domain_hi
            )));
        }
        if self.grid_points < 2 {
            return Err(invalid("grid_points must be at least 2"));
        }
        if !(self.tol_abs > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverDiagnostics {
    pub residual: f64,
    pub iterations: usize,
    /// Grid bracket that contained the selected root.
    pub bracket: (f64, f64),
    /// Every root found on the search domain, ascending.
    pub roots: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub gamma1_hat: f64,
    pub method: Method,
    pub alpha: f64,
    pub k: usize,
    pub diagnostics: Option<SolverDiagnostics>,
}

/// `k^{-1} sum log(Z_{n-i+1:n} / Z_{n-k:n})`.
pub fn hill_gamma(sample: &OrderedSample, k: usize) -> Result<f64> {
    let w = top_log_excesses(sample, k)?;
    hill_from_window(&w)
}

fn hill_from_window(w: &TailWindow) -> Result<f64> {
    let mean = w.log_excess.iter().sum::<f64>() / w.k as f64;
    if mean <= 0.0 {
        return Err(Error::ZeroHill);
    }
    Ok(mean)
}

/// Fraction of uncensored observations among the top `k`.
pub fn censored_proportion(sample: &OrderedSample, k: usize) -> Result<f64> {
    sample.check_k(k)?;
    let hits = (1..=k).filter(|&i| sample.top_delta(i)).count();
    Ok(hits as f64 / k as f64)
}

/// Hill estimate of `gamma` divided by the uncensored proportion.
pub fn efg_estimator(sample: &OrderedSample, k: usize) -> Result<f64> {
    let p_hat = censored_proportion(sample, k)?;
    if p_hat == 0.0 {
        return Err(Error::AllCensored);
    }
    Ok(hill_gamma(sample, k)? / p_hat)
}

/// Kaplan–Meier weighted sum of consecutive log-spacings.
pub fn worms_estimator(sample: &OrderedSample, k: usize) -> Result<f64> {
    let threshold = sample.threshold(k)?;
    if threshold <= 0.0 {
        return Err(Error::ZeroThreshold);
    }
    let denom = kaplan_meier_survival(sample, threshold);
    if denom <= 0.0 {
        return Err(Error::KmThresholdExhausted);
    }
    // KM survival at Z_{n-i:n} for i = 1..k; top(i + 1) is Z_{n-i:n}.
    let mut total = 0.0;
    for i in 1..=k {
        let lower = sample.top(i + 1);
        let spacing = (sample.top(i) / lower).ln();
        if spacing == 0.0 {
            continue;
        }
        total += kaplan_meier_survival(sample, lower) / denom * spacing;
    }
    Ok(total)
}

/// `sum_i a_ik log(Z_{n-i+1:n} / Z_{n-k:n})`.
pub fn mns_estimator(sample: &OrderedSample, k: usize) -> Result<f64> {
    let w = top_log_excesses(sample, k)?;
    let a = mdpd_weights(sample, k)?;
    Ok(dot(&a.a, &w.log_excess))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The weighted tail data `(a_i, L_i)` of one window, with zero-weight
/// terms dropped. Shared by every `alpha` evaluated on the same `k`.
#[derive(Debug, Clone)]
pub struct TailFit {
    k: usize,
    weights: Vec<f64>,
    log_excess: Vec<f64>,
    mns: f64,
}

impl TailFit {
    pub fn new(sample: &OrderedSample, k: usize) -> Result<Self> {
        let window = top_log_excesses(sample, k)?;
        let a = mdpd_weights(sample, k)?;
        Ok(Self::from_parts(&window, &a))
    }

    pub fn from_parts(window: &TailWindow, a: &WeightVector) -> Self {
        // Same summation order as `mns_estimator` so both agree bit for bit.
        let mns = dot(&a.a, &window.log_excess);
        let (weights, log_excess) =
            a.a.iter()
                .zip(&window.log_excess)
                .filter(|(&w, _)| w != 0.0)
                .map(|(&w, &l)| (w, l))
                .unzip();
        Self {
            k: window.k,
            weights,
            log_excess,
            mns,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn mns(&self) -> f64 {
        self.mns
    }

    pub fn has_uncensored(&self) -> bool {
        !self.weights.is_empty()
    }

    /// Estimating residual at `gamma1` for `alpha > 0`.
    pub fn residual(&self, gamma1: f64, alpha: f64) -> f64 {
        let c = alpha * (1.0 + 1.0 / gamma1);
        let empirical: f64 = self
            .weights
            .iter()
            .zip(&self.log_excess)
            .map(|(&a, &l)| a * (gamma1 - l) * (-c * l).exp())
            .sum();
        let s = 1.0 + alpha + alpha * gamma1;
        empirical - alpha * gamma1 * (gamma1 + 1.0) / (s * s)
    }

    /// Empirical density power divergence objective at `gamma1` for `alpha > 0`.
    ///
    /// Its derivative in `gamma1` is `(1 + alpha) gamma1^{-(2 + alpha)} rho(gamma1)`.
    pub fn objective(&self, gamma1: f64, alpha: f64) -> f64 {
        let c = alpha * (1.0 + 1.0 / gamma1);
        let empirical: f64 = self
            .weights
            .iter()
            .zip(&self.log_excess)
            .map(|(&a, &l)| a * (-c * l).exp())
            .sum();
        let model = 1.0 / (alpha * gamma1 + alpha + 1.0);
        gamma1.powf(-alpha) * (model - (1.0 + 1.0 / alpha) * empirical)
    }

    pub fn estimate(&self, alpha: f64, options: &SolverOptions) -> Result<EstimateResult> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(invalid(format!("alpha must be nonnegative, got {alpha}")));
        }
        if !self.has_uncensored() {
            return Err(Error::NoRootExists);
        }
        if alpha == 0.0 {
            return Ok(EstimateResult {
                gamma1_hat: self.mns,
                method: Method::Mns,
                alpha,
                k: self.k,
                diagnostics: None,
            });
        }
        options.validate()?;

        let grid = geometric_grid(options.domain_lo, options.domain_hi, options.grid_points);
        let scanned: Vec<(f64, f64)> = grid.iter().map(|&g| (g, self.residual(g, alpha))).collect();
        let brackets = sign_change_brackets(&scanned);
        if brackets.is_empty() {
            return Err(Error::NoRootInBracket {
                lo: options.domain_lo,
                hi: options.domain_hi,
                grid: scanned,
            });
        }

        let mut found = Vec::with_capacity(brackets.len());
        let mut worst = None;
        for (ja, jb) in brackets {
            let (a, fa) = scanned[ja];
            let (b, fb) = scanned[jb];
            let r = brent(
                |g| self.residual(g, alpha),
                a,
                b,
                fa,
                fb,
                options.tol_abs,
                options.max_iter,
            );
            if r.converged && r.x > a && r.x < b {
                found.push((r, (a, b)));
            } else {
                worst = Some(r);
            }
        }
        if found.is_empty() {
            let r = worst.expect("at least one bracket was refined");
            return Err(Error::SolverNotConverged {
                iterations: r.iterations,
                residual: r.fx,
            });
        }

        let roots: Vec<f64> = found.iter().map(|(r, _)| r.x).collect();
        let (best, bracket) = found
            .iter()
            .min_by(|(x, _), (y, _)| (x.x - self.mns).abs().total_cmp(&(y.x - self.mns).abs()))
            .copied()
            .expect("nonempty");
        Ok(EstimateResult {
            gamma1_hat: best.x,
            method: Method::Mdpd,
            alpha,
            k: self.k,
            diagnostics: Some(SolverDiagnostics {
                residual: best.fx,
                iterations: best.iterations,
                bracket,
                roots,
            }),
        })
    }
}

/// Estimating residual `rho(gamma1)` for the window and `alpha` in `config`.
pub fn mdpd_residual(gamma1: f64, sample: &OrderedSample, config: &TailConfig) -> Result<f64> {
    check_gamma_alpha(gamma1, config.alpha)?;
    Ok(TailFit::new(sample, config.k)?.residual(gamma1, config.alpha))
}

/// Empirical objective whose stationary points are the roots of the residual.
pub fn mdpd_objective(gamma1: f64, sample: &OrderedSample, config: &TailConfig) -> Result<f64> {
    check_gamma_alpha(gamma1, config.alpha)?;
    Ok(TailFit::new(sample, config.k)?.objective(gamma1, config.alpha))
}

fn check_gamma_alpha(gamma1: f64, alpha: f64) -> Result<()> {
    if !(gamma1.is_finite() && gamma1 > 0.0) {
        return Err(invalid(format!("gamma1 must be positive, got {gamma1}")));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid(format!(
            "alpha must be positive for the MDPD residual, got {alpha}"
        )));
    }
    Ok(())
}

/// MDPD estimate of `gamma1`. At `alpha = 0` this is the MNS estimate.
pub fn mdpd_estimate(
    sample: &OrderedSample,
    config: &TailConfig,
    options: &SolverOptions,
) -> Result<EstimateResult> {
    TailFit::new(sample, config.k)?.estimate(config.alpha, options)
}

/// Any of the non-robust estimators wrapped as an [`EstimateResult`].
pub fn classical_estimate(
    method: Method,
    sample: &OrderedSample,
    k: usize,
) -> Result<EstimateResult> {
    let gamma1_hat = match method {
        Method::Hill => hill_gamma(sample, k)?,
        Method::Efg => efg_estimator(sample, k)?,
        Method::Worms => worms_estimator(sample, k)?,
        Method::Mns => mns_estimator(sample, k)?,
        Method::Mdpd => return Err(invalid("use mdpd_estimate for the MDPD family")),
    };
    Ok(EstimateResult {
        gamma1_hat,
        method,
        alpha: 0.0,
        k,
        diagnostics: None,
    })
}
