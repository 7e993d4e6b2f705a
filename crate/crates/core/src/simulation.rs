//! Censored samples from contaminated Burr lifetimes with Fréchet censoring,
//! and the Monte Carlo bias/MSE sweep.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Open01;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::estimators::{SolverOptions, TailFit};
use crate::sample::{CensoredObservation, ModelParams, OrderedSample};

/// Burr quantile `((1 - u)^{-gamma1/eta} - 1)^eta`.
pub fn burr_quantile(u: f64, gamma1: f64, eta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(invalid(format!("Burr quantile needs u in [0, 1), got {u}")));
    }
    if !(gamma1 > 0.0 && eta > 0.0) {
        return Err(invalid("Burr parameters must be positive"));
    }
    // (1-u)^{-g/eta} - 1 = expm1(-(g/eta) ln(1-u))
    let base = (-(gamma1 / eta) * (-u).ln_1p()).exp_m1();
    Ok(base.powf(eta))
}

/// Burr cdf `1 - (1 + x^{1/eta})^{-eta/gamma1}`.
pub fn burr_cdf(x: f64, gamma1: f64, eta: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    -(-(eta / gamma1) * x.powf(1.0 / eta).ln_1p()).exp_m1()
}

/// Fréchet quantile `(-ln u)^{-gamma2}`.
pub fn frechet_quantile(u: f64, gamma2: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(invalid(format!(
            "Fréchet quantile needs u in (0, 1), got {u}"
        )));
    }
    if !(gamma2 > 0.0) {
        return Err(invalid("Fréchet index must be positive"));
    }
    Ok((-u.ln()).powf(-gamma2))
}

/// Fréchet cdf `exp(-x^{-1/gamma2})`.
pub fn frechet_cdf(x: f64, gamma2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (-x.powf(-1.0 / gamma2)).exp()
}

/// `gamma2 = p gamma1 / (1 - p)`, so that `p = gamma2 / (gamma1 + gamma2)`.
pub fn gamma2_from_p(gamma1: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("p must lie in (0, 1), got {p}")));
    }
    if !(gamma1.is_finite() && gamma1 > 0.0) {
        return Err(invalid(format!("gamma1 must be positive, got {gamma1}")));
    }
    Ok(p * gamma1 / (1.0 - p))
}

/// Second-order parameter of the Burr tail quantile function.
pub fn burr_tau(gamma1: f64, eta: f64) -> f64 {
    -gamma1 / eta
}

/// Lifetime law `(1 - epsilon) Burr(gamma1, eta) + epsilon Burr(theta1, eta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContaminationSpec {
    pub epsilon: f64,
    pub theta1: f64,
    pub eta: f64,
}

impl ContaminationSpec {
    /// `epsilon = 1` is accepted and yields the pure contaminating law.
    pub fn new(epsilon: f64, theta1: f64, eta: f64) -> Result<Self> {
        let spec = Self {
            epsilon,
            theta1,
            eta,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn none(eta: f64) -> Self {
        Self {
            epsilon: 0.0,
            theta1: 1.0,
            eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(invalid(format!(
                "epsilon must lie in [0, 1], got {}",
                self.epsilon
            )));
        }
        if !(self.theta1.is_finite() && self.theta1 > 0.0 && self.eta.is_finite() && self.eta > 0.0)
        {
            return Err(invalid("theta1 and eta must be positive"));
        }
        Ok(())
    }
}

/// One draw with both latent variables retained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentDraw {
    pub lifetime: f64,
    pub censoring: f64,
    pub contaminated: bool,
}

impl LatentDraw {
    pub fn observation(&self) -> CensoredObservation {
        CensoredObservation {
            z: self.lifetime.min(self.censoring),
            delta: self.lifetime <= self.censoring,
        }
    }
}

fn draw_latent<R: Rng>(
    rng: &mut R,
    model: &ModelParams,
    contamination: &ContaminationSpec,
) -> LatentDraw {
    let pick: f64 = rng.sample(Open01);
    let ux: f64 = rng.sample(Open01);
    let uc: f64 = rng.sample(Open01);
    let contaminated = pick < contamination.epsilon;
    let index = if contaminated {
        contamination.theta1
    } else {
        model.gamma1
    };
    LatentDraw {
        lifetime: burr_quantile(ux, index, contamination.eta).expect("u drawn from (0, 1)"),
        censoring: frechet_quantile(uc, model.gamma2).expect("u drawn from (0, 1)"),
        contaminated,
    }
}

fn latent_from_rng<R: Rng>(
    n: usize,
    model: &ModelParams,
    contamination: &ContaminationSpec,
    rng: &mut R,
) -> Vec<LatentDraw> {
    (0..n)
        .map(|_| draw_latent(rng, model, contamination))
        .collect()
}

fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Latent lifetimes and censoring times, as drawn by
/// [`sample_contaminated_censored`] for the same arguments.
pub fn sample_latent(
    n: usize,
    model: &ModelParams,
    contamination: &ContaminationSpec,
    seed: u64,
) -> Result<Vec<LatentDraw>> {
    contamination.validate()?;
    Ok(latent_from_rng(
        n,
        model,
        contamination,
        &mut replicate_rng(seed, 0),
    ))
}

pub fn sample_contaminated_censored(
    n: usize,
    model: &ModelParams,
    contamination: &ContaminationSpec,
    seed: u64,
) -> Result<Vec<CensoredObservation>> {
    Ok(sample_latent(n, model, contamination, seed)?
        .iter()
        .map(LatentDraw::observation)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub n: usize,
    pub replicates: usize,
    pub model: ModelParams,
    pub contamination: ContaminationSpec,
    pub alphas: Vec<f64>,
    pub k_grid: Vec<usize>,
    pub seed: u64,
    pub solver: SolverOptions,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(invalid(format!("n must be at least 10, got {}", self.n)));
        }
        if self.replicates == 0 {
            return Err(invalid("replicates must be at least 1"));
        }
        if let Some(&k) = self.k_grid.iter().find(|&&k| k == 0 || k >= self.n) {
            return Err(invalid(format!("k = {k} must lie in [1, n)")));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(invalid(format!("alpha must be nonnegative, got {a}")));
        }
        self.contamination.validate()?;
        self.solver.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub alpha: f64,
    pub abs_bias: f64,
    pub mse: f64,
    pub n_failures: usize,
}

/// Rows ordered by `k`, then by `alpha`, following the grids of the [`SweepSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn get(&self, k: usize, alpha: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.k == k && r.alpha == alpha)
    }
}

fn replicate_estimates(spec: &SweepSpec, replicate: usize) -> Vec<Option<f64>> {
    let mut rng = replicate_rng(spec.seed, replicate as u64);
    let draws = latent_from_rng(spec.n, &spec.model, &spec.contamination, &mut rng);
    let observations: Vec<CensoredObservation> =
        draws.iter().map(LatentDraw::observation).collect();
    let sample =
        OrderedSample::from_observations(&observations).expect("sampled times are positive");
    let mut out = Vec::with_capacity(spec.k_grid.len() * spec.alphas.len());
    for &k in &spec.k_grid {
        match TailFit::new(&sample, k) {
            Ok(fit) => out.extend(
                spec.alphas
                    .iter()
                    .map(|&a| fit.estimate(a, &spec.solver).ok().map(|e| e.gamma1_hat)),
            ),
            Err(_) => out.extend(spec.alphas.iter().map(|_| None)),
        }
    }
    out
}

/// Runs the sweep on the global rayon pool.
///
/// Replicate `r` draws from the ChaCha8 stream `r` of `seed` and the
/// reduction runs in replicate order, so the result is independent of the
/// thread count.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let per_replicate: Vec<Vec<Option<f64>>> = (0..spec.replicates)
        .into_par_iter()
        .map(|r| replicate_estimates(spec, r))
        .collect();

    let cells = spec.k_grid.len() * spec.alphas.len();
    let mut sum = vec![0.0; cells];
    let mut sum_sq = vec![0.0; cells];
    let mut ok = vec![0usize; cells];
    for estimates in &per_replicate {
        for (c, est) in estimates.iter().enumerate() {
            if let Some(g) = est {
                let e = g - spec.model.gamma1;
                sum[c] += e;
                sum_sq[c] += e * e;
                ok[c] += 1;
            }
        }
    }

    let mut rows = Vec::with_capacity(cells);
    for (ki, &k) in spec.k_grid.iter().enumerate() {
        for (ai, &alpha) in spec.alphas.iter().enumerate() {
            let c = ki * spec.alphas.len() + ai;
            let (abs_bias, mse) = if ok[c] == 0 {
                (f64::NAN, f64::NAN)
            } else {
                let m = ok[c] as f64;
                ((sum[c] / m).abs(), sum_sq[c] / m)
            };
            rows.push(SweepRow {
                k,
                alpha,
                abs_bias,
                mse,
                n_failures: spec.replicates - ok[c],
            });
        }
    }
    Ok(SweepResult { rows })
}

/// Runs the sweep on a dedicated pool of `threads` workers.
pub fn run_sweep_with_threads(spec: &SweepSpec, threads: usize) -> Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| invalid(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_sweep(spec))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burr_quantile_values() {
        assert_eq!(burr_quantile(0.0, 0.3, 0.25).unwrap(), 0.0);
        let x = burr_quantile(0.5, 0.3, 0.25).unwrap();
        let expected = (2f64.powf(1.2) - 1.0).powf(0.25);
        assert!((x - expected).abs() < 1e-14);
        assert!((x - 1.06725).abs() < 1e-5);
        assert!((burr_cdf(x, 0.3, 0.25) - 0.5).abs() < 1e-12);
        assert!(burr_quantile(1.0, 0.3, 0.25).is_err());
        assert!(burr_quantile(-0.1, 0.3, 0.25).is_err());
        assert!(burr_quantile(1.0 - 1e-12, 0.3, 0.25).unwrap() > 1e3);
    }

    #[test]
    fn frechet_quantile_values() {
        assert!((frechet_quantile((-1f64).exp(), 0.4).unwrap() - 1.0).abs() < 1e-15);
        let x = frechet_quantile(0.5, 0.2).unwrap();
        assert!((x - 2f64.ln().powf(-0.2)).abs() < 1e-15);
        assert!((x - 1.07606).abs() < 1e-5);
        assert!((frechet_cdf(x, 0.2) - 0.5).abs() < 1e-12);
        assert!(frechet_quantile(1e-300, 0.2).unwrap() < 0.3);
        assert!(frechet_quantile(0.0, 0.2).is_err());
        assert!(frechet_quantile(1.0, 0.2).is_err());
    }

    #[test]
    fn gamma2_relation() {
        assert!((gamma2_from_p(0.3, 0.4).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(gamma2_from_p(0.5, 0.5).unwrap(), 0.5);
        assert!((gamma2_from_p(0.3, 0.7).unwrap() - 0.7).abs() < 1e-15);
        assert!(gamma2_from_p(0.3, 1.0).is_err());
        assert!(gamma2_from_p(0.3, 0.0).is_err());
    }

    #[test]
    fn sampler_is_deterministic() {
        let model = ModelParams::from_p(0.3, 0.7, 0.25, burr_tau(0.3, 0.25)).unwrap();
        let cont = ContaminationSpec::new(0.15, 0.6, 0.25).unwrap();
        let a = sample_contaminated_censored(500, &model, &cont, 42).unwrap();
        let b = sample_contaminated_censored(500, &model, &cont, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_contaminated_censored(500, &model, &cont, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn contamination_bounds() {
        assert!(ContaminationSpec::new(-0.1, 0.6, 0.25).is_err());
        assert!(ContaminationSpec::new(1.1, 0.6, 0.25).is_err());
        assert!(ContaminationSpec::new(0.4, 0.0, 0.25).is_err());
    }

    #[test]
    fn sweep_spec_validation() {
        let model = ModelParams::from_p(0.3, 0.7, 0.25, -1.2).unwrap();
        let mut spec = SweepSpec {
            n: 100,
            replicates: 2,
            model,
            contamination: ContaminationSpec::none(0.25),
            alphas: vec![0.0, 0.1],
            k_grid: vec![10, 20],
            seed: 1,
            solver: SolverOptions::default(),
        };
        assert!(spec.validate().is_ok());
        spec.k_grid.push(100);
        assert!(spec.validate().is_err());
    }
}
