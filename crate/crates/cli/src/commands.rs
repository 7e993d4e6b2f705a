use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use censored_mdpd::asymptotics::{sigma_squared_mc, AsymptoticConstants, GaussianOracleConfig};
use censored_mdpd::quadrature::QuadOptions;
use censored_mdpd::simulation::{
    run_sweep, run_sweep_with_threads, sample_contaminated_censored, ContaminationSpec,
};
use censored_mdpd::{
    classical_estimate, CensoredObservation, Error, Method, ModelParams, OrderedSample,
    SolverOptions, SweepResult, TailFit,
};

use crate::config::SweepConfig;
use crate::error::{CliError, CliResult};
use crate::svg;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub k_min: usize,
    /// Defaults to `min(n - 1, 500)`.
    pub k_max: Option<usize>,
    pub k_step: usize,
    pub alphas: Vec<f64>,
    pub solver: SolverOptions,
    pub competitors: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            k_min: 10,
            k_max: None,
            k_step: 10,
            alphas: vec![0.0, 0.1, 0.3, 0.5],
            solver: SolverOptions::default(),
            competitors: false,
        }
    }
}

pub const ESTIMATE_HEADER: &str = "k,alpha,method,gamma1_hat,residual";

/// One row per `(k, alpha)`, plus Hill, EFG and Worms rows per `k` when
/// competitors are requested. Failed estimates leave empty cells.
pub fn estimate_table(
    observations: &[CensoredObservation],
    opts: &EstimateOptions,
) -> CliResult<String> {
    let sample = OrderedSample::from_observations(observations)?;
    let n = sample.len();
    if n < 2 {
        return Err(CliError::user("need at least two observations"));
    }
    let k_max = opts.k_max.unwrap_or_else(|| (n - 1).min(500));
    if k_max >= n {
        return Err(CliError::user(format!(
            "k = {k_max} out of range: need k < n = {n}"
        )));
    }
    if opts.k_min == 0 || opts.k_min > k_max || opts.k_step == 0 {
        return Err(CliError::user(
            "invalid k range: need 1 <= k-min <= k-max and k-step >= 1",
        ));
    }
    if let Some(a) = opts.alphas.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
        return Err(CliError::user(format!(
            "alpha must be nonnegative, got {a}"
        )));
    }
    opts.solver.validate()?;

    let mut out = String::new();
    writeln!(out, "{ESTIMATE_HEADER}").unwrap();
    for k in (opts.k_min..=k_max).step_by(opts.k_step) {
        let fit = TailFit::new(&sample, k);
        for &alpha in &opts.alphas {
            let method = if alpha == 0.0 {
                Method::Mns
            } else {
                Method::Mdpd
            };
            let estimate = fit
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|f| f.estimate(alpha, &opts.solver));
            let (value, residual) = match estimate {
                Ok(e) => (
                    e.gamma1_hat.to_string(),
                    e.diagnostics
                        .map(|d| d.residual.to_string())
                        .unwrap_or_default(),
                ),
                Err(_) => (String::new(), String::new()),
            };
            writeln!(out, "{k},{alpha},{method},{value},{residual}").unwrap();
        }
        if opts.competitors {
            for method in [Method::Hill, Method::Efg, Method::Worms] {
                let value = classical_estimate(method, &sample, k)
                    .map(|e| e.gamma1_hat.to_string())
                    .unwrap_or_default();
                writeln!(out, "{k},,{method},{value},").unwrap();
            }
        }
    }
    Ok(out)
}

/// How an injection table modifies the largest uncensored times.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InjectionMode {
    /// Replace each time by the table's replacement value.
    Absolute,
    /// Multiply each time by `replacement / original`.
    Relative,
}

/// Replaces the `m` largest uncensored times, largest first, using the
/// table entries sorted by decreasing original value. Row order and
/// censoring indicators are preserved.
pub fn contaminate(
    observations: &[CensoredObservation],
    table: &[(f64, f64)],
    mode: InjectionMode,
) -> CliResult<Vec<CensoredObservation>> {
    let mut uncensored: Vec<usize> = (0..observations.len())
        .filter(|&i| observations[i].delta)
        .collect();
    if uncensored.len() < table.len() {
        return Err(CliError::user(format!(
            "injection needs {} uncensored rows, found {}",
            table.len(),
            uncensored.len()
        )));
    }
    uncensored.sort_by(|&a, &b| {
        observations[b]
            .z
            .total_cmp(&observations[a].z)
            .then(a.cmp(&b))
    });
    let mut entries = table.to_vec();
    entries.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out = observations.to_vec();
    for (&row, &(original, replacement)) in uncensored.iter().zip(&entries) {
        out[row].z = match mode {
            InjectionMode::Absolute => replacement,
            InjectionMode::Relative => out[row].z * (replacement / original),
        };
    }
    Ok(out)
}

pub const SWEEP_HEADER: &str = "k,alpha,abs_bias,mse,n_failures";

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::new();
    writeln!(out, "{SWEEP_HEADER}").unwrap();
    for r in &result.rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.k, r.alpha, r.abs_bias, r.mse, r.n_failures
        )
        .unwrap();
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Bias,
    Mse,
}

impl Metric {
    pub fn file_stem(self) -> &'static str {
        match self {
            Metric::Bias => "bias",
            Metric::Mse => "mse",
        }
    }
}

/// Plot data for one panel: one row per `k`, one column per `alpha`.
pub fn panel_csv(result: &SweepResult, ks: &[usize], alphas: &[f64], metric: Metric) -> String {
    let mut out = String::from("k");
    for a in alphas {
        write!(out, ",alpha={a}").unwrap();
    }
    out.push('\n');
    for &k in ks {
        write!(out, "{k}").unwrap();
        for &a in alphas {
            let v = result.get(k, a).map_or(f64::NAN, |r| match metric {
                Metric::Bias => r.abs_bias,
                Metric::Mse => r.mse,
            });
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Default)]
pub struct SweepRun {
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub threads: Option<usize>,
    pub emit_svg: bool,
}

/// Runs every contamination level of `config` and writes, per level `e`,
/// `sweep_eps{e}.csv`, `bias_eps{e}.csv` and `mse_eps{e}.csv` (plus SVG
/// charts on request) into `out_dir`. Returns the written paths.
pub fn run_sweep_files(
    config: &SweepConfig,
    run: &SweepRun,
    out_dir: &Path,
) -> CliResult<Vec<PathBuf>> {
    let mut config = config.clone();
    if let Some(seed) = run.seed {
        config.seed = seed;
    }
    if let Some(r) = run.replicates {
        config.replicates = r;
    }
    let specs = config.specs()?;
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let mut write = |name: String, text: &str| -> CliResult<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, text)?;
        written.push(path);
        Ok(())
    };
    for (epsilon, spec) in specs {
        let result = match run.threads {
            Some(t) => run_sweep_with_threads(&spec, t)?,
            None => run_sweep(&spec)?,
        };
        let tag = format!("eps{epsilon:.2}");
        write(format!("sweep_{tag}.csv"), &sweep_csv(&result))?;
        for metric in [Metric::Bias, Metric::Mse] {
            let stem = metric.file_stem();
            write(
                format!("{stem}_{tag}.csv"),
                &panel_csv(&result, &spec.k_grid, &spec.alphas, metric),
            )?;
            if run.emit_svg {
                let series: Vec<(String, Vec<f64>)> = spec
                    .alphas
                    .iter()
                    .map(|&a| {
                        let ys = spec
                            .k_grid
                            .iter()
                            .map(|&k| {
                                result.get(k, a).map_or(f64::NAN, |r| match metric {
                                    Metric::Bias => r.abs_bias,
                                    Metric::Mse => r.mse,
                                })
                            })
                            .collect();
                        (format!("alpha = {a}"), ys)
                    })
                    .collect();
                let xs: Vec<f64> = spec.k_grid.iter().map(|&k| k as f64).collect();
                let title = format!(
                    "{} (epsilon = {epsilon:.2})",
                    if metric == Metric::Bias {
                        "Bias"
                    } else {
                        "MSE"
                    }
                );
                write(
                    format!("{stem}_{tag}.svg"),
                    &svg::line_chart(&title, "k", &xs, &series),
                )?;
            }
        }
    }
    Ok(written)
}

pub const CONSTANTS_HEADER: &str =
    "alpha,gamma1,gamma2,p,tau1,eta_star,mu,sigma2,sigma2_mc,mc_stderr";

/// Header and one row of asymptotic constants with the Monte Carlo check.
pub fn constants_table(
    alpha: f64,
    gamma1: f64,
    p: f64,
    tau1: f64,
    oracle: &GaussianOracleConfig,
) -> CliResult<String> {
    if !(p > 0.5) {
        return Err(Error::VarianceRequiresP(p).into());
    }
    // The second-order shape parameter does not enter the constants.
    let model = ModelParams::from_p(gamma1, p, 1.0, tau1)?;
    let c = AsymptoticConstants::compute(alpha, &model, &QuadOptions::default())?;
    let mc = sigma_squared_mc(alpha, model.gamma1, model.gamma2, oracle)?;
    Ok(format!(
        "{CONSTANTS_HEADER}\n{},{},{},{},{},{},{},{},{},{}\n",
        alpha,
        model.gamma1,
        model.gamma2,
        p,
        tau1,
        c.eta_star,
        c.mu.value,
        c.sigma2,
        mc.estimate,
        mc.stderr
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub n: usize,
    pub gamma1: f64,
    pub p: f64,
    pub eta: f64,
    pub seed: u64,
    pub scale: f64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            n: 2754,
            gamma1: 0.5,
            p: 0.7,
            eta: 0.25,
            seed: 1,
            scale: 1.0,
        }
    }
}

/// Burr lifetimes with Fréchet censoring, multiplied by `scale`.
pub fn synthesize(opts: &SynthOptions) -> CliResult<Vec<CensoredObservation>> {
    if !(opts.scale.is_finite() && opts.scale > 0.0) {
        return Err(CliError::user("scale must be positive"));
    }
    let model = ModelParams::from_p(opts.gamma1, opts.p, opts.eta, -opts.gamma1 / opts.eta)?;
    let obs = sample_contaminated_censored(
        opts.n,
        &model,
        &ContaminationSpec::none(opts.eta),
        opts.seed,
    )?;
    Ok(obs
        .into_iter()
        .map(|o| CensoredObservation {
            z: o.z * opts.scale,
            delta: o.delta,
        })
        .collect())
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
    fn toy_mns_row() {
        let data = obs(&[(1.0, false), (2.0, true), (5.0, true)]);
        let opts = EstimateOptions {
            k_min: 1,
            k_max: Some(1),
            k_step: 1,
            alphas: vec![0.0],
            ..Default::default()
        };
        let table = estimate_table(&data, &opts).unwrap();
        let (header, row) = table.trim_end().split_once('\n').unwrap();
        assert_eq!(header, ESTIMATE_HEADER);
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[..3], ["1", "0", "MNS"]);
        assert_eq!(cells[4], "");
        let value: f64 = cells[3].parse().unwrap();
        assert!((value - (5.0f64 / 2.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn k_must_stay_below_n() {
        let data = obs(&[(1.0, false), (2.0, true), (5.0, true)]);
        let opts = EstimateOptions {
            k_min: 1,
            k_max: Some(3),
            ..Default::default()
        };
        assert!(estimate_table(&data, &opts).is_err());
    }

    #[test]
    fn failures_leave_empty_cells() {
        let data = obs(&[(1.0, true), (2.0, true), (5.0, false)]);
        let opts = EstimateOptions {
            k_min: 1,
            k_max: Some(1),
            k_step: 1,
            alphas: vec![0.5],
            competitors: true,
            ..Default::default()
        };
        let table = estimate_table(&data, &opts).unwrap();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines[1], "1,0.5,MDPD,,");
        assert!(lines[2].starts_with("1,,Hill,"));
        assert_eq!(lines[3], "1,,EFG,,");
    }

    #[test]
    fn contamination_by_rank() {
        let data = obs(&[(3.0, true), (9.0, false), (5.0, true), (1.0, true)]);
        let out = contaminate(&data, &[(5.0, 10.0)], InjectionMode::Absolute).unwrap();
        assert_eq!(
            out,
            obs(&[(3.0, true), (9.0, false), (10.0, true), (1.0, true)])
        );
        let out = contaminate(&data, &[(1.0, 2.0)], InjectionMode::Relative).unwrap();
        assert_eq!(
            out,
            obs(&[(3.0, true), (9.0, false), (10.0, true), (1.0, true)])
        );
        assert_eq!(
            contaminate(&data, &[], InjectionMode::Absolute).unwrap(),
            data
        );
        assert!(contaminate(&data, &[(1.0, 2.0); 4], InjectionMode::Absolute).is_err());
    }

    #[test]
    fn constants_guard() {
        let err =
            constants_table(1.0, 1.0, 0.5, 0.0, &GaussianOracleConfig::default()).unwrap_err();
        assert!(err
            .to_string()
            .contains("variance formula requires p > 1/2"));
    }
}
