//! Plain-text sweep configuration: one `key = value` pair per line, `#`
//! starts a comment, lists are comma separated.
//!
//! ```text
//! n = 1000
//! replicates = 200
//! gamma1 = 0.3
//! p = 0.55
//! theta1 = 0.6
//! epsilon = 0, 0.15, 0.40
//! alphas = 0, 0.1, 0.3, 0.5
//! k_min = 10
//! k_max = 300
//! k_step = 10
//! ```

use censored_mdpd::simulation::{burr_tau, ContaminationSpec, SweepSpec};
use censored_mdpd::{ModelParams, SolverOptions};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub gamma1: f64,
    pub p: f64,
    pub eta: f64,
    pub theta1: Option<f64>,
    pub epsilons: Vec<f64>,
    pub alphas: Vec<f64>,
    pub k_grid: Vec<usize>,
    pub solver: SolverOptions,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> CliResult<T> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::user(format!("invalid value for '{key}' at line {line}: {value}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> CliResult<Vec<T>> {
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_num(key, s, line))
        .collect()
}

impl SweepConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut n = 1000usize;
        let mut replicates = 200usize;
        let mut seed = 1u64;
        let mut gamma1 = None;
        let mut p = None;
        let mut eta = 0.25;
        let mut theta1 = None;
        let mut epsilons = vec![0.0];
        let mut alphas = vec![0.0, 0.1, 0.3, 0.5];
        let mut k_grid = None;
        let (mut k_min, mut k_max, mut k_step) = (10usize, 300usize, 10usize);
        let mut solver = SolverOptions::default();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::user(format!("expected 'key = value' at line {line}")))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "n" => n = parse_num(key, value, line)?,
                "replicates" => replicates = parse_num(key, value, line)?,
                "seed" => seed = parse_num(key, value, line)?,
                "gamma1" => gamma1 = Some(parse_num(key, value, line)?),
                "p" => p = Some(parse_num(key, value, line)?),
                "eta" => eta = parse_num(key, value, line)?,
                "theta1" => theta1 = Some(parse_num(key, value, line)?),
                "epsilon" => epsilons = parse_list(key, value, line)?,
                "alphas" | "alpha" => alphas = parse_list(key, value, line)?,
                "k_grid" => k_grid = Some(parse_list(key, value, line)?),
                "k_min" => k_min = parse_num(key, value, line)?,
                "k_max" => k_max = parse_num(key, value, line)?,
                "k_step" => k_step = parse_num(key, value, line)?,
                "tol" => solver.tol_abs = parse_num(key, value, line)?,
                "domain_lo" => solver.domain_lo = parse_num(key, value, line)?,
                "domain_hi" => solver.domain_hi = parse_num(key, value, line)?,
                other => {
                    return Err(CliError::user(format!(
                        "unknown config key '{other}' at line {line}"
                    )))
                }
            }
        }

        let gamma1 = gamma1.ok_or_else(|| CliError::user("missing config key 'gamma1'"))?;
        let p = p.ok_or_else(|| CliError::user("missing config key 'p'"))?;
        if epsilons.iter().any(|&e| e > 0.0) && theta1.is_none() {
            return Err(CliError::user(
                "missing config key 'theta1' (required when epsilon > 0)",
            ));
        }
        let k_grid = match k_grid {
            Some(g) => g,
            None => {
                if k_step == 0 || k_min == 0 || k_min > k_max {
                    return Err(CliError::user(
                        "invalid k range: need 1 <= k_min <= k_max and k_step >= 1",
                    ));
                }
                (k_min..=k_max).step_by(k_step).collect()
            }
        };
        if alphas.is_empty() || epsilons.is_empty() || k_grid.is_empty() {
            return Err(CliError::user(
                "alphas, epsilon and the k grid must be nonempty",
            ));
        }
        Ok(Self {
            n,
            replicates,
            seed,
            gamma1,
            p,
            eta,
            theta1,
            epsilons,
            alphas,
            k_grid,
            solver,
        })
    }

    /// One validated sweep per contamination level.
    pub fn specs(&self) -> CliResult<Vec<(f64, SweepSpec)>> {
        let model = ModelParams::from_p(
            self.gamma1,
            self.p,
            self.eta,
            burr_tau(self.gamma1, self.eta),
        )?;
        self.epsilons
            .iter()
            .map(|&epsilon| {
                let theta1 = self.theta1.unwrap_or(self.gamma1);
                let spec = SweepSpec {
                    n: self.n,
                    replicates: self.replicates,
                    model,
                    contamination: ContaminationSpec::new(epsilon, theta1, self.eta)?,
                    alphas: self.alphas.clone(),
                    k_grid: self.k_grid.clone(),
                    seed: self.seed,
                    solver: self.solver,
                };
                spec.validate()?;
                Ok((epsilon, spec))
            })
            .collect()
    }
}
