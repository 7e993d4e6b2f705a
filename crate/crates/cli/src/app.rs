use std::io::Write;
use std::path::PathBuf;

use censored_mdpd::asymptotics::GaussianOracleConfig;
use censored_mdpd::SolverOptions;
use clap::{Parser, Subcommand};

use crate::commands::{
    constants_table, contaminate, estimate_table, run_sweep_files, synthesize, EstimateOptions,
    InjectionMode, SweepRun, SynthOptions,
};
use crate::config::SweepConfig;
use crate::data::{read_dataset_file, read_injection_file, write_dataset, DEFAULT_INJECTION};
use crate::error::{CliError, CliResult};

/// Robust tail-index estimation for randomly right-censored data.
#[derive(Debug, Parser)]
#[command(name = "mdpd-tail", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the lifetime tail index over a range of k and alpha.
    Estimate {
        /// Dataset with header "time,status".
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        k_min: usize,
        /// Defaults to min(n - 1, 500).
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long, default_value_t = 10)]
        k_step: usize,
        /// Robustness level; repeat for several (default 0, 0.1, 0.3, 0.5).
        #[arg(long = "alpha")]
        alphas: Vec<f64>,
        /// Absolute tolerance on the estimating equation.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Root search interval as "lo,hi".
        #[arg(long, value_parser = parse_domain)]
        domain: Option<(f64, f64)>,
        /// Also report the Hill, EFG and Worms estimates.
        #[arg(long)]
        competitors: bool,
    },
    /// Replace the largest uncensored times by outliers.
    Contaminate {
        file: PathBuf,
        /// Table with header "original,replacement"; defaults to the built-in ten-value table.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Multiply each time by replacement/original instead of replacing it.
        #[arg(long)]
        relative: bool,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a Monte Carlo bias/MSE sweep described by a config file.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        replicates: Option<usize>,
        /// Use 2000 replicates.
        #[arg(long, conflicts_with = "replicates")]
        full_scale: bool,
        /// Worker threads; the output does not depend on this.
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Also write SVG charts next to the plot-data files.
        #[arg(long)]
        emit_svg: bool,
    },
    /// Print the asymptotic constants with a Monte Carlo variance check.
    Constants {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        gamma1: f64,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        tau1: f64,
        #[arg(long, default_value_t = 20_000)]
        mc_replicates: usize,
        #[arg(long, default_value_t = 4096)]
        grid_points: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Write a synthetic censored dataset in the "time,status" format.
    Synth {
        #[arg(long, default_value_t = 2754)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        gamma1: f64,
        #[arg(long, default_value_t = 0.7)]
        p: f64,
        #[arg(long, default_value_t = 0.25)]
        eta: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Multiply every time by this factor.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_domain(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected \"lo,hi\"")?;
    let lo: f64 = lo.trim().parse().map_err(|_| "invalid lower bound")?;
    let hi: f64 = hi.trim().parse().map_err(|_| "invalid upper bound")?;
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err("need 0 < lo < hi".into());
    }
    Ok((lo, hi))
}

fn emit(output: Option<&PathBuf>, text: &[u8]) -> CliResult<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::user(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text)?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Estimate {
            file,
            k_min,
            k_max,
            k_step,
            alphas,
            tol,
            domain,
            competitors,
        } => {
            let observations = read_dataset_file(&file)?;
            let mut solver = SolverOptions {
                tol_abs: tol,
                ..SolverOptions::default()
            };
            if let Some((lo, hi)) = domain {
                solver.domain_lo = lo;
                solver.domain_hi = hi;
            }
            let mut opts = EstimateOptions {
                k_min,
                k_max,
                k_step,
                solver,
                competitors,
                ..Default::default()
            };
            if !alphas.is_empty() {
                opts.alphas = alphas;
            }
            emit(None, estimate_table(&observations, &opts)?.as_bytes())
        }
        Command::Contaminate {
            file,
            table,
            relative,
            output,
        } => {
            let observations = read_dataset_file(&file)?;
            let table = match table {
                Some(path) => read_injection_file(&path)?,
                None => DEFAULT_INJECTION.to_vec(),
            };
            let mode = if relative {
                InjectionMode::Relative
            } else {
                InjectionMode::Absolute
            };
            let contaminated = contaminate(&observations, &table, mode)?;
            let mut buf = Vec::new();
            write_dataset(&mut buf, &contaminated)?;
            emit(output.as_ref(), &buf)
        }
        Command::Sweep {
            config,
            seed,
            replicates,
            full_scale,
            threads,
            out_dir,
            emit_svg,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::user(format!("cannot read {}: {e}", config.display())))?;
            let config = SweepConfig::parse(&text)?;
            let run = SweepRun {
                seed,
                replicates: if full_scale { Some(2000) } else { replicates },
                threads,
                emit_svg,
            };
            for path in run_sweep_files(&config, &run, &out_dir)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Constants {
            alpha,
            gamma1,
            p,
            tau1,
            mc_replicates,
            grid_points,
            seed,
        } => {
            let oracle = GaussianOracleConfig {
                grid_points,
                replicates: mc_replicates,
                seed,
            };
            emit(
                None,
                constants_table(alpha, gamma1, p, tau1, &oracle)?.as_bytes(),
            )
        }
        Command::Synth {
            n,
            gamma1,
            p,
            eta,
            seed,
            scale,
            output,
        } => {
            let observations = synthesize(&SynthOptions {
                n,
                gamma1,
                p,
                eta,
                seed,
                scale,
            })?;
            let mut buf = Vec::new();
            write_dataset(&mut buf, &observations)?;
            emit(output.as_ref(), &buf)
        }
    }
}
