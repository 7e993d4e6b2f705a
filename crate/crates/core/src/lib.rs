//! Robust tail-index estimation for heavy-tailed, randomly right-censored
//! data by minimum density power divergence (MDPD).
//!
//! The crate provides the classical censored estimators (Hill, EFG, Worms,
//! MNS), the MDPD estimator with a bracketing root finder, the constants of
//! its normal limit, and a Monte Carlo engine for contaminated samples.

pub mod asymptotics;
pub mod empirical;
pub mod error;
pub mod estimators;
pub mod quadrature;
pub mod root;
pub mod sample;
pub mod simulation;

pub use asymptotics::{
    asymptotic_ci, eta_star, mu, phi, phi_star, sigma_squared, AsymptoticConstants,
};
pub use empirical::{
    kaplan_meier_survival, mdpd_weights, na_tail_ratio, nelson_aalen_survival, WeightVector,
};
pub use error::{Error, Result};
pub use estimators::{
    censored_proportion, classical_estimate, efg_estimator, hill_gamma, mdpd_estimate,
    mdpd_objective, mdpd_residual, mns_estimator, worms_estimator, EstimateResult, Method,
    SolverDiagnostics, SolverOptions, TailFit,
};
pub use sample::{CensoredObservation, ModelParams, OrderedSample, TailConfig, TailWindow};
pub use simulation::{
    run_sweep, sample_contaminated_censored, ContaminationSpec, SweepResult, SweepRow, SweepSpec,
};
