//! Constants of the normal limit of the MDPD estimator,
//!
//! ```text
//! (1 + 1/alpha)^{-1} eta* sqrt(k) (gamma1_hat - gamma1) -> N(lambda mu, sigma^2),
//! ```
//!
//! and the interval estimates built on it.
//!
//! `sigma^2` is the variance of the centred Gaussian functional
//! `∫_1^∞ J(x) phi(x) dx`, where `J` is the limit of the Nelson–Aalen tail
//! product-limit process. Writing `U(x) = x^{-1/gamma}`, `B1`, `B2` for
//! independent Brownian motions with variance rates `p` and `q`, and
//! `a = ∫ x^{-1/gamma1} phi`, the functional is
//!
//! ```text
//! ∫ B1(U(x)) psi1(x) dx - a B1(1) + (1/gamma1) ∫ B2(U(x)) psi2(x) dx
//! psi1(x) = x^{1/gamma2} phi(x) - (1/gamma2) x^{1/gamma - 1} phi*(x)
//! psi2(x) = x^{1/gamma - 1} phi*(x)
//! ```
//!
//! so that `sigma^2 = p ∫_0^1 (F1(s) - a)^2 ds + (q/gamma1^2) ∫_0^1 F2(s)^2 ds`
//! with `F_i(s) = ∫_1^{s^{-gamma}} psi_i`. The alternative algebraic
//! arrangement with `x^{1/gamma}` factors is available as
//! [`sigma_squared_printed`] for comparison only.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{invalid, Error, Result};
use crate::estimators::{EstimateResult, Method};
use crate::quadrature::{integrate, integrate_to_infinity, QuadOptions};
use crate::sample::ModelParams;

fn check_alpha_gamma(alpha: f64, gamma1: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid(format!("alpha must be positive, got {alpha}")));
    }
    if !(gamma1.is_finite() && gamma1 > 0.0) {
        return Err(invalid(format!("gamma1 must be positive, got {gamma1}")));
    }
    Ok(())
}

/// Sum of terms `c * x^beta * (log x)^m`, `m ∈ {0, 1}`.
#[derive(Debug, Clone, Default)]
struct PowerLog {
    terms: Vec<(f64, f64, u8)>,
}

impl PowerLog {
    fn eval_log(&self, lx: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, beta, m)| {
                let v = c * (beta * lx).exp();
                if m == 0 {
                    v
                } else {
                    v * lx
                }
            })
            .sum()
    }

    fn eval(&self, x: f64) -> f64 {
        self.eval_log(x.ln())
    }

    /// `x^shift * self(x)`.
    fn shifted(&self, shift: f64, scale: f64) -> PowerLog {
        PowerLog {
            terms: self
                .terms
                .iter()
                .map(|&(c, beta, m)| (c * scale, beta + shift, m))
                .collect(),
        }
    }

    fn plus(mut self, other: PowerLog) -> PowerLog {
        self.terms.extend(other.terms);
        self
    }

    /// `∫_1^x self(t) dt` given `lx = log x`.
    fn integral_from_one_log(&self, lx: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, beta, m)| {
                let b = beta + 1.0;
                let y = b * lx;
                if m == 0 {
                    // (x^b - 1) / b
                    if y.abs() < 1e-300 {
                        c * lx
                    } else {
                        c * lx * y.exp_m1() / y
                    }
                } else {
                    // x^b (lx / b - 1 / b^2) + 1 / b^2 = lx^2 g(y)
                    c * lx * lx * log_moment_kernel(y)
                }
            })
            .sum()
    }
}

/// `(y e^y - e^y + 1) / y^2`, stable near zero.
fn log_moment_kernel(y: f64) -> f64 {
    if y.abs() < 1e-3 {
        0.5 + y / 3.0 + y * y / 8.0 + y * y * y / 30.0
    } else {
        (y * y.exp() - y.exp_m1()) / (y * y)
    }
}

/// Building blocks shared by `phi`, `phi*` and the variance.
#[derive(Debug, Clone, Copy)]
struct PhiShape {
    scale: f64,
    a: f64,
    b: f64,
    decay: f64,
}

impl PhiShape {
    fn new(alpha: f64, gamma1: f64) -> Self {
        Self {
            scale: alpha / gamma1.powf(alpha + 3.0),
            a: gamma1 + alpha * gamma1 + alpha * gamma1 * gamma1,
            b: alpha * (1.0 + gamma1),
            decay: (alpha + gamma1 + alpha * gamma1) / gamma1,
        }
    }

    fn phi(&self) -> PowerLog {
        PowerLog {
            terms: vec![
                (self.scale * self.a, -self.decay, 0),
                (-self.scale * self.b, -self.decay, 1),
            ],
        }
    }

    /// `phi*(x) = ∫_x^∞ t^{-1/gamma1} phi(t) dt` in closed form.
    fn phi_star(&self, gamma1: f64) -> PowerLog {
        let d = self.decay + 1.0 / gamma1 - 1.0;
        PowerLog {
            terms: vec![
                (self.scale * (self.a / d - self.b / (d * d)), -d, 0),
                (-self.scale * self.b / d, -d, 1),
            ],
        }
    }
}

/// `phi(x) = alpha / g^{alpha+3} (g + alpha g + alpha g^2 - alpha (1 + g) log x) / x^{(alpha + g + alpha g)/g}`.
pub fn phi(x: f64, alpha: f64, gamma1: f64) -> Result<f64> {
    check_alpha_gamma(alpha, gamma1)?;
    if !(x >= 1.0) {
        return Err(invalid(format!("phi is defined for x >= 1, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(PhiShape::new(alpha, gamma1).phi().eval(x))
}

/// `∫_x^∞ t^{-1/gamma1} phi(t) dt`, closed form.
pub fn phi_star(x: f64, alpha: f64, gamma1: f64) -> Result<f64> {
    check_alpha_gamma(alpha, gamma1)?;
    if !(x >= 1.0) {
        return Err(invalid(format!("phi* is defined for x >= 1, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(PhiShape::new(alpha, gamma1).phi_star(gamma1).eval(x))
}

/// `phi*` by adaptive quadrature of its defining integral.
pub fn phi_star_by_quadrature(x: f64, alpha: f64, gamma1: f64, opts: &QuadOptions) -> Result<f64> {
    check_alpha_gamma(alpha, gamma1)?;
    if !(x >= 1.0) {
        return Err(invalid(format!("phi* is defined for x >= 1, got {x}")));
    }
    let shape = PhiShape::new(alpha, gamma1).phi();
    let q = integrate_to_infinity(|t| t.powf(-1.0 / gamma1) * shape.eval(t), x, opts)?;
    Ok(q.value)
}

/// `eta* = (1 + alpha) / g^{2+alpha} (alpha^2 (1+g)^2 + 1) / (alpha (1+g) + 1)^3`.
pub fn eta_star(alpha: f64, gamma1: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(invalid(format!("alpha must be nonnegative, got {alpha}")));
    }
    if !(gamma1.is_finite() && gamma1 > 0.0) {
        return Err(invalid(format!("gamma1 must be positive, got {gamma1}")));
    }
    let s = alpha * (1.0 + gamma1);
    Ok((1.0 + alpha) / gamma1.powf(2.0 + alpha) * (s * s + 1.0) / (s + 1.0).powi(3))
}

/// `(1 + alpha) ∫_1^∞ (d/dg l_g(x))^2 l_g(x)^{alpha - 1} dx` by quadrature,
/// where `l_g(x) = g^{-1} x^{-1-1/g}` is the Pareto density.
pub fn eta_star_by_quadrature(alpha: f64, gamma1: f64, opts: &QuadOptions) -> Result<f64> {
    check_alpha_gamma(alpha, gamma1)?;
    let g = gamma1;
    let integrand = |x: f64| {
        let lx = x.ln();
        let score = (lx - g) / g.powi(3) * (-(1.0 + 1.0 / g) * lx).exp();
        let dens = g.powf(1.0 - alpha) * (-(alpha - 1.0) * (1.0 + 1.0 / g) * lx).exp();
        score * score * dens
    };
    let q = integrate_to_infinity(integrand, 1.0, opts)?;
    Ok((1.0 + alpha) * q.value)
}

/// Bias constant `mu` with the cross-check against the alternative closed
/// form `alpha/(tau g^{alpha+2}) (tau-1)/(alpha-tau+alpha g+1) + tau g^2 (2alpha-tau+2alpha g+2)/((alpha+alpha g+1)^2 (alpha-tau+alpha g+1)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuValue {
    /// Integral definition, evaluated by quadrature.
    pub value: f64,
    /// The alternative closed form; undefined at `tau1 = 0`.
    pub printed_closed_form: Option<f64>,
    /// `|printed - value| / |value|` when the closed form is defined.
    pub relative_discrepancy: Option<f64>,
}

impl MuValue {
    pub fn discrepancy_flagged(&self) -> bool {
        self.relative_discrepancy.is_some_and(|d| d > 1e-6)
    }
}

pub fn mu(alpha: f64, gamma1: f64, tau1: f64, opts: &QuadOptions) -> Result<MuValue> {
    check_alpha_gamma(alpha, gamma1)?;
    if !(tau1 <= 0.0) {
        return Err(invalid(format!("tau1 must be nonpositive, got {tau1}")));
    }
    let g = gamma1;
    let shape = PhiShape::new(alpha, g).phi();
    let kernel = move |lx: f64| {
        if tau1 == 0.0 {
            lx / (g * g)
        } else {
            (tau1 * lx / g).exp_m1() / (g * tau1)
        }
    };
    let q = integrate_to_infinity(
        |x| {
            let lx = x.ln();
            (-lx / g).exp() * kernel(lx) * shape.eval_log(lx)
        },
        1.0,
        opts,
    )?;
    let value = q.value;
    let printed_closed_form = (tau1 != 0.0).then(|| {
        let d1 = alpha - tau1 + alpha * g + 1.0;
        let d0 = alpha + alpha * g + 1.0;
        alpha / (tau1 * g.powf(alpha + 2.0)) * (tau1 - 1.0) / d1
            + tau1 * g * g * (2.0 * alpha - tau1 + 2.0 * alpha * g + 2.0) / (d0 * d0 * d1 * d1)
    });
    let relative_discrepancy = printed_closed_form.map(|c| (c - value).abs() / value.abs());
    Ok(MuValue {
        value,
        printed_closed_form,
        relative_discrepancy,
    })
}

/// The model pieces entering the variance.
#[derive(Debug, Clone)]
struct VarianceModel {
    p: f64,
    q: f64,
    gamma: f64,
    gamma1: f64,
    a: f64,
    psi1: PowerLog,
    psi2: PowerLog,
}

impl VarianceModel {
    fn new(alpha: f64, gamma1: f64, gamma2: f64) -> Result<Self> {
        check_alpha_gamma(alpha, gamma1)?;
        if !(gamma2.is_finite() && gamma2 > 0.0) {
            return Err(invalid(format!("gamma2 must be positive, got {gamma2}")));
        }
        let p = gamma2 / (gamma1 + gamma2);
        if !(p > 0.5) {
            return Err(Error::VarianceRequiresP(p));
        }
        let gamma = gamma1 * gamma2 / (gamma1 + gamma2);
        let shape = PhiShape::new(alpha, gamma1);
        let phi = shape.phi();
        let phi_star = shape.phi_star(gamma1);
        let a = phi_star.eval(1.0);
        let psi2 = phi_star.shifted(1.0 / gamma - 1.0, 1.0);
        let psi1 = phi
            .shifted(1.0 / gamma2, 1.0)
            .plus(phi_star.shifted(1.0 / gamma - 1.0, -1.0 / gamma2));
        Ok(Self {
            p,
            q: 1.0 - p,
            gamma,
            gamma1,
            a,
            psi1,
            psi2,
        })
    }

    /// `p psi1(x) psi1(y) + (q / gamma1^2) psi2(x) psi2(y)`.
    fn kernel(&self, x: f64, y: f64) -> f64 {
        self.p * self.psi1.eval(x) * self.psi1.eval(y)
            + self.q / (self.gamma1 * self.gamma1) * self.psi2.eval(x) * self.psi2.eval(y)
    }
}

/// Asymptotic variance `sigma^2`; requires `gamma1 < gamma2` (`p > 1/2`).
pub fn sigma_squared(alpha: f64, gamma1: f64, gamma2: f64, opts: &QuadOptions) -> Result<f64> {
    let m = VarianceModel::new(alpha, gamma1, gamma2)?;
    // s = e^{-t}, upper limit log x = gamma t.
    let q = integrate_to_infinity(
        |t| {
            let lx = m.gamma * t;
            let f1 = m.psi1.integral_from_one_log(lx) - m.a;
            let f2 = m.psi2.integral_from_one_log(lx);
            (m.p * f1 * f1 + m.q / (m.gamma1 * m.gamma1) * f2 * f2) * (-t).exp()
        },
        0.0,
        opts,
    )?;
    Ok(q.value)
}

/// Which variable the inner quadrature of [`sigma_squared_double_integral`] runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerVariable {
    X,
    Y,
}

/// `sigma^2` as the double integral
/// `∬ min(U(x), U(y)) K(x, y) dx dy - 2 p a ∫ U psi1 + p a^2`, by nested quadrature.
pub fn sigma_squared_double_integral(
    alpha: f64,
    gamma1: f64,
    gamma2: f64,
    inner: InnerVariable,
    opts: &QuadOptions,
) -> Result<f64> {
    let m = VarianceModel::new(alpha, gamma1, gamma2)?;
    let u = |x: f64| x.powf(-1.0 / m.gamma);
    let kernel = |outer: f64, v: f64| match inner {
        InnerVariable::Y => m.kernel(outer, v),
        InnerVariable::X => m.kernel(v, outer),
    };
    let failure = std::cell::Cell::new(None);
    let slice = |outer: f64| -> f64 {
        let below = integrate(|v| kernel(outer, v), 1.0, outer, opts).map(|q| q.value);
        let above =
            integrate_to_infinity(|v| u(v) * kernel(outer, v), outer, opts).map(|q| q.value);
        match (below, above) {
            (Ok(b), Ok(a)) => u(outer) * b + a,
            (Err(e), _) | (_, Err(e)) => {
                failure.set(Some(e));
                0.0
            }
        }
    };
    let double = integrate_to_infinity(slice, 1.0, opts)?.value;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let cross = integrate_to_infinity(|x| u(x) * m.psi1.eval(x), 1.0, opts)?.value;
    Ok(double - 2.0 * m.p * m.a * cross + m.p * m.a * m.a)
}

/// The variance kernel `K(x, y)` for `x, y >= 1`.
pub fn variance_kernel(x: f64, y: f64, alpha: f64, gamma1: f64, gamma2: f64) -> Result<f64> {
    if !(x >= 1.0 && y >= 1.0) {
        return Err(invalid("kernel arguments must be >= 1"));
    }
    Ok(VarianceModel::new(alpha, gamma1, gamma2)?.kernel(x, y))
}

/// The variance arrangement with `psi1 = x^{1/gamma2} phi - q x^{1/gamma} phi*`,
/// `psi2 = x^{1/gamma} phi*` and cross term `-2 ∫ x^{-1/gamma} psi1`.
///
/// Kept for comparison with [`sigma_squared`]; its integrals diverge for
/// small `alpha`, in which case a quadrature error is returned.
pub fn sigma_squared_printed(
    alpha: f64,
    gamma1: f64,
    gamma2: f64,
    opts: &QuadOptions,
) -> Result<f64> {
    let m = VarianceModel::new(alpha, gamma1, gamma2)?;
    let shape = PhiShape::new(alpha, gamma1);
    let phi_star = shape.phi_star(gamma1);
    let psi2 = phi_star.shifted(1.0 / m.gamma, 1.0);
    let psi1 = shape
        .phi()
        .shifted(1.0 / gamma2, 1.0)
        .plus(phi_star.shifted(1.0 / m.gamma, -m.q));
    let q = integrate_to_infinity(
        |t| {
            let lx = m.gamma * t;
            let f1 = psi1.integral_from_one_log(lx);
            let f2 = psi2.integral_from_one_log(lx);
            (m.p * f1 * f1 + m.q / (gamma1 * gamma1) * f2 * f2 - 2.0 * f1) * (-t).exp()
        },
        0.0,
        opts,
    )?;
    Ok(q.value + m.p * m.a * m.a)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianOracleConfig {
    pub grid_points: usize,
    pub replicates: usize,
    pub seed: u64,
}

impl Default for GaussianOracleConfig {
    fn default() -> Self {
        Self {
            grid_points: 4096,
            replicates: 20_000,
            seed: 0x5e_ed0f_7a11,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloVariance {
    pub estimate: f64,
    pub stderr: f64,
    /// Sample mean of the simulated functional and its standard error.
    pub mean: f64,
    pub mean_stderr: f64,
}

/// Monte Carlo estimate of `sigma^2` from simulated Brownian paths on a
/// uniform grid of the unit interval.
///
/// Each replicate draws its own ChaCha8 stream (`stream = replicate index`)
/// so the result does not depend on the thread schedule.
pub fn sigma_squared_mc(
    alpha: f64,
    gamma1: f64,
    gamma2: f64,
    config: &GaussianOracleConfig,
) -> Result<MonteCarloVariance> {
    let m = VarianceModel::new(alpha, gamma1, gamma2)?;
    if config.grid_points < 1000 || config.replicates < 1000 {
        return Err(invalid(
            "the Gaussian oracle needs at least 1000 grid points and 1000 replicates",
        ));
    }
    let n = config.grid_points;
    let opts = QuadOptions::with_tolerances(1e-13, 1e-10);
    // Cell j covers u in [j/n, (j+1)/n], i.e. x in [((j+1)/n)^{-gamma}, (j/n)^{-gamma}].
    // The path is interpolated linearly in u inside each cell, so a cell
    // contributes B(u_j) lo_j + B(u_{j+1}) hi_j.
    let h = 1.0 / n as f64;
    let x_at = |j: usize| (j as f64 * h).powf(-m.gamma);
    let u_of = |x: f64| x.powf(-1.0 / m.gamma);
    let cell_weights = |psi: &PowerLog| -> Result<Vec<(f64, f64)>> {
        (0..n)
            .map(|j| {
                let lo = x_at(j + 1);
                let (uj, uj1) = (j as f64 * h, (j + 1) as f64 * h);
                if j == 0 {
                    // B(0) = 0, only the upper node carries weight.
                    let hi = integrate_to_infinity(|x| psi.eval(x) * u_of(x) / h, lo, &opts)?;
                    return Ok((0.0, hi.value));
                }
                let hi_x = x_at(j);
                let w_lo = integrate(|x| psi.eval(x) * (uj1 - u_of(x)) / h, lo, hi_x, &opts)?;
                let w_hi = integrate(|x| psi.eval(x) * (u_of(x) - uj) / h, lo, hi_x, &opts)?;
                Ok((w_lo.value, w_hi.value))
            })
            .collect()
    };
    let w1 = cell_weights(&m.psi1)?;
    let w2 = cell_weights(&m.psi2)?;
    let sd1 = (m.p * h).sqrt();
    let sd2 = (m.q * h).sqrt();
    let inv_gamma1 = 1.0 / m.gamma1;

    let draws: Vec<f64> = (0..config.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(r as u64);
            let (mut b1, mut b2) = (0.0f64, 0.0f64);
            let (mut s1, mut s2) = (0.0f64, 0.0f64);
            for j in 0..n {
                let z1: f64 = StandardNormal.sample(&mut rng);
                let z2: f64 = StandardNormal.sample(&mut rng);
                let nb1 = b1 + sd1 * z1;
                let nb2 = b2 + sd2 * z2;
                s1 += b1 * w1[j].0 + nb1 * w1[j].1;
                s2 += b2 * w2[j].0 + nb2 * w2[j].1;
                b1 = nb1;
                b2 = nb2;
            }
            s1 - m.a * b1 + inv_gamma1 * s2
        })
        .collect();

    let r = draws.len() as f64;
    let mean = draws.iter().sum::<f64>() / r;
    let centred: Vec<f64> = draws.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = centred.iter().sum::<f64>() / (r - 1.0);
    let m4 = centred.iter().map(|c| (c - var) * (c - var)).sum::<f64>() / (r - 1.0);
    Ok(MonteCarloVariance {
        estimate: var,
        stderr: (m4 / r).sqrt(),
        mean,
        mean_stderr: (var / r).sqrt(),
    })
}

/// `eta*`, `mu` and `sigma^2` for one `(alpha, model)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticConstants {
    pub alpha: f64,
    pub model: ModelParams,
    pub eta_star: f64,
    pub mu: MuValue,
    pub sigma2: f64,
}

impl AsymptoticConstants {
    pub fn compute(alpha: f64, model: &ModelParams, opts: &QuadOptions) -> Result<Self> {
        Ok(Self {
            alpha,
            model: *model,
            eta_star: eta_star(alpha, model.gamma1)?,
            mu: mu(alpha, model.gamma1, model.tau1, opts)?,
            sigma2: sigma_squared(alpha, model.gamma1, model.gamma2, opts)?,
        })
    }

    /// Standard deviation of `gamma1_hat` for a window of size `k`:
    /// `(1 + 1/alpha) sigma / (eta* sqrt(k))`.
    pub fn standard_error(&self, k: usize) -> f64 {
        (1.0 + 1.0 / self.alpha) * self.sigma2.sqrt() / (self.eta_star * (k as f64).sqrt())
    }

    /// Mean of the normal limit for a given `lambda`.
    pub fn bias_term(&self, lambda: f64) -> f64 {
        lambda * self.mu.value
    }

    /// Header matching [`AsymptoticConstants::csv_row`].
    pub const CSV_HEADER: &'static str = "alpha,gamma1,gamma2,p,tau1,eta_star,mu,sigma2";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.alpha,
            self.model.gamma1,
            self.model.gamma2,
            self.model.p(),
            self.model.tau1,
            self.eta_star,
            self.mu.value,
            self.sigma2
        )
    }
}

/// Two-sided normal interval `gamma1_hat ± z (1 + 1/alpha) sigma / (eta* sqrt(k))`.
///
/// `model` carries the plug-in tail indices used for the constants. The
/// asymptotic bias is not corrected for.
pub fn asymptotic_ci(
    estimate: &EstimateResult,
    model: &ModelParams,
    level: f64,
) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if estimate.method != Method::Mdpd || !(estimate.alpha > 0.0) {
        return Err(invalid("interval requires an MDPD estimate with alpha > 0"));
    }
    let eta = eta_star(estimate.alpha, model.gamma1)?;
    let sigma2 = sigma_squared(
        estimate.alpha,
        model.gamma1,
        model.gamma2,
        &QuadOptions::default(),
    )?;
    let z = normal_quantile(0.5 + 0.5 * level);
    let half =
        z * (1.0 + 1.0 / estimate.alpha) * sigma2.sqrt() / (eta * (estimate.k as f64).sqrt());
    Ok((estimate.gamma1_hat - half, estimate.gamma1_hat + half))
}

/// Plug-in model for [`asymptotic_ci`]: `gamma2 = p_hat gamma1_hat / (1 - p_hat)`.
///
/// The second-order fields are set to `eta = 1`, `tau1 = 0`; the interval
/// does not use them.
pub fn plug_in_model(gamma1_hat: f64, p_hat: f64) -> Result<ModelParams> {
    if !(p_hat > 0.5) {
        return Err(Error::VarianceRequiresP(p_hat));
    }
    let gamma2 = crate::simulation::gamma2_from_p(gamma1_hat, p_hat)?;
    ModelParams::new(gamma1_hat, gamma2, 1.0, 0.0)
}

pub fn normal_quantile(u: f64) -> f64 {
    Normal::standard().inverse_cdf(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> QuadOptions {
        QuadOptions::with_tolerances(1e-14, 1e-12)
    }

    #[test]
    fn phi_by_hand() {
        assert!((phi(1.0, 1.0, 1.0).unwrap() - 3.0).abs() < 1e-15);
        let x = 2.7f64;
        let expected = (3.0 - 2.0 * x.ln()) / x.powi(3);
        assert!((phi(x, 1.0, 1.0).unwrap() - expected).abs() < 1e-14);
        let turn = 1.5f64.exp();
        assert!(phi(turn * 0.999, 1.0, 1.0).unwrap() > 0.0);
        assert!(phi(turn * 1.001, 1.0, 1.0).unwrap() < 0.0);
        assert!(phi(1e12, 1.0, 1.0).unwrap().abs() < 1e-30);
        assert!(phi(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn phi_star_by_hand() {
        assert!((phi_star(1.0, 1.0, 1.0).unwrap() - 7.0 / 9.0).abs() < 1e-15);
        assert!(phi_star(1e9, 0.5, 0.3).unwrap().abs() < 1e-20);
        assert!(phi_star(0.9, 0.5, 0.3).is_err());
    }

    #[test]
    fn eta_star_by_hand() {
        assert!((eta_star(0.0, 0.5).unwrap() - 4.0).abs() < 1e-14);
        assert!((eta_star(1.0, 1.0).unwrap() - 10.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn mu_at_tau_zero() {
        let m = mu(1.0, 1.0, 0.0, &tight()).unwrap();
        assert!((m.value - 5.0 / 27.0).abs() < 1e-12);
        assert!(m.printed_closed_form.is_none());
        assert!(mu(1.0, 1.0, 0.1, &tight()).is_err());
    }

    #[test]
    fn power_log_integral_matches_quadrature() {
        let f = PowerLog {
            terms: vec![
                (1.3, -2.5, 0),
                (-0.7, -2.5, 1),
                (0.2, -1.0, 0),
                (0.4, -1.0, 1),
                (0.1, 0.3, 1),
            ],
        };
        for x in [1.0, 1.5, 7.0, 40.0] {
            let q = integrate(|t| f.eval(t), 1.0, x, &tight()).unwrap().value;
            let c = f.integral_from_one_log(f64::ln(x));
            assert!((q - c).abs() < 1e-11 * (1.0 + q.abs()), "x={x}: {q} vs {c}");
        }
    }

    #[test]
    fn variance_needs_p_above_half() {
        assert_eq!(
            sigma_squared(0.1, 0.5, 0.5, &QuadOptions::default()),
            Err(Error::VarianceRequiresP(0.5))
        );
        assert!(sigma_squared(0.1, 0.3, 0.7, &QuadOptions::default()).unwrap() > 0.0);
    }

    #[test]
    fn kernel_is_symmetric() {
        for &(x, y) in &[(1.0, 2.0), (3.5, 1.2), (10.0, 40.0)] {
            let a = variance_kernel(x, y, 0.3, 0.3, 0.7).unwrap();
            let b = variance_kernel(y, x, 0.3, 0.3, 0.7).unwrap();
            assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn interval_validation() {
        let est = EstimateResult {
            gamma1_hat: 0.3,
            method: Method::Mdpd,
            alpha: 0.1,
            k: 100,
            diagnostics: None,
        };
        let model = ModelParams::new(0.3, 0.7, 0.25, -1.0).unwrap();
        assert!(asymptotic_ci(&est, &model, 1.5).is_err());
        let (lo, hi) = asymptotic_ci(&est, &model, 0.95).unwrap();
        assert!(lo < 0.3 && hi > 0.3);
        assert!((normal_quantile(0.975) - 1.959964).abs() < 1e-6);
    }
}
