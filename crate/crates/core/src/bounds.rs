//! Closed-form bounds on the large-`M` variances of `log Z_OT` and `log Z_U`
//! for the Potts model, on the primal graph and on its dual, together with the
//! temperatures at which the uniform estimator overtakes the OT estimator.
//!
//! Bounds grow like `e^(8 N beta)`, so each one is held as `log(1 + bound)`.

use crate::error::{Error, Result};
use crate::model::Representation;

/// A variance bound `b`, stored as `log(1 + b)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct VarianceBound {
    pub log_one_plus: f64,
}

impl VarianceBound {
    fn from_log(log_one_plus: f64) -> Self {
        Self { log_one_plus }
    }

    /// The bound itself; `inf` once it leaves floating range.
    pub fn value(self) -> f64 {
        self.log_one_plus.exp_m1()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub beta: f64,
    pub sites: usize,
    pub q: usize,
    pub representation: Representation,
    pub lower_ot: VarianceBound,
    pub upper_ot: VarianceBound,
    pub lower_uniform: VarianceBound,
    pub upper_uniform: VarianceBound,
    /// `A_{0,beta} = 1 - e^(-2 beta)`
    pub a0: f64,
    /// `A_{q,beta} = 1 + (q - 1) e^(-2 beta)`
    pub aq: f64,
    /// `A_q / A_0`; only meaningful for the dual.
    pub r: Option<f64>,
    /// `|X| - 1`, the estimator-free ceiling on the uniform variance.
    pub uniform_ceiling: VarianceBound,
    /// `beta_0` for the primal, `beta'_0` for the dual.
    pub crossover: f64,
}

impl BoundsReport {
    /// `lower_ot <= variance <= upper_ot`, compared as `log(1 + .)`.
    pub fn ot_contains(&self, variance: f64) -> bool {
        sandwiched(self.lower_ot, self.upper_ot, variance)
    }

    pub fn uniform_contains(&self, variance: f64) -> bool {
        sandwiched(self.lower_uniform, self.upper_uniform, variance)
    }
}

fn sandwiched(lower: VarianceBound, upper: VarianceBound, variance: f64) -> bool {
    const TOL: f64 = 1e-9;
    let v = variance.ln_1p();
    lower.log_one_plus <= v + TOL * v.abs().max(1.0) && v <= upper.log_one_plus + TOL * upper.log_one_plus.abs().max(1.0)
}

/// `A_{k,beta} = 1 + (k - 1) e^(-2 beta)`
pub fn a_coefficient(k: f64, beta: f64) -> f64 {
    1.0 + (k - 1.0) * (-2.0 * beta).exp()
}

/// `log(e^a + e^b)`
fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log(q + (|X| - q) c)` given `log |X|` and `log c`.
fn log_mixed_count(q: usize, log_support: f64, log_c: f64) -> f64 {
    let log_q = (q as f64).ln();
    // log(|X| - q) = log|X| + log(1 - q/|X|)
    let log_rest = log_support + (-(log_q - log_support).exp()).ln_1p();
    log_add(log_q, log_rest + log_c)
}

/// Primal crossover `(3/2) log q`.
pub fn primal_crossover(q: usize) -> f64 {
    1.5 * (q as f64).ln()
}

/// Dual crossover `(1/2) log(1 + q / (q^2 - 1))`.
pub fn dual_crossover(q: usize) -> f64 {
    let q = q as f64;
    0.5 * (q / (q * q - 1.0)).ln_1p()
}

/// Bounds for sampling the primal graph of the Potts model with `sites` spins.
pub fn primal_bounds(beta: f64, sites: usize, q: usize) -> Result<BoundsReport> {
    if q < 2 {
        return Err(Error::InvalidAlphabet(q));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Config(format!("beta must be finite and non-negative, got {beta}")));
    }
    let n = sites as f64;
    let log_support = n * (q as f64).ln();
    Ok(BoundsReport {
        beta,
        sites,
        q,
        representation: Representation::Primal,
        lower_ot: VarianceBound::from_log(2.0 * n * beta - 2.0 * log_support),
        upper_ot: VarianceBound::from_log(4.0 * n * beta),
        lower_uniform: VarianceBound::from_log(log_support - 2.0 * log_mixed_count(q, log_support, -8.0 * beta)),
        upper_uniform: VarianceBound::from_log(8.0 * n * beta),
        a0: a_coefficient(0.0, beta),
        aq: a_coefficient(q as f64, beta),
        r: None,
        uniform_ceiling: VarianceBound::from_log(log_support),
        crossover: primal_crossover(q),
    })
}

/// Bounds for sampling the dual graph; requires even `sites` and `beta > 0`.
pub fn dual_bounds(beta: f64, sites: usize, q: usize) -> Result<BoundsReport> {
    if q < 2 {
        return Err(Error::InvalidAlphabet(q));
    }
    if sites % 2 == 1 {
        return Err(Error::OddSiteCount(sites));
    }
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::ZeroBeta);
    }
    if !beta.is_finite() {
        return Err(Error::Config(format!("beta must be finite, got {beta}")));
    }
    let n = sites as f64;
    let log_support = (n + 1.0) * (q as f64).ln();
    let a0 = a_coefficient(0.0, beta);
    let aq = a_coefficient(q as f64, beta);
    // log r, with A_0 = -expm1(-2 beta) for accuracy near beta = 0
    let log_a0 = (-(-2.0 * beta).exp_m1()).ln();
    let log_r = aq.ln() - log_a0;
    Ok(BoundsReport {
        beta,
        sites,
        q,
        representation: Representation::Dual,
        lower_ot: VarianceBound::from_log(2.0 * n * log_r - 2.0 * log_support),
        upper_ot: VarianceBound::from_log(2.0 * n * log_r),
        lower_uniform: VarianceBound::from_log(log_support - 2.0 * log_mixed_count(q, log_support, log_a0)),
        upper_uniform: VarianceBound::from_log(4.0 * n * log_r),
        a0,
        aq,
        r: Some(aq / a0),
        uniform_ceiling: VarianceBound::from_log(log_support),
        crossover: dual_crossover(q),
    })
}
