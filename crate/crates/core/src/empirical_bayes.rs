//! Empirical-Bayes fit of the Dirichlet prior from a single vector of votes.
//!
//! The concentration vector is chosen to maximize the Dirichlet-multinomial
//! marginal likelihood of the observed counts.
//!
//! For a single count vector that likelihood has no finite maximizer: along
//! `alpha ∝ counts` it keeps increasing as the total concentration grows,
//! approaching (never reaching) the multinomial likelihood at the observed
//! proportions.
//! The search is therefore confined to `sum(alpha) <= alpha0_cap`, the
//! estimate normally lands on that boundary, and [`FitResult::hit_cap`] says so.
//! The cap sets how far the posterior-mean weights move from the raw
//! proportions: the larger it is, the closer they get.

use serde::{Deserialize, Serialize};

use crate::dirichlet::{posterior_mean, posterior_update};
use crate::error::{Error, Result};
use crate::simplex::{check_len, ordered_sum, DirichletParams, PreferenceCounts, WeightVector};
use crate::special::{digamma, ln_factorial, ln_gamma};

/// Lower bound for every fitted concentration component.
pub const ALPHA_FLOOR: f64 = 1e-6;

/// Default upper bound on the total concentration during fitting.
pub const DEFAULT_ALPHA0_CAP: f64 = 150.0;

/// Largest overrelaxation factor tried by the fixed-point optimizer.
const MAX_OVERRELAXATION: f64 = 1024.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    /// Minorize-maximize fixed point on digamma ratios, with overrelaxation.
    #[default]
    FixedPoint,
    /// Compass search over `ln(alpha)`.
    DirectSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Starting point; `None` means all ones.
    pub alpha_init: Option<DirichletParams>,
    pub max_iterations: usize,
    /// Stop once no component of alpha moves by more than this in one step.
    pub convergence_tol: f64,
    pub alpha0_cap: f64,
    pub optimizer: Optimizer,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            alpha_init: None,
            max_iterations: 500,
            convergence_tol: 1e-8,
            alpha0_cap: DEFAULT_ALPHA0_CAP,
            optimizer: Optimizer::FixedPoint,
        }
    }
}

impl FitConfig {
    pub fn with_cap(alpha0_cap: f64) -> Self {
        Self {
            alpha0_cap,
            ..Self::default()
        }
    }

    /// Checks the configuration for `l` categories and returns the starting point.
    pub fn initial_alpha(&self, l: usize) -> Result<DirichletParams> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        if !(self.convergence_tol.is_finite() && self.convergence_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "convergence_tol must be positive, got {}",
                self.convergence_tol
            )));
        }
        if !(self.alpha0_cap.is_finite() && self.alpha0_cap > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha0_cap must be positive and finite, got {}",
                self.alpha0_cap
            )));
        }
        let init = match &self.alpha_init {
            Some(a) => {
                check_len(a.len(), l)?;
                a.clone()
            }
            None => DirichletParams::symmetric(1.0, l)?,
        };
        let init = DirichletParams::new(init.alpha().iter().map(|a| a.max(ALPHA_FLOOR)).collect())?;
        if init.alpha0() > self.alpha0_cap * (1.0 + 1e-12) {
            return Err(Error::InvalidConfig(format!(
                "alpha0_cap {} is below the initial total concentration {}",
                self.alpha0_cap,
                init.alpha0()
            )));
        }
        Ok(init)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub alpha_hat: DirichletParams,
    pub log_marginal: f64,
    pub iterations: usize,
    pub converged: bool,
    pub hit_cap: bool,
    /// Log marginal likelihood at the start and after every accepted step.
    pub trace: Vec<f64>,
}

/// Log of the Dirichlet-multinomial probability of `counts` given `alpha`.
pub fn log_marginal_likelihood(counts: &[u64], alpha: &DirichletParams) -> Result<f64> {
    check_len(counts.len(), alpha.len())?;
    Ok(log_marginal_raw(counts, alpha.alpha()))
}

fn log_marginal_raw(counts: &[u64], alpha: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let alpha0 = ordered_sum(alpha.iter().copied());
    let per_category = ordered_sum(counts.iter().zip(alpha).map(|(&c, &a)| {
        if c == 0 {
            0.0
        } else {
            ln_gamma(c as f64 + a) - ln_gamma(a) - ln_factorial(c)
        }
    }));
    ln_gamma(alpha0) - ln_gamma(alpha0 + n as f64) + ln_factorial(n) + per_category
}

/// Floors every component, then shrinks the above-floor part so the total
/// does not exceed `cap`.
fn project(raw: &[f64], cap: f64) -> Vec<f64> {
    let mut x: Vec<f64> = raw.iter().map(|v| v.max(ALPHA_FLOOR)).collect();
    if ordered_sum(x.iter().copied()) <= cap {
        return x;
    }
    let mut floored: Vec<bool> = raw.iter().map(|&v| v <= ALPHA_FLOOR).collect();
    loop {
        let free_mass = ordered_sum(raw.iter().zip(&floored).filter(|(_, &f)| !f).map(|(&v, _)| v));
        let n_floored = floored.iter().filter(|&&f| f).count();
        let scale = (cap - n_floored as f64 * ALPHA_FLOOR) / free_mass;
        let mut changed = false;
        for (f, &v) in floored.iter_mut().zip(raw) {
            if !*f && v * scale <= ALPHA_FLOOR {
                *f = true;
                changed = true;
            }
        }
        if !changed {
            for ((xi, &v), &f) in x.iter_mut().zip(raw).zip(&floored) {
                *xi = if f { ALPHA_FLOOR } else { v * scale };
            }
            return x;
        }
    }
}

/// One minorize-maximize step.
///
/// Tangent bounds on `lnΓ(a0) - lnΓ(a0+n)` and on `lnΓ(a+c) - lnΓ(a)` (in
/// `ln a`) give a separable minorizer `Σ w_k ln a_k - b Σ a_k`; its maximizer
/// over the floored, capped set is `project(w / b)`.
fn mm_step(counts: &[u64], alpha: &[f64], cap: f64) -> Vec<f64> {
    let n: u64 = counts.iter().sum();
    let alpha0 = ordered_sum(alpha.iter().copied());
    let b = digamma(alpha0 + n as f64) - digamma(alpha0);
    let raw: Vec<f64> = counts
        .iter()
        .zip(alpha)
        .map(|(&c, &a)| {
            if c == 0 {
                0.0
            } else {
                a * (digamma(c as f64 + a) - digamma(a)) / b
            }
        })
        .collect();
    project(&raw, cap)
}

fn max_abs_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

struct Search {
    alpha: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
    trace: Vec<f64>,
}

fn fixed_point(counts: &[u64], init: Vec<f64>, config: &FitConfig) -> Search {
    let cap = config.alpha0_cap;
    let mut alpha = init;
    let mut value = log_marginal_raw(counts, &alpha);
    let mut trace = vec![value];
    let mut eta = 2.0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iterations {
        iterations += 1;
        let mut next = mm_step(counts, &alpha, cap);
        let mut next_value = log_marginal_raw(counts, &next);

        // Extrapolate along the MM direction in log space; keep it only if it
        // beats the plain step.
        let stretched: Vec<f64> = alpha.iter().zip(&next).map(|(&a, &m)| a * (m / a).powf(eta)).collect();
        if stretched.iter().all(|v| v.is_finite()) {
            let candidate = project(&stretched, cap);
            let candidate_value = log_marginal_raw(counts, &candidate);
            if candidate_value > next_value {
                next = candidate;
                next_value = candidate_value;
                eta = (eta * 2.0).min(MAX_OVERRELAXATION);
            } else {
                eta = 2.0;
            }
        } else {
            eta = 2.0;
        }

        // The likelihood's gradient in the total concentration decays like
        // 1/alpha0^2, so plain MM steps creep towards the cap. Double the
        // total along the current ray while that keeps improving.
        loop {
            let total = ordered_sum(next.iter().copied());
            if total >= cap {
                break;
            }
            // Floored components are already at their optimum; grow the rest.
            let floored_mass = ordered_sum(next.iter().copied().filter(|&a| a <= ALPHA_FLOOR));
            let free = total - floored_mass;
            if free <= 0.0 {
                break;
            }
            let scale = ((2.0 * total).min(cap) - floored_mass) / free;
            let scaled: Vec<f64> = next
                .iter()
                .map(|&a| if a <= ALPHA_FLOOR { a } else { a * scale })
                .collect();
            let candidate = project(&scaled, cap);
            let candidate_value = log_marginal_raw(counts, &candidate);
            if candidate_value > next_value {
                next = candidate;
                next_value = candidate_value;
            } else {
                break;
            }
        }

        // No numerically visible ascent left.
        if next_value.is_nan() || next_value < value {
            converged = true;
            break;
        }
        let change = max_abs_change(&alpha, &next);
        alpha = next;
        value = next_value;
        trace.push(value);
        if change < config.convergence_tol {
            converged = true;
            break;
        }
    }

    Search {
        alpha,
        value,
        iterations,
        converged,
        trace,
    }
}

fn direct_search(counts: &[u64], init: Vec<f64>, config: &FitConfig) -> Search {
    let cap = config.alpha0_cap;
    let l = init.len();
    let mut alpha = init;
    let mut value = log_marginal_raw(counts, &alpha);
    let mut trace = vec![value];
    let mut step: f64 = 0.5;
    let mut iterations = 0;
    let mut converged = false;

    // ±e_k for each category, then ±(1, ..., 1) to move the total.
    let mut directions: Vec<Vec<f64>> = Vec::with_capacity(2 * l + 2);
    for k in 0..l {
        for sign in [1.0, -1.0] {
            let mut d = vec![0.0; l];
            d[k] = sign;
            directions.push(d);
        }
    }
    directions.push(vec![1.0; l]);
    directions.push(vec![-1.0; l]);

    while iterations < config.max_iterations {
        iterations += 1;
        let mut best: Option<(Vec<f64>, f64)> = None;
        for d in &directions {
            let moved: Vec<f64> = alpha.iter().zip(d).map(|(&a, &di)| a * (step * di).exp()).collect();
            let candidate = project(&moved, cap);
            let v = log_marginal_raw(counts, &candidate);
            let better_than_best = best.as_ref().is_none_or(|(_, bv)| v > *bv);
            if v > value && better_than_best {
                best = Some((candidate, v));
            }
        }
        // Moves smaller than the tolerance (e.g. a scale-up projected straight
        // back onto the cap) count as a failed poll.
        match best {
            Some((candidate, v)) if max_abs_change(&alpha, &candidate) >= config.convergence_tol => {
                alpha = candidate;
                value = v;
                trace.push(value);
                step = (step * 2.0).min(1.0);
            }
            _ => {
                step *= 0.5;
                let reach = alpha.iter().copied().fold(0.0, f64::max) * step.exp_m1();
                if reach < config.convergence_tol {
                    converged = true;
                    break;
                }
            }
        }
    }

    Search {
        alpha,
        value,
        iterations,
        converged,
        trace,
    }
}

/// Fits the prior concentration by maximizing the marginal likelihood of
/// `counts` within the configured cap.
///
/// Running out of iterations is not an error: the best point found is
/// returned with `converged == false`.
pub fn fit_alpha(counts: &PreferenceCounts, config: &FitConfig) -> Result<FitResult> {
    let init = config.initial_alpha(counts.len())?;
    let start = init.alpha().to_vec();
    let search = match config.optimizer {
        Optimizer::FixedPoint => fixed_point(counts.counts(), start, config),
        Optimizer::DirectSearch => direct_search(counts.counts(), start, config),
    };
    let alpha_hat = DirichletParams::new(search.alpha)?;
    let log_marginal = log_marginal_likelihood(counts.counts(), &alpha_hat)?;
    debug_assert_eq!(log_marginal, search.value);
    let hit_cap = config.alpha0_cap - alpha_hat.alpha0() <= 1e-6;
    Ok(FitResult {
        alpha_hat,
        log_marginal,
        iterations: search.iterations,
        converged: search.converged,
        hit_cap,
        trace: search.trace,
    })
}

/// Posterior-mean weights `(alpha_hat_i + n_i) / Σ_j (alpha_hat_j + n_j)`.
pub fn bayesian_weights(counts: &PreferenceCounts, fit: &FitResult) -> Result<WeightVector> {
    let posterior = posterior_update(&fit.alpha_hat, counts.counts())?;
    Ok(posterior_mean(&posterior))
}
