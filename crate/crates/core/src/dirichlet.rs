//! Multinomial and Dirichlet kernels, conjugate updating and sampling.
//!
//! Densities are returned in log space. Count arguments are plain slices so
//! that the all-zero vector (n = 0) is admissible where the math allows it.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, StandardUniform};

use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::simplex::{check_len, ordered_sum, DirichletParams, PreferenceCounts, WeightVector};
use crate::special::{ln_factorial, ln_gamma};

/// Log of the multinomial probability of `counts` under `weights`.
pub fn multinomial_log_pmf(counts: &[u64], weights: &WeightVector) -> Result<f64> {
    check_len(counts.len(), weights.len())?;
    let n: u64 = counts.iter().sum();
    let terms = counts
        .iter()
        .zip(weights.as_slice())
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &w)| c as f64 * w.ln() - ln_factorial(c));
    Ok(ln_factorial(n) + ordered_sum(terms))
}

/// Log density of a Dirichlet distribution at `point`.
///
/// `point` must lie in the open simplex; boundary points are rejected.
pub fn dirichlet_log_pdf(point: &[f64], params: &DirichletParams) -> Result<f64> {
    check_len(point.len(), params.len())?;
    for (index, &value) in point.iter().enumerate() {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::BoundaryPoint { index, value });
        }
    }
    let sum: f64 = point.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::NotOnSimplex(sum));
    }
    let log_norm = ln_gamma(params.alpha0()) - ordered_sum(params.alpha().iter().map(|&a| ln_gamma(a)));
    let kernel = ordered_sum(point.iter().zip(params.alpha()).map(|(&x, &a)| (a - 1.0) * x.ln()));
    Ok(log_norm + kernel)
}

/// Conjugate update: the posterior concentration is `alpha + counts`.
pub fn posterior_update(prior: &DirichletParams, counts: &[u64]) -> Result<DirichletParams> {
    check_len(prior.len(), counts.len())?;
    DirichletParams::new(prior.alpha().iter().zip(counts).map(|(&a, &c)| a + c as f64).collect())
}

/// Mean of a Dirichlet distribution, `alpha_i / alpha0`.
pub fn posterior_mean(params: &DirichletParams) -> WeightVector {
    WeightVector::new(params.alpha().to_vec()).expect("concentration parameters are positive")
}

/// One Dirichlet draw using a caller-supplied generator.
///
/// Gamma variates are generated in log space (`ln G(a) = ln G(a+1) + ln U / a`
/// for `a < 1`) so tiny concentrations do not underflow to an all-zero draw.
/// Components that still round to zero are lifted to the smallest normal
/// double before normalization.
pub fn dirichlet_sample_with<R: Rng + ?Sized>(params: &DirichletParams, rng: &mut R) -> WeightVector {
    let logs: Vec<f64> = params
        .alpha()
        .iter()
        .map(|&a| {
            if a >= 1.0 {
                Gamma::new(a, 1.0).expect("shape is positive").sample(rng).ln()
            } else {
                let g = Gamma::new(a + 1.0, 1.0).expect("shape is positive").sample(rng);
                let u: f64 = rng.sample(StandardUniform);
                g.ln() + u.ln() / a
            }
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = logs.iter().map(|&l| (l - max).exp().max(f64::MIN_POSITIVE)).collect();
    WeightVector::new(raw).expect("draws are positive and finite")
}

pub fn dirichlet_sample(params: &DirichletParams, seed: RngSeed) -> WeightVector {
    dirichlet_sample_with(params, &mut seed.rng())
}

/// Multinomial draw by sequential conditional binomials.
pub fn multinomial_sample_with<R: Rng + ?Sized>(
    n: u64,
    weights: &WeightVector,
    rng: &mut R,
) -> Result<PreferenceCounts> {
    if n == 0 {
        return Err(Error::InvalidConfig("multinomial sample size must be >= 1".into()));
    }
    let w = weights.as_slice();
    let mut counts = vec![0u64; w.len()];
    let mut remaining_n = n;
    let mut remaining_mass = 1.0;
    for i in 0..w.len() - 1 {
        if remaining_n == 0 {
            break;
        }
        let p = (w[i] / remaining_mass).clamp(0.0, 1.0);
        let c = Binomial::new(remaining_n, p)
            .expect("probability in [0, 1]")
            .sample(rng);
        counts[i] = c;
        remaining_n -= c;
        remaining_mass -= w[i];
    }
    counts[w.len() - 1] = remaining_n;
    PreferenceCounts::new(counts)
}

pub fn multinomial_sample(n: u64, weights: &WeightVector, seed: RngSeed) -> Result<PreferenceCounts> {
    multinomial_sample_with(n, weights, &mut seed.rng())
}
