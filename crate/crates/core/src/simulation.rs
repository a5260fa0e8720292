//! Monte-Carlo comparison of the two estimators under known true weights.
//!
//! Every replication draws from its own substream keyed by `(n, r)`, and the
//! per-replication accumulators are combined by a pairwise tree over the
//! replication index, so results are bitwise identical whatever the thread
//! schedule.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirichlet::multinomial_sample;
use crate::empirical_bayes::{bayesian_weights, fit_alpha, FitConfig};
use crate::error::{Error, Result};
use crate::estimators::frequentist_weights;
use crate::rng::RngSeed;
use crate::simplex::WeightVector;

pub const DEFAULT_REPLICATIONS: u64 = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationPlan {
    pub true_weights: WeightVector,
    pub sample_sizes: Vec<u64>,
    pub replications: u64,
    pub seed: RngSeed,
    pub fit_config: FitConfig,
}

impl SimulationPlan {
    pub fn new(true_weights: WeightVector, sample_sizes: Vec<u64>) -> Self {
        Self {
            true_weights,
            sample_sizes,
            replications: DEFAULT_REPLICATIONS,
            seed: RngSeed::default(),
            fit_config: FitConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.true_weights.len() as u64;
        if self.sample_sizes.is_empty() {
            return Err(Error::InvalidConfig("no sample sizes".into()));
        }
        if let Some(&n) = self.sample_sizes.iter().find(|&&n| n < l) {
            return Err(Error::InvalidConfig(format!(
                "sample size {n} is smaller than the number of categories {l}"
            )));
        }
        if self.sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("sample sizes must be strictly ascending".into()));
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be at least 1".into()));
        }
        self.fit_config.initial_alpha(self.true_weights.len())?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeResult {
    pub sample_size: u64,
    pub empirical_mse_freq: Vec<f64>,
    pub empirical_mse_bayes: Vec<f64>,
    /// Mean over components of `(mse_freq - mse_bayes) / mse_freq`.
    pub mean_gain: f64,
    pub replication_count: u64,
    /// Replications whose fit failed; excluded from every average.
    pub skipped: u64,
    pub mean_freq_estimate: Vec<f64>,
    pub mean_bayes_estimate: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationResult {
    pub rows: Vec<SizeResult>,
}

#[derive(Clone, Debug)]
struct Acc {
    used: u64,
    skipped: u64,
    sum_freq: Vec<f64>,
    sum_bayes: Vec<f64>,
    sq_freq: Vec<f64>,
    sq_bayes: Vec<f64>,
}

impl Acc {
    fn empty(l: usize) -> Self {
        Self {
            used: 0,
            skipped: 0,
            sum_freq: vec![0.0; l],
            sum_bayes: vec![0.0; l],
            sq_freq: vec![0.0; l],
            sq_bayes: vec![0.0; l],
        }
    }

    fn merge(mut self, other: &Acc) -> Acc {
        self.used += other.used;
        self.skipped += other.skipped;
        for (dst, src) in [
            (&mut self.sum_freq, &other.sum_freq),
            (&mut self.sum_bayes, &other.sum_bayes),
            (&mut self.sq_freq, &other.sq_freq),
            (&mut self.sq_bayes, &other.sq_bayes),
        ] {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d += s);
        }
        self
    }
}

fn tree_reduce(accs: &[Acc], l: usize) -> Acc {
    match accs.len() {
        0 => Acc::empty(l),
        1 => accs[0].clone(),
        len => {
            let (a, b) = accs.split_at(len / 2);
            tree_reduce(a, l).merge(&tree_reduce(b, l))
        }
    }
}

fn replicate(plan: &SimulationPlan, n: u64, r: u64) -> Acc {
    let truth = plan.true_weights.as_slice();
    let mut acc = Acc::empty(truth.len());
    let outcome = multinomial_sample(n, &plan.true_weights, plan.seed.substream(&[n, r])).and_then(|counts| {
        let fit = fit_alpha(&counts, &plan.fit_config)?;
        let bayes = bayesian_weights(&counts, &fit)?;
        Ok((frequentist_weights(&counts), bayes))
    });
    match outcome {
        Ok((freq, bayes)) => {
            acc.used = 1;
            for (i, &t) in truth.iter().enumerate() {
                let f = freq.as_slice()[i];
                let b = bayes.as_slice()[i];
                acc.sum_freq[i] = f;
                acc.sum_bayes[i] = b;
                acc.sq_freq[i] = (f - t).powi(2);
                acc.sq_bayes[i] = (b - t).powi(2);
            }
        }
        Err(_) => acc.skipped = 1,
    }
    acc
}

pub fn run_simulation(plan: &SimulationPlan) -> Result<SimulationResult> {
    plan.validate()?;
    let l = plan.true_weights.len();
    let rows = plan
        .sample_sizes
        .iter()
        .map(|&n| {
            let accs: Vec<Acc> = (0..plan.replications)
                .into_par_iter()
                .map(|r| replicate(plan, n, r))
                .collect();
            let acc = tree_reduce(&accs, l);
            let used = acc.used as f64;
            let mean = |v: &[f64]| v.iter().map(|x| x / used).collect::<Vec<f64>>();
            let mse_freq = mean(&acc.sq_freq);
            let mse_bayes = mean(&acc.sq_bayes);
            let gains: Vec<f64> = mse_freq
                .iter()
                .zip(&mse_bayes)
                .filter(|(f, _)| **f > 0.0)
                .map(|(f, b)| (f - b) / f)
                .collect();
            let mean_gain = if gains.is_empty() {
                f64::NAN
            } else {
                gains.iter().sum::<f64>() / gains.len() as f64
            };
            SizeResult {
                sample_size: n,
                mean_freq_estimate: mean(&acc.sum_freq),
                mean_bayes_estimate: mean(&acc.sum_bayes),
                empirical_mse_freq: mse_freq,
                empirical_mse_bayes: mse_bayes,
                mean_gain,
                replication_count: plan.replications,
                skipped: acc.skipped,
            }
        })
        .collect();
    Ok(SimulationResult { rows })
}

/// `(sample_size, mean_gain)` in ascending size order.
pub fn gain_curve(result: &SimulationResult) -> Vec<(u64, f64)> {
    let mut curve: Vec<(u64, f64)> = result.rows.iter().map(|r| (r.sample_size, r.mean_gain)).collect();
    curve.sort_by_key(|&(n, _)| n);
    curve
}

/// `n,mean_gain,mse_freq_1..l,mse_bayes_1..l` with full double precision.
pub fn write_gain_curve_csv<W: Write>(result: &SimulationResult, out: W) -> Result<()> {
    let l = result.rows.first().map_or(0, |r| r.empirical_mse_freq.len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["n".to_string(), "mean_gain".to_string()];
    header.extend((1..=l).map(|i| format!("mse_freq_{i}")));
    header.extend((1..=l).map(|i| format!("mse_bayes_{i}")));
    w.write_record(&header)?;
    let mut rows: Vec<&SizeResult> = result.rows.iter().collect();
    rows.sort_by_key(|r| r.sample_size);
    for r in rows {
        let mut rec = vec![r.sample_size.to_string(), r.mean_gain.to_string()];
        rec.extend(
            r.empirical_mse_freq
                .iter()
                .chain(&r.empirical_mse_bayes)
                .map(|x| x.to_string()),
        );
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
