//! Frequentist and Bayesian weight estimators compared on error variance.
//!
//! Two Bayesian variances are reported side by side. `bayes_variance_plugin`
//! evaluates the plug-in formula `n W(1-W) / (Σ_j (alpha_j + n))^2`.
//! `bayes_variance_exact` is the variance of the
//! Dirichlet posterior itself, `m(1-m) / (a0 + 1)`. They do not agree in
//! general; gains are computed from the former.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dirichlet::posterior_update;
use crate::empirical_bayes::{bayesian_weights, fit_alpha, FitConfig};
use crate::error::{Error, Result};
use crate::simplex::{check_len, DirichletParams, PreferenceCounts, WeightVector};

/// Observed vote shares `n_i / n`. Unlike [`WeightVector`], zero shares are
/// allowed, so these cannot be fed straight into a scalarization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Proportions(Vec<f64>);

impl Proportions {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn has_zero(&self) -> bool {
        self.0.contains(&0.0)
    }

    /// Fails when some category received no votes.
    pub fn to_weight_vector(&self) -> Result<WeightVector> {
        WeightVector::new(self.0.clone())
    }
}

pub fn frequentist_weights(counts: &PreferenceCounts) -> Proportions {
    let n = counts.total() as f64;
    Proportions(counts.counts().iter().map(|&c| c as f64 / n).collect())
}

/// `w_i (1 - w_i) / n` per component.
pub fn frequentist_variance(weights: &[f64], n: u64) -> Vec<f64> {
    let n = n as f64;
    weights.iter().map(|&w| w * (1.0 - w) / n).collect()
}

/// `n W_i (1 - W_i) / (Σ_j (alpha_j + n))^2`, i.e. the denominator is
/// `(alpha0 + l n)^2`.
pub fn bayesian_variance_plugin(bayes_weights: &WeightVector, alpha_hat: &DirichletParams, n: u64) -> Result<Vec<f64>> {
    check_len(bayes_weights.len(), alpha_hat.len())?;
    let n = n as f64;
    let denom = alpha_hat.alpha0() + alpha_hat.len() as f64 * n;
    let denom2 = denom * denom;
    Ok(bayes_weights
        .as_slice()
        .iter()
        .map(|&w| n * w * (1.0 - w) / denom2)
        .collect())
}

/// Marginal variances of a Dirichlet distribution.
pub fn bayesian_variance_exact(posterior: &DirichletParams) -> Vec<f64> {
    let a0 = posterior.alpha0();
    posterior
        .alpha()
        .iter()
        .map(|&a| {
            let m = a / a0;
            m * (1.0 - m) / (a0 + 1.0)
        })
        .collect()
}

/// `v1 / v2`; a zero `v2` yields `f64::INFINITY`.
pub fn efficiency(v1: f64, v2: f64) -> f64 {
    if v2 == 0.0 {
        f64::INFINITY
    } else {
        v1 / v2
    }
}

/// `(v1 - v2) / v1`.
pub fn relative_gain(v1: f64, v2: f64) -> Result<f64> {
    if v1 == 0.0 {
        return Err(Error::Undefined("relative gain with zero reference variance"));
    }
    Ok((v1 - v2) / v1)
}

/// One row of the estimator comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub counts: PreferenceCounts,
    pub freq_weights: Proportions,
    /// Some category has no votes, so `freq_weights` is not a valid weight vector.
    pub freq_has_zero: bool,
    pub alpha_hat: DirichletParams,
    pub bayes_weights: WeightVector,
    pub freq_variance: Vec<f64>,
    pub bayes_variance_plugin: Vec<f64>,
    pub bayes_variance_exact: Vec<f64>,
    /// `freq_variance - bayes_variance_plugin`.
    pub variance_difference: Vec<f64>,
    pub efficiency: Vec<f64>,
    /// NaN where the frequentist variance is zero.
    pub gain: Vec<f64>,
    /// Mean of the defined per-component gains.
    pub gain_aggregate: f64,
    pub fit_converged: bool,
    pub hit_cap: bool,
}

pub fn build_report(counts: &PreferenceCounts, config: &FitConfig) -> Result<EstimatorReport> {
    let n = counts.total();
    let freq_weights = frequentist_weights(counts);
    let fit = fit_alpha(counts, config)?;
    let bayes_weights = bayesian_weights(counts, &fit)?;
    let posterior = posterior_update(&fit.alpha_hat, counts.counts())?;

    let freq_variance = frequentist_variance(freq_weights.as_slice(), n);
    let bayes_variance_plugin = bayesian_variance_plugin(&bayes_weights, &fit.alpha_hat, n)?;
    let bayes_variance_exact = bayesian_variance_exact(&posterior);

    let variance_difference = freq_variance
        .iter()
        .zip(&bayes_variance_plugin)
        .map(|(d, s)| d - s)
        .collect();
    let efficiency_v: Vec<f64> = freq_variance
        .iter()
        .zip(&bayes_variance_plugin)
        .map(|(&d, &s)| efficiency(d, s))
        .collect();
    let gain: Vec<f64> = freq_variance
        .iter()
        .zip(&bayes_variance_plugin)
        .map(|(&d, &s)| relative_gain(d, s).unwrap_or(f64::NAN))
        .collect();
    let defined: Vec<f64> = gain.iter().copied().filter(|g| !g.is_nan()).collect();
    let gain_aggregate = if defined.is_empty() {
        f64::NAN
    } else {
        defined.iter().sum::<f64>() / defined.len() as f64
    };

    Ok(EstimatorReport {
        counts: counts.clone(),
        freq_has_zero: freq_weights.has_zero(),
        freq_weights,
        alpha_hat: fit.alpha_hat,
        bayes_weights,
        freq_variance,
        bayes_variance_plugin,
        bayes_variance_exact,
        variance_difference,
        efficiency: efficiency_v,
        gain,
        gain_aggregate,
        fit_converged: fit.converged,
        hit_cap: fit.hit_cap,
    })
}

/// Builds reports for many rows in parallel; output order matches input order.
pub fn build_reports(rows: &[PreferenceCounts], config: &FitConfig) -> Vec<Result<EstimatorReport>> {
    rows.par_iter().map(|c| build_report(c, config)).collect()
}

/// `n,n1..nl,w1..wl,w1b..wlb,evd1..evdl,evs1..evsl,d1..dl,gain`
pub fn report_csv_header(l: usize) -> Vec<String> {
    let mut h = vec!["n".to_string()];
    for prefix in ["n", "w"] {
        h.extend((1..=l).map(|i| format!("{prefix}{i}")));
    }
    h.extend((1..=l).map(|i| format!("w{i}b")));
    for prefix in ["evd", "evs", "d"] {
        h.extend((1..=l).map(|i| format!("{prefix}{i}")));
    }
    h.push("gain".to_string());
    h
}

pub fn report_csv_record(r: &EstimatorReport) -> Vec<String> {
    let mut rec = vec![r.counts.total().to_string()];
    rec.extend(r.counts.counts().iter().map(|c| c.to_string()));
    let floats = r
        .freq_weights
        .as_slice()
        .iter()
        .chain(r.bayes_weights.as_slice())
        .chain(&r.freq_variance)
        .chain(&r.bayes_variance_plugin)
        .chain(&r.variance_difference)
        .chain(std::iter::once(&r.gain_aggregate));
    rec.extend(floats.map(|x| x.to_string()));
    rec
}

/// Writes reports with full double precision. Every row must have `l` categories.
pub fn write_report_csv<W: Write>(l: usize, reports: &[EstimatorReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(report_csv_header(l))?;
    for r in reports {
        check_len(r.counts.len(), l)?;
        w.write_record(report_csv_record(r))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(v: &[u64]) -> PreferenceCounts {
        PreferenceCounts::new(v.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn frequentist_weight_examples() {
        assert!(close(
            frequentist_weights(&counts(&[2, 3, 5])).as_slice(),
            &[0.2, 0.3, 0.5],
            1e-15
        ));
        assert!(close(
            frequentist_weights(&counts(&[16, 14, 20])).as_slice(),
            &[0.32, 0.28, 0.40],
            1e-15
        ));
        assert!(close(
            frequentist_weights(&counts(&[7, 7, 7])).as_slice(),
            &[1.0 / 3.0; 3],
            1e-15
        ));
    }

    #[test]
    fn zero_share_is_flagged() {
        let p = frequentist_weights(&counts(&[0, 4, 6]));
        assert!(p.has_zero());
        assert!(p.to_weight_vector().is_err());
        let r = build_report(&counts(&[0, 4, 6]), &FitConfig::default()).unwrap();
        assert!(r.freq_has_zero);
        assert!(r.gain[0].is_nan());
        assert!(r.gain_aggregate.is_finite());
    }

    #[test]
    fn frequentist_variance_examples() {
        assert!(close(
            &frequentist_variance(&[0.2, 0.3, 0.5], 10),
            &[0.016, 0.021, 0.025],
            1e-15
        ));
        assert!(close(
            &frequentist_variance(&[0.2, 0.3, 0.5], 100),
            &[0.0016, 0.0021, 0.0025],
            1e-15
        ));
        let v = frequentist_variance(&[1.0 / 3.0; 3], 21);
        assert!(close(&v, &[2.0 / 189.0; 3], 1e-15));
        assert!(v.iter().all(|x| (x - 0.0106).abs() < 5e-5));
    }

    #[test]
    fn plugin_variance_examples() {
        let w = WeightVector::new(vec![0.5, 0.5]).unwrap();
        let a = DirichletParams::new(vec![1.0, 1.0]).unwrap();
        let v = bayesian_variance_plugin(&w, &a, 2).unwrap();
        assert!(close(&v, &[0.5 / 36.0; 2], 1e-15));
        assert!((v[0] - 0.013889).abs() < 1e-6);

        let w = WeightVector::new(vec![1e-13, 1.0]).unwrap();
        let v = bayesian_variance_plugin(&w, &a, 2).unwrap();
        assert!(v.iter().all(|&x| x < 1e-13));

        let a3 = DirichletParams::new(vec![1.0; 3]).unwrap();
        assert!(bayesian_variance_plugin(&w, &a3, 2).is_err());
    }

    #[test]
    fn plugin_variance_order_of_magnitude_for_smallest_row() {
        // Tabulated: 0.00005, 0.00007, 0.00008.
        let r = build_report(&counts(&[2, 3, 5]), &FitConfig::default()).unwrap();
        for (got, tab) in r.bayes_variance_plugin.iter().zip([5e-5, 7e-5, 8e-5]) {
            assert!(*got > tab / 2.0 && *got < tab * 2.0, "{got} vs {tab}");
        }
    }

    #[test]
    fn exact_variance_examples() {
        let v = bayesian_variance_exact(&DirichletParams::new(vec![1.0, 1.0]).unwrap());
        assert!(close(&v, &[1.0 / 12.0; 2], 1e-15));
        let v = bayesian_variance_exact(&DirichletParams::new(vec![25.0, 12.0, 13.0]).unwrap());
        assert!((v[0] - 0.25 / 51.0).abs() < 1e-15);
        assert!((v[0] - 0.004902).abs() < 1e-6);
        let v = bayesian_variance_exact(&DirichletParams::new(vec![1e9; 3]).unwrap());
        assert!(v.iter().all(|&x| x < 1e-9));
    }

    #[test]
    fn efficiency_and_gain_examples() {
        assert!((efficiency(0.016, 0.00005) - 320.0).abs() < 1e-9);
        assert_eq!(efficiency(0.3, 0.3), 1.0);
        assert!((efficiency(0.0014, 0.0012) - 1.1667).abs() < 1e-4);
        assert_eq!(efficiency(0.1, 0.0), f64::INFINITY);

        assert!((relative_gain(0.016, 0.00005).unwrap() - 0.996875).abs() < 1e-12);
        assert_eq!(relative_gain(0.3, 0.3).unwrap(), 0.0);
        assert!((relative_gain(0.0014, 0.0010).unwrap() - 0.28571).abs() < 1e-5);
        assert!(matches!(relative_gain(0.0, 0.1), Err(Error::Undefined(_))));
    }

    #[test]
    fn report_for_smallest_row() {
        let r = build_report(&counts(&[2, 3, 5]), &FitConfig::default()).unwrap();
        assert!(close(r.freq_weights.as_slice(), &[0.2, 0.3, 0.5], 1e-15));
        assert!(close(&r.freq_variance, &[0.016, 0.021, 0.025], 1e-15));
        assert!(r.fit_converged && r.hit_cap);
        for i in 0..3 {
            assert!((r.gain[i] - (1.0 - 1.0 / r.efficiency[i])).abs() < 1e-12);
            assert!(r.bayes_variance_exact[i] < r.freq_variance[i]);
        }
    }

    #[test]
    fn report_for_balanced_large_row() {
        let r = build_report(&counts(&[55, 56, 57]), &FitConfig::default()).unwrap();
        assert!(close(r.freq_weights.as_slice(), &[0.3274, 0.3333, 0.3393], 5e-5));
        assert!(close(r.bayes_weights.as_slice(), &[0.3274, 0.3333, 0.3393], 5e-5));
    }

    #[test]
    fn symmetric_row_has_equal_gains() {
        let r = build_report(&counts(&[7, 7, 7]), &FitConfig::default()).unwrap();
        assert_eq!(r.gain[0], r.gain[1]);
        assert_eq!(r.gain[1], r.gain[2]);
    }

    #[test]
    fn gain_decreases_as_counts_scale() {
        let base = counts(&[2, 3, 5]);
        let gains: Vec<f64> = [1, 2, 5, 10, 20]
            .iter()
            .map(|&k| {
                build_report(&base.scaled(k).unwrap(), &FitConfig::default())
                    .unwrap()
                    .gain_aggregate
            })
            .collect();
        for pair in gains.windows(2) {
            assert!(pair[1] <= pair[0], "{gains:?}");
        }
    }

    #[test]
    fn report_is_permutation_equivariant() {
        let a = build_report(&counts(&[17, 25, 33]), &FitConfig::default()).unwrap();
        let b = build_report(&counts(&[25, 33, 17]), &FitConfig::default()).unwrap();
        let rot = |v: &[f64]| {
            let mut v = v.to_vec();
            v.rotate_left(1);
            v
        };
        assert!(close(
            &rot(a.bayes_weights.as_slice()),
            b.bayes_weights.as_slice(),
            1e-12
        ));
        assert!(close(&rot(&a.freq_variance), &b.freq_variance, 1e-15));
        assert!(close(&rot(&a.bayes_variance_plugin), &b.bayes_variance_plugin, 1e-15));
        assert!(close(&rot(&a.gain), &b.gain, 1e-12));
        assert!((a.gain_aggregate - b.gain_aggregate).abs() < 1e-12);
    }

    #[test]
    fn parallel_reports_match_sequential() {
        let rows: Vec<PreferenceCounts> = [[2u64, 3, 5], [4, 6, 9], [7, 7, 7], [20, 40, 20], [84, 90, 55]]
            .iter()
            .map(|r| counts(r))
            .collect();
        let config = FitConfig::default();
        let par: Vec<EstimatorReport> = build_reports(&rows, &config).into_iter().map(|r| r.unwrap()).collect();
        let seq: Vec<EstimatorReport> = rows.iter().map(|r| build_report(r, &config).unwrap()).collect();
        assert_eq!(par, seq);
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            report_csv_header(3).join(","),
            "n,n1,n2,n3,w1,w2,w3,w1b,w2b,w3b,evd1,evd2,evd3,evs1,evs2,evs3,d1,d2,d3,gain"
        );
        assert_eq!(report_csv_header(4).len(), 1 + 6 * 4 + 1);

        let r = build_report(&counts(&[2, 3, 5]), &FitConfig::default()).unwrap();
        let mut buf = Vec::new();
        write_report_csv(3, std::slice::from_ref(&r), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        lines.next();
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 20);
        assert_eq!(&fields[..4], &["10", "2", "3", "5"]);
        // full precision survives the trip through text
        assert_eq!(fields[7].parse::<f64>().unwrap(), r.bayes_weights.as_slice()[0]);

        assert!(write_report_csv(4, &[r], Vec::new()).is_err());
    }
}
