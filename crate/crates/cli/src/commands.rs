use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use prefweights::dirichlet::posterior_update;
use prefweights::empirical_bayes::{bayesian_weights, fit_alpha, FitConfig, Optimizer};
use prefweights::estimators::{
    bayesian_variance_exact, bayesian_variance_plugin, build_report, frequentist_variance, frequentist_weights,
    report_csv_header, report_csv_record,
};
use prefweights::route::{compare_weightings, evolve, GaConfig, GaTrace, RouteProblem};
use prefweights::simulation::{run_simulation, write_gain_curve_csv, SimulationPlan};
use prefweights::{DirichletParams, PreferenceCounts, RngSeed, WeightVector};
use serde::{Deserialize, Serialize};

use crate::survey;

pub const DEMO_GRAPH: &str = include_str!("../data/demo_graph.json");

/// Six significant figures, trailing zeros trimmed.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    format!("{x:.5e}")
        .parse::<f64>()
        .map_or_else(|_| x.to_string(), |r| r.to_string())
}

fn sig6_list(xs: &[f64]) -> String {
    xs.iter().map(|&x| sig6(x)).collect::<Vec<_>>().join(" ")
}

pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            p.parse::<T>()
                .map_err(|_| anyhow::anyhow!("invalid {what} value {p:?}"))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OptimizerArg {
    FixedPoint,
    DirectSearch,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    /// Upper bound on the fitted concentration total.
    #[arg(long, default_value_t = prefweights::empirical_bayes::DEFAULT_ALPHA0_CAP)]
    pub alpha0_cap: f64,
    /// Starting concentration vector (defaults to all ones).
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_init: Option<String>,
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = OptimizerArg::FixedPoint)]
    pub optimizer: OptimizerArg,
}

impl FitArgs {
    pub fn config(&self) -> Result<FitConfig> {
        let alpha_init = match &self.alpha_init {
            Some(s) => Some(DirichletParams::new(parse_list(s, "alpha")?)?),
            None => None,
        };
        if !(self.tol.is_finite() && self.tol > 0.0) {
            bail!("--tol must be positive");
        }
        Ok(FitConfig {
            alpha_init,
            max_iterations: self.max_iterations,
            convergence_tol: self.tol,
            alpha0_cap: self.alpha0_cap,
            optimizer: match self.optimizer {
                OptimizerArg::FixedPoint => Optimizer::FixedPoint,
                OptimizerArg::DirectSearch => Optimizer::DirectSearch,
            },
        })
    }
}

#[derive(Args, Debug, Clone)]
pub struct CountsSource {
    /// Comma-separated vote counts, e.g. 16,14,20.
    #[arg(long, conflicts_with = "survey", allow_hyphen_values = true)]
    pub counts: Option<String>,
    /// Survey CSV with `respondent_id,category` rows.
    #[arg(long)]
    pub survey: Option<PathBuf>,
    /// Explicit category order for --survey.
    #[arg(long, requires = "survey")]
    pub categories: Option<String>,
}

impl CountsSource {
    fn load(&self) -> Result<Option<PreferenceCounts>> {
        if let Some(c) = &self.counts {
            let raw: Vec<i64> = parse_list(c, "count")?;
            return Ok(Some(prefweights::simplex::validate_counts(&raw)?));
        }
        if let Some(path) = &self.survey {
            return Ok(Some(ingest_file(path, self.categories.as_deref())?.counts));
        }
        Ok(None)
    }
}

fn ingest_file(path: &Path, categories: Option<&str>) -> Result<survey::Survey> {
    let declared: Option<Vec<String>> = categories.map(|c| c.split(',').map(|s| s.trim().to_string()).collect());
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(survey::ingest(file, declared.as_deref())?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyOutput {
    pub categories: Vec<String>,
    pub counts: Vec<u64>,
    pub total: u64,
}

pub fn survey_ingest(path: &Path, categories: Option<&str>, json: bool) -> Result<()> {
    let s = ingest_file(path, categories)?;
    let out = SurveyOutput {
        categories: s.categories,
        counts: s.counts.counts().to_vec(),
        total: s.counts.total(),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&out)?);
    } else {
        for (c, n) in out.categories.iter().zip(&out.counts) {
            println!("{c}: {n}");
        }
        println!("total: {}", out.total);
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Freq,
    Bayes,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequentistOutput {
    pub weights: Vec<f64>,
    pub variance: Vec<f64>,
    pub has_zero: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BayesianOutput {
    pub alpha_hat: Vec<f64>,
    pub weights: Vec<f64>,
    pub variance_plugin: Vec<f64>,
    pub variance_posterior: Vec<f64>,
    pub log_marginal: f64,
    pub iterations: usize,
    pub converged: bool,
    pub hit_cap: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateOutput {
    pub counts: Vec<u64>,
    pub total: u64,
    pub frequentist: Option<FrequentistOutput>,
    pub bayesian: Option<BayesianOutput>,
}

pub fn compute_estimate(counts: &PreferenceCounts, method: Method, config: &FitConfig) -> Result<EstimateOutput> {
    let n = counts.total();
    let frequentist = matches!(method, Method::Freq | Method::Both).then(|| {
        let w = frequentist_weights(counts);
        FrequentistOutput {
            variance: frequentist_variance(w.as_slice(), n),
            has_zero: w.has_zero(),
            weights: w.as_slice().to_vec(),
        }
    });
    let bayesian = if matches!(method, Method::Bayes | Method::Both) {
        let fit = fit_alpha(counts, config)?;
        let w = bayesian_weights(counts, &fit)?;
        let posterior = posterior_update(&fit.alpha_hat, counts.counts())?;
        Some(BayesianOutput {
            variance_plugin: bayesian_variance_plugin(&w, &fit.alpha_hat, n)?,
            variance_posterior: bayesian_variance_exact(&posterior),
            alpha_hat: fit.alpha_hat.alpha().to_vec(),
            weights: w.into_inner(),
            log_marginal: fit.log_marginal,
            iterations: fit.iterations,
            converged: fit.converged,
            hit_cap: fit.hit_cap,
        })
    } else {
        None
    };
    Ok(EstimateOutput {
        counts: counts.counts().to_vec(),
        total: n,
        frequentist,
        bayesian,
    })
}

pub fn estimate(source: &CountsSource, method: Method, fit: &FitArgs, json: Option<&Path>) -> Result<()> {
    let Some(counts) = source.load()? else {
        bail!("one of --counts or --survey is required");
    };
    let out = compute_estimate(&counts, method, &fit.config()?)?;

    println!(
        "counts: {} (n = {})",
        out.counts.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
        out.total
    );
    if let Some(f) = &out.frequentist {
        println!("frequentist weights: {}", sig6_list(&f.weights));
        println!("frequentist variance: {}", sig6_list(&f.variance));
        if f.has_zero {
            println!("note: a category received no votes; frequentist weights contain a zero");
        }
    }
    if let Some(b) = &out.bayesian {
        println!("alpha_hat: {}", sig6_list(&b.alpha_hat));
        println!("bayesian weights: {}", sig6_list(&b.weights));
        println!("bayesian variance (plug-in): {}", sig6_list(&b.variance_plugin));
        println!("bayesian variance (posterior): {}", sig6_list(&b.variance_posterior));
        println!(
            "fit: log_marginal = {}, iterations = {}, converged = {}, hit_cap = {}",
            sig6(b.log_marginal),
            b.iterations,
            b.converged,
            b.hit_cap
        );
    }
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&out)?;
        if path == Path::new("-") {
            println!("{text}");
        } else {
            fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
        }
    }
    Ok(())
}

/// Reads count rows, reporting malformed ones on stderr and skipping them.
pub fn compare<R: Read, W: Write>(input: R, output: W, fit: &FitConfig, warn: &mut dyn Write) -> Result<usize> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let l = reader.headers()?.len();
    let mut writer = csv::Writer::from_writer(output);
    writer.write_record(report_csv_header(if l >= 2 { l } else { 3 }))?;
    let mut bad = 0;
    for record in reader.records() {
        let (line, row) = match record {
            Ok(r) => (r.position().map_or(0, |p| p.line()), r),
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                writeln!(warn, "warning[row]: line {line}: {e}")?;
                bad += 1;
                continue;
            }
        };
        let parsed = (|| -> Result<PreferenceCounts> {
            if row.len() != l {
                bail!("expected {l} fields, found {}", row.len());
            }
            let raw = row
                .iter()
                .map(|f| f.parse::<i64>().map_err(|_| anyhow::anyhow!("invalid count {f:?}")))
                .collect::<Result<Vec<_>>>()?;
            Ok(prefweights::simplex::validate_counts(&raw)?)
        })();
        match parsed.and_then(|c| Ok(build_report(&c, fit)?)) {
            Ok(report) => writer.write_record(report_csv_record(&report))?,
            Err(e) => {
                writeln!(warn, "warning[row]: line {line}: {e}")?;
                bad += 1;
            }
        }
    }
    writer.flush()?;
    Ok(bad)
}

pub fn parse_true_weights(s: &str) -> Result<WeightVector> {
    let raw: Vec<f64> = parse_list(s, "weight")?;
    let sum: f64 = raw.iter().sum();
    if raw.iter().any(|w| !(w.is_finite() && *w > 0.0)) || (sum - 1.0).abs() > 1e-9 {
        bail!("weights must be positive and sum to 1 (sum is {sum})");
    }
    Ok(WeightVector::new(raw)?)
}

pub fn simulate(weights: &str, sizes: &str, reps: u64, seed: u64, fit: &FitArgs, out: &Path) -> Result<()> {
    let plan = SimulationPlan {
        true_weights: parse_true_weights(weights)?,
        sample_sizes: parse_list(sizes, "size")?,
        replications: reps,
        seed: RngSeed::new(seed),
        fit_config: fit.config()?,
    };
    let result = run_simulation(&plan)?;
    let mut file = create(out)?;
    write_gain_curve_csv(&result, &mut file)?;
    file.flush()?;
    for row in &result.rows {
        println!(
            "n = {}: mean_gain = {}, skipped = {}/{}",
            row.sample_size,
            sig6(row.mean_gain),
            row.skipped,
            row.replication_count
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Args, Debug, Clone)]
pub struct GaArgs {
    #[arg(long, default_value_t = 50)]
    pub population: usize,
    #[arg(long, default_value_t = 30)]
    pub generations: usize,
    #[arg(long, default_value_t = 3)]
    pub tournament: usize,
    #[arg(long, default_value_t = 0.9)]
    pub crossover_rate: f64,
    #[arg(long, default_value_t = 0.1)]
    pub mutation_rate: f64,
    #[arg(long, default_value_t = 1)]
    pub elitism: usize,
    #[arg(long, default_value_t = 30)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl GaArgs {
    fn config(&self) -> GaConfig {
        GaConfig {
            population: self.population,
            generations: self.generations,
            tournament_size: self.tournament,
            crossover_rate: self.crossover_rate,
            mutation_rate: self.mutation_rate,
            elitism: self.elitism,
            seed: RngSeed::new(self.seed),
            runs: self.runs,
        }
    }
}

pub struct OptimizeArgs<'a> {
    pub graph: Option<&'a Path>,
    pub slots: Option<&'a str>,
    pub source: &'a CountsSource,
    pub weights: Option<&'a str>,
    pub weighting: Method,
    pub ga: &'a GaArgs,
    pub fit: &'a FitArgs,
    pub out_dir: &'a Path,
}

pub fn optimize(args: OptimizeArgs<'_>) -> Result<()> {
    let text = match args.graph {
        Some(p) => fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?,
        None => DEMO_GRAPH.to_string(),
    };
    let problem = RouteProblem::from_json(&text)?;
    let slots: Vec<usize> = match args.slots {
        Some(s) => parse_list(s, "slot")?,
        None => (0..problem.slots()).collect(),
    };
    for &s in &slots {
        problem.check_slot(s)?;
    }

    let (freq, bayes) = match (args.weights, args.source.load()?) {
        (Some(w), None) => {
            let w = parse_true_weights(w)?;
            (w.clone(), w)
        }
        (None, Some(counts)) => {
            let freq = frequentist_weights(&counts).to_weight_vector().ok();
            let fit = fit_alpha(&counts, &args.fit.config()?)?;
            let bayes = bayesian_weights(&counts, &fit)?;
            let freq = match (freq, args.weighting) {
                (Some(f), _) => f,
                (None, Method::Bayes) => bayes.clone(),
                (None, _) => bail!("frequentist weights contain a zero; use --weighting bayes"),
            };
            (freq, bayes)
        }
        (Some(_), Some(_)) => bail!("give either --weights or counts, not both"),
        (None, None) => bail!("one of --counts, --survey or --weights is required"),
    };
    println!("frequentist weights: {}", sig6_list(freq.as_slice()));
    println!("bayesian weights: {}", sig6_list(bayes.as_slice()));

    let config = args.ga.config();
    fs::create_dir_all(args.out_dir).with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    for &slot in &slots {
        let traces: Vec<(&str, GaTrace)> = match args.weighting {
            Method::Freq => vec![("freq", evolve(&problem, &freq, slot, &config)?)],
            Method::Bayes => vec![("bayes", evolve(&problem, &bayes, slot, &config)?)],
            Method::Both => {
                let pair = compare_weightings(&problem, &freq, &bayes, slot, &config)?;
                vec![("freq", pair.freq), ("bayes", pair.bayes)]
            }
        };
        write_traces(args.out_dir, slot, &traces)?;
        for (name, t) in &traces {
            println!(
                "slot {slot} {name}: mean = {}, worst = {}, best = {}",
                sig6(t.summary.mean),
                sig6(t.summary.worst),
                sig6(t.summary.best)
            );
        }
    }
    println!("wrote traces to {}", args.out_dir.display());
    Ok(())
}

/// Per-generation mean of the runs' best fitness, final best per run, and a
/// mean/worst/best summary, one file each.
fn write_traces(dir: &Path, slot: usize, traces: &[(&str, GaTrace)]) -> Result<()> {
    let columns: Vec<String> = traces.iter().map(|(n, _)| format!("fitness_{n}")).collect();

    let mut w = csv::Writer::from_writer(create(&dir.join(format!("generations_slot{slot}.csv")))?);
    w.write_record(std::iter::once("generation".to_string()).chain(columns.iter().cloned()))?;
    let generations = traces[0].1.runs[0].best_per_generation.len();
    for g in 0..generations {
        let mut rec = vec![(g + 1).to_string()];
        for (_, t) in traces {
            let mean = t.runs.iter().map(|r| r.best_per_generation[g]).sum::<f64>() / t.runs.len() as f64;
            rec.push(mean.to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(create(&dir.join(format!("runs_slot{slot}.csv")))?);
    w.write_record(std::iter::once("run".to_string()).chain(columns.iter().cloned()))?;
    for r in 0..traces[0].1.runs.len() {
        let mut rec = vec![(r + 1).to_string()];
        rec.extend(traces.iter().map(|(_, t)| t.runs[r].final_best.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_writer(create(&dir.join(format!("summary_slot{slot}.csv")))?);
    w.write_record(["weighting", "mean", "worst", "best"])?;
    for (name, t) in traces {
        w.write_record([
            name.to_string(),
            t.summary.mean.to_string(),
            t.summary.worst.to_string(),
            t.summary.best.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
