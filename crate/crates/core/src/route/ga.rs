//! Variable-length path genetic algorithm over origin-to-lot routes.
//!
//! Chromosomes are simple paths. Crossover splices two parents at a shared
//! node and cuts any loop the splice creates; mutation either reroutes a
//! random subpath or regrows the tail towards some lot. The best `elitism`
//! chromosomes survive unchanged, so per-generation best fitness never rises.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{route_objectives, scalarize, RouteProblem};
use crate::error::{Error, Result};
use crate::rng::RngSeed;
use crate::simplex::WeightVector;

/// Invalid offspring tolerated per generation before giving up.
const COLLAPSE_BUDGET: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub elitism: usize,
    pub seed: RngSeed,
    pub runs: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 50,
            generations: 30,
            tournament_size: 3,
            crossover_rate: 0.9,
            mutation_rate: 0.1,
            elitism: 1,
            seed: RngSeed::default(),
            runs: 30,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.population == 0 || self.generations == 0 || self.runs == 0 {
            return bad("population, generations and runs must be positive");
        }
        if self.tournament_size < 2 {
            return bad("tournament size must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) || !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad("crossover and mutation rates must lie in [0, 1]");
        }
        if self.elitism == 0 || self.elitism >= self.population {
            return bad("elitism must be positive and smaller than the population");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    /// Best fitness after each generation.
    pub best_per_generation: Vec<f64>,
    pub best_path: Vec<String>,
    pub final_best: f64,
}

/// Final best fitness across runs. Fitness is minimized, so `worst` is the largest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessSummary {
    pub mean: f64,
    pub worst: f64,
    pub best: f64,
}

impl FitnessSummary {
    fn of(values: &[f64]) -> Self {
        let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let best = values.iter().copied().fold(f64::INFINITY, f64::min);
        // rounding in the sum can push the mean of equal values past them
        let mean = (values.iter().sum::<f64>() / values.len() as f64).clamp(best, worst);
        Self { mean, worst, best }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaTrace {
    pub runs: Vec<RunTrace>,
    pub summary: FitnessSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedTrace {
    pub freq: GaTrace,
    pub bayes: GaTrace,
}

#[derive(Clone, Debug)]
struct Chromosome {
    path: Vec<usize>,
    fitness: f64,
}

struct Run<'a> {
    problem: &'a RouteProblem,
    weights: &'a WeightVector,
    slot: usize,
    config: &'a GaConfig,
}

impl Run<'_> {
    fn evaluate(&self, path: Vec<usize>) -> Result<Chromosome> {
        let fitness = scalarize(self.weights, &route_objectives(self.problem, &path, self.slot)?)?;
        Ok(Chromosome { path, fitness })
    }

    fn tournament<'p, R: Rng>(&self, pop: &'p [Chromosome], rng: &mut R) -> &'p Chromosome {
        (0..self.config.tournament_size)
            .map(|_| &pop[rng.random_range(0..pop.len())])
            .min_by(|a, b| a.fitness.total_cmp(&b.fitness))
            .expect("tournament size is at least 2")
    }

    fn execute(&self, seed: RngSeed) -> Result<RunTrace> {
        let problem = self.problem;
        let mut rng = seed.rng();
        let open = vec![false; problem.len()];

        let mut pop = Vec::with_capacity(self.config.population);
        for _ in 0..self.config.population {
            let path = problem
                .random_path(&mut rng, problem.origin(), |v| problem.is_lot(v), &open)
                .ok_or(Error::Unreachable(self.slot))?;
            pop.push(self.evaluate(path)?);
        }
        sort(&mut pop);

        let mut best_per_generation = Vec::with_capacity(self.config.generations);
        for _ in 0..self.config.generations {
            let mut next: Vec<Chromosome> = pop[..self.config.elitism].to_vec();
            let mut failures = 0;
            while next.len() < self.config.population {
                let a = self.tournament(&pop, &mut rng);
                let b = self.tournament(&pop, &mut rng);
                let mut child = if rng.random::<f64>() < self.config.crossover_rate {
                    crossover(&a.path, &b.path, &mut rng)
                } else {
                    a.path.clone()
                };
                if rng.random::<f64>() < self.config.mutation_rate {
                    child = mutate(problem, child, &mut rng);
                }
                if problem.check_path(&child).is_ok() {
                    next.push(self.evaluate(child)?);
                } else {
                    failures += 1;
                    if failures >= COLLAPSE_BUDGET {
                        return Err(Error::PopulationCollapse(failures));
                    }
                }
            }
            sort(&mut next);
            pop = next;
            best_per_generation.push(pop[0].fitness);
        }

        let best = &pop[0];
        Ok(RunTrace {
            best_per_generation,
            best_path: best.path.iter().map(|&v| problem.node_id(v).to_string()).collect(),
            final_best: best.fitness,
        })
    }
}

fn sort(pop: &mut [Chromosome]) {
    pop.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
}

/// Splices `a` up to a shared node with the remainder of `b`, then removes loops.
fn crossover<R: Rng>(a: &[usize], b: &[usize], rng: &mut R) -> Vec<usize> {
    let common: Vec<(usize, usize)> = a
        .iter()
        .enumerate()
        .skip(1)
        .filter_map(|(i, v)| b.iter().skip(1).position(|w| w == v).map(|j| (i, j + 1)))
        .collect();
    if common.is_empty() {
        return a.to_vec();
    }
    let (i, j) = common[rng.random_range(0..common.len())];
    let mut child = a[..=i].to_vec();
    child.extend_from_slice(&b[j + 1..]);
    remove_loops(child)
}

fn remove_loops(path: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(path.len());
    for v in path {
        if let Some(pos) = out.iter().position(|&w| w == v) {
            out.truncate(pos + 1);
        } else {
            out.push(v);
        }
    }
    out
}

fn mutate<R: Rng>(problem: &RouteProblem, path: Vec<usize>, rng: &mut R) -> Vec<usize> {
    let len = path.len();
    let i = rng.random_range(0..len - 1);
    let mut blocked = vec![false; problem.len()];
    path[..i].iter().for_each(|&v| blocked[v] = true);
    if rng.random::<bool>() {
        // detour between path[i] and path[j]
        let j = rng.random_range(i + 1..len);
        path[j + 1..].iter().for_each(|&v| blocked[v] = true);
        let target = path[j];
        match problem.random_path(rng, path[i], |v| v == target, &blocked) {
            Some(sub) => {
                let mut out = path[..i].to_vec();
                out.extend(sub);
                out.extend_from_slice(&path[j + 1..]);
                out
            }
            None => path,
        }
    } else {
        match problem.random_path(rng, path[i], |v| problem.is_lot(v), &blocked) {
            Some(sub) => {
                let mut out = path[..i].to_vec();
                out.extend(sub);
                out
            }
            None => path,
        }
    }
}

/// Runs the GA `config.runs` times; run `r` draws from `config.seed.substream(&[r])`.
pub fn evolve(problem: &RouteProblem, weights: &WeightVector, slot: usize, config: &GaConfig) -> Result<GaTrace> {
    config.validate()?;
    problem.check_slot(slot)?;
    if weights.len() != 3 {
        return Err(Error::LengthMismatch {
            left: weights.len(),
            right: 3,
        });
    }
    let run = Run {
        problem,
        weights,
        slot,
        config,
    };
    let runs = (0..config.runs)
        .into_par_iter()
        .map(|r| run.execute(config.seed.substream(&[r as u64])))
        .collect::<Result<Vec<_>>>()?;
    let finals: Vec<f64> = runs.iter().map(|r| r.final_best).collect();
    Ok(GaTrace {
        summary: FitnessSummary::of(&finals),
        runs,
    })
}

/// Runs both weightings with the same per-run random streams.
pub fn compare_weightings(
    problem: &RouteProblem,
    freq: &WeightVector,
    bayes: &WeightVector,
    slot: usize,
    config: &GaConfig,
) -> Result<PairedTrace> {
    Ok(PairedTrace {
        freq: evolve(problem, freq, slot, config)?,
        bayes: evolve(problem, bayes, slot, config)?,
    })
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{ladder, triangle};
    use super::*;

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    fn config(seed: u64) -> GaConfig {
        GaConfig {
            seed: RngSeed::new(seed),
            ..GaConfig::default()
        }
    }

    fn all_paths(p: &RouteProblem) -> Vec<Vec<usize>> {
        fn walk(p: &RouteProblem, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            let v = *path.last().unwrap();
            if p.is_lot(v) {
                out.push(path.clone());
            }
            let next: Vec<usize> = p.neighbors(v).collect();
            for w in next {
                if !path.contains(&w) {
                    path.push(w);
                    walk(p, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        walk(p, &mut vec![p.origin()], &mut out);
        out
    }

    #[test]
    fn config_validation() {
        assert!(GaConfig::default().validate().is_ok());
        for broken in [
            GaConfig {
                population: 0,
                ..GaConfig::default()
            },
            GaConfig {
                generations: 0,
                ..GaConfig::default()
            },
            GaConfig {
                runs: 0,
                ..GaConfig::default()
            },
            GaConfig {
                tournament_size: 1,
                ..GaConfig::default()
            },
            GaConfig {
                crossover_rate: 1.5,
                ..GaConfig::default()
            },
            GaConfig {
                mutation_rate: -0.1,
                ..GaConfig::default()
            },
            GaConfig {
                elitism: 0,
                ..GaConfig::default()
            },
            GaConfig {
                elitism: 50,
                ..GaConfig::default()
            },
        ] {
            assert!(broken.validate().is_err(), "{broken:?}");
        }
    }

    #[test]
    fn summary_of_ties_is_exact() {
        let v = [0.23956533761174265; 30];
        let s = FitnessSummary::of(&v);
        assert_eq!((s.mean, s.worst, s.best), (v[0], v[0], v[0]));
    }

    #[test]
    fn loop_removal() {
        assert_eq!(remove_loops(vec![0, 1, 2, 1, 3]), vec![0, 1, 3]);
        assert_eq!(remove_loops(vec![0, 1, 2, 3, 0, 4]), vec![0, 4]);
        assert_eq!(remove_loops(vec![0, 1, 2]), vec![0, 1, 2]);
    }

    #[test]
    fn operators_keep_paths_valid() {
        let p = ladder();
        let mut rng = RngSeed::new(5).rng();
        let open = vec![false; p.len()];
        for _ in 0..500 {
            let a = p.random_path(&mut rng, p.origin(), |v| p.is_lot(v), &open).unwrap();
            let b = p.random_path(&mut rng, p.origin(), |v| p.is_lot(v), &open).unwrap();
            p.check_path(&crossover(&a, &b, &mut rng)).unwrap();
            p.check_path(&mutate(&p, a, &mut rng)).unwrap();
        }
    }

    #[test]
    fn traces_are_monotone_and_bounded() {
        let p = ladder();
        let t = evolve(&p, &wv(&[0.32, 0.28, 0.40]), 0, &config(1)).unwrap();
        assert_eq!(t.runs.len(), 30);
        for run in &t.runs {
            assert_eq!(run.best_per_generation.len(), 30);
            assert!(run.best_per_generation.windows(2).all(|w| w[1] <= w[0]));
            assert!(run.best_per_generation.iter().all(|f| (0.0..=1.0).contains(f)));
            assert_eq!(run.final_best, *run.best_per_generation.last().unwrap());
        }
        assert!(t.summary.best <= t.summary.mean && t.summary.mean <= t.summary.worst);
    }

    #[test]
    fn best_path_reproduces_its_fitness() {
        let p = ladder();
        let w = wv(&[0.2, 0.5, 0.3]);
        let t = evolve(&p, &w, 0, &config(2)).unwrap();
        for run in &t.runs {
            let path = p.path_from_ids(&run.best_path).unwrap();
            let f = scalarize(&w, &route_objectives(&p, &path, 0).unwrap()).unwrap();
            assert_eq!(f, run.final_best);
        }
    }

    #[test]
    fn finds_enumerated_optimum() {
        let p = ladder();
        let paths = all_paths(&p);
        assert!(paths.len() <= 200, "{}", paths.len());
        for (seed, w) in [(3, [0.32, 0.28, 0.40]), (4, [0.6, 0.2, 0.2]), (5, [0.1, 0.8, 0.1])] {
            let w = wv(&w);
            let optimum = paths
                .iter()
                .map(|path| scalarize(&w, &route_objectives(&p, path, 0).unwrap()).unwrap())
                .fold(f64::INFINITY, f64::min);
            let t = evolve(&p, &w, 0, &config(seed)).unwrap();
            let hits = t.runs.iter().filter(|r| (r.final_best - optimum).abs() < 1e-12).count();
            assert!(hits >= 28, "{hits}/30 runs reached {optimum}");
            assert!(t.runs.iter().all(|r| r.final_best >= optimum - 1e-12));
        }
    }

    #[test]
    fn evolve_is_deterministic() {
        let p = ladder();
        let w = wv(&[0.3, 0.3, 0.4]);
        let c = GaConfig { runs: 5, ..config(6) };
        assert_eq!(evolve(&p, &w, 0, &c).unwrap(), evolve(&p, &w, 0, &c).unwrap());
    }

    #[test]
    fn identical_weightings_give_identical_traces() {
        let p = ladder();
        let w = wv(&[0.3, 0.3, 0.4]);
        let c = GaConfig { runs: 5, ..config(7) };
        let pair = compare_weightings(&p, &w, &w, 0, &c).unwrap();
        assert_eq!(pair.freq, pair.bayes);
    }

    #[test]
    fn different_weightings_differ() {
        let p = triangle();
        let c = GaConfig { runs: 5, ..config(8) };
        let pair = compare_weightings(&p, &wv(&[0.32, 0.28, 0.40]), &wv(&[0.29, 0.30, 0.41]), 0, &c).unwrap();
        assert_ne!(pair.freq.summary.mean, pair.bayes.summary.mean);
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = triangle();
        let w = wv(&[0.3, 0.3, 0.4]);
        assert!(matches!(
            evolve(&p, &w, 2, &config(0)),
            Err(Error::SlotOutOfRange { .. })
        ));
        assert!(evolve(&p, &wv(&[0.5, 0.5]), 0, &config(0)).is_err());
        let c = GaConfig {
            elitism: 0,
            ..config(0)
        };
        assert!(evolve(&p, &w, 0, &c).is_err());
    }
}
