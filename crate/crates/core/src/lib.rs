//! Survey-driven weight estimation for weighted-sum multi-objective optimization.
//!
//! Preference votes from a pilot survey are modelled as multinomial counts with a
//! Dirichlet prior over the objective weights. The prior's concentration vector is
//! fitted by maximizing the Dirichlet-multinomial marginal likelihood (empirical
//! Bayes), and the posterior mean supplies the weights used to scalarize the
//! objectives. The crate also carries the frequentist proportion estimator it is
//! compared against, a Monte-Carlo comparison harness, and a genetic-algorithm
//! parking-route optimizer that consumes the weights.

pub mod dirichlet;
pub mod empirical_bayes;
pub mod error;
pub mod estimators;
pub mod rng;
pub mod route;
pub mod simplex;
pub mod simulation;
pub mod special;

pub use error::{Error, Result};
pub use rng::RngSeed;
pub use simplex::{DirichletParams, ObjectiveValues, PreferenceCounts, WeightVector};
