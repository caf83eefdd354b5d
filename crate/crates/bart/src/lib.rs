//! Bayesian additive regression trees with probit links and monotone shape
//! constraints.
//!
//! Four model variants share one backfitting MCMC engine:
//!
//! * `bart`: continuous outcome, Gaussian errors;
//! * `pbart`: binary outcome through a probit link, fit by latent-normal
//!   data augmentation;
//! * `mbart`: continuous outcome with coordinatewise monotone constraints,
//!   enforced through order-truncated leaf priors;
//! * `pmbart`: the probit and monotone pieces combined.
//!
//! Structure moves are birth/death Metropolis-Hastings steps whose leaf
//! values are proposed from constrained full conditionals; leaf values are
//! then refreshed by truncated-normal Gibbs. Everything is generic over the
//! scalar type through [`Real`] (`f32` or `f64`), with `f64` aliases at the
//! crate root for ordinary use.
//!
//! ```no_run
//! use bart::{run_mcmc, Dataset64, ModelConfig64, ModelVariant};
//!
//! let data = Dataset64::load_csv("data.csv", "y").unwrap();
//! let cfg = ModelConfig64::for_variant(ModelVariant::Probit);
//! let result = run_mcmc(&data, &cfg).unwrap();
//! let probs = result.draws.predict_prob(&[0.5]).unwrap();
//! println!("posterior mean p(0.5) = {}", probs.iter().sum::<f64>() / probs.len() as f64);
//! ```

pub mod data;
mod error;
mod float;
pub mod math;
pub mod oracle;
pub mod posterior;
pub mod priors;
pub mod sampler;
pub mod sim;
pub mod tree;
pub mod truncnorm;

pub use data::{compute_offset, scale_outcome, CutpointGrid, Dataset, OutcomeScaling};
pub use error::{BartError, Result};
pub use float::Real;
pub use posterior::{CurveSummary, FitMetric, FitReport, PosteriorDraws};
pub use priors::{
    calibrate_leaf_prior, calibrate_sigma_prior, LeafPriorParams, SigmaPriorParams,
    TreePriorParams,
};
pub use sampler::{
    run_mcmc, Chain, Direction, ModelConfig, ModelVariant, MonotoneSpec, MoveKind, MoveOutcome,
    MoveStats, RunResult, SamplerState, TraceRow,
};
pub use tree::{Cell, ConstraintBounds, SplitRule, Tree};

/// `f64` aliases for everyday use.
pub type Dataset64 = Dataset<f64>;
pub type Tree64 = Tree<f64>;
pub type ModelConfig64 = ModelConfig<f64>;
pub type Chain64 = Chain<f64>;
pub type PosteriorDraws64 = PosteriorDraws<f64>;
pub type CurveSummary64 = CurveSummary<f64>;

/// `f32` aliases for memory-constrained ensembles.
pub type Dataset32 = Dataset<f32>;
pub type Tree32 = Tree<f32>;
pub type ModelConfig32 = ModelConfig<f32>;
pub type Chain32 = Chain<f32>;
pub type PosteriorDraws32 = PosteriorDraws<f32>;
