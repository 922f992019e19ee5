//! Pointwise maximal leakage.
//!
//! The leakage of a secret `X` through a released outcome `y` is
//!
//! ```text
//! ℓ(X → y) = log max_x P(y | x) / P_Y(y)
//! ```
//!
//! the Rényi divergence of order infinity from the prior to the posterior.
//! This crate computes it for finite and truncated countable models, for
//! real-valued models through closed forms or a density grid, and checks
//! it against several adversary formulations that must agree with it.
//!
//! ```
//! use pmlkit::{leakage_profile, Alphabet, DiscreteChannel, DiscreteDistribution, JointModel};
//!
//! // Binary symmetric channel with crossover 0.1 and a uniform input.
//! let bits = Alphabet::indices(2).unwrap();
//! let channel = DiscreteChannel::new(bits.clone(), bits, vec![vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
//! let prior = DiscreteDistribution::uniform(channel.input().clone());
//! let model = JointModel::new(prior, channel).unwrap();
//!
//! let profile = leakage_profile(&model);
//! assert!((profile.leakages()[0].nats() - 1.8f64.ln()).abs() < 1e-12);
//! assert!((profile.maximal_leakage().nats() - 1.8f64.ln()).abs() < 1e-12);
//! ```

pub mod continuous;
pub mod dist;
pub mod error;
pub mod io;
pub mod leakage;
pub mod oracle;

pub use dist::{
    marginal, truncate_countable, Alphabet, CountableLaw, DiscreteChannel, DiscreteDistribution, JointModel, Symbol,
};
pub use error::{Error, Result};
pub use leakage::{
    absolute_continuity, check_absolute_continuity, leakage_cdf, leakage_profile, maximal_leakage, mean_leakage, pml,
    pml_at, renyi_inf, tail_probability, CdfPoint, Continuity, Leakage, LeakageProfile, Units,
};

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The guide's chapters, compiled so their snippets stay in step with the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/discrete.md")]
    mod discrete {}
    #[doc = include_str!("../../../book/src/adversaries.md")]
    mod adversaries {}
    #[doc = include_str!("../../../book/src/continuous.md")]
    mod continuous {}
    #[doc = include_str!("../../../book/src/tails.md")]
    mod tails {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
