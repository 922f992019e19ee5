//! Brute-force adversaries.
//!
//! Each oracle realizes an operational definition of leakage directly (a
//! search over events or over functions of `X`) and never calls
//! the divergence code in [`crate::leakage`], so agreement between the two is
//! a real check.

mod functions;
mod gain;
mod partition;
mod strategy;
mod subset;

pub use functions::{randomized_function_oracle, shattering_value, FUNCTION_ORACLE_MAX_INPUTS};
pub use gain::{gain_ratio, make_approx_gain, make_guessing_gain, GainFunction};
pub use partition::{partition_oracle, CellIndex, PartitionGain};
pub use strategy::{
    randomized_strategy_check, randomized_strategy_excess, STRATEGY_MAX_ESTIMATES, STRATEGY_MAX_RESOLUTION,
    STRATEGY_TOLERANCE,
};
pub use subset::{subset_oracle, SUBSET_ORACLE_MAX_INPUTS};
