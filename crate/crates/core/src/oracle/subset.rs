use crate::dist::{JointModel, Symbol};
use crate::error::{Error, Result};
use crate::leakage::Leakage;

use super::gain::positive_outcome;

/// Largest input alphabet the subset enumeration accepts (2^20 subsets).
pub const SUBSET_ORACLE_MAX_INPUTS: usize = 20;

/// `log max_{A ≠ ∅} P_{X|Y=y}(A) / P_X(A)` by enumerating every subset of the
/// input alphabet.
pub fn subset_oracle(model: &JointModel, y: &Symbol) -> Result<Leakage> {
    let n = model.inputs().len();
    if n > SUBSET_ORACLE_MAX_INPUTS {
        return Err(Error::Capacity {
            what: "subset oracle input alphabet",
            requested: n,
            limit: SUBSET_ORACLE_MAX_INPUTS,
        });
    }
    let j = positive_outcome(model, y)?;
    let post = model.posterior_at(j);
    let prior = model.prior();

    let size = 1usize << n;
    let mut post_mass = vec![0.0; size];
    let mut prior_mass = vec![0.0; size];
    let mut best = 0.0f64;
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        post_mass[mask] = post_mass[rest] + post.prob(low);
        prior_mass[mask] = prior_mass[rest] + prior.prob(low);
        let ratio = match (post_mass[mask] > 0.0, prior_mass[mask] > 0.0) {
            (_, true) => post_mass[mask] / prior_mass[mask],
            (true, false) => return Ok(Leakage::INFINITE),
            (false, false) => 1.0,
        };
        best = best.max(ratio);
    }
    Ok(Leakage::from_ratio(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Alphabet, DiscreteChannel, DiscreteDistribution};

    #[test]
    fn independence_gives_zero() {
        let a = Alphabet::indices(3).unwrap();
        let prior = DiscreteDistribution::new(a.clone(), vec![0.2, 0.3, 0.5]).unwrap();
        let row = DiscreteDistribution::uniform(Alphabet::indices(2).unwrap());
        let m = JointModel::new(prior, DiscreteChannel::constant(a, row)).unwrap();
        assert!(subset_oracle(&m, &Symbol::Int(0)).unwrap().nats() < 1e-15);
    }

    #[test]
    fn identity_gives_log_inverse_prior() {
        let a = Alphabet::indices(3).unwrap();
        let prior = DiscreteDistribution::new(a.clone(), vec![0.2, 0.3, 0.5]).unwrap();
        let m = JointModel::new(prior, DiscreteChannel::identity(a)).unwrap();
        let v = subset_oracle(&m, &Symbol::Int(0)).unwrap();
        assert!((v.nats() - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn capacity_and_zero_outcome_errors() {
        let a = Alphabet::indices(21).unwrap();
        let m = JointModel::new(DiscreteDistribution::uniform(a.clone()), DiscreteChannel::identity(a)).unwrap();
        assert!(subset_oracle(&m, &Symbol::Int(0)).unwrap_err().is_capacity());

        let a = Alphabet::indices(2).unwrap();
        let ch = DiscreteChannel::new(a.clone(), a.clone(), vec![vec![1.0, 0.0]; 2]).unwrap();
        let m = JointModel::new(DiscreteDistribution::uniform(a), ch).unwrap();
        assert!(matches!(
            subset_oracle(&m, &Symbol::Int(1)),
            Err(Error::ZeroProbabilityOutcome(_))
        ));
    }
}
