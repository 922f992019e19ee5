use crate::dist::{JointModel, Symbol};
use crate::error::{Error, Result};
use crate::leakage::Leakage;

use super::gain::positive_outcome;

/// Largest input alphabet the grouping enumeration accepts.
pub const FUNCTION_ORACLE_MAX_INPUTS: usize = 10;

/// Guessing ratio achieved on `W = grouping(X)` by the shattering channel:
/// `log max_i P_{W|Y=y}(i) / P_W(i)`.
///
/// `grouping[x]` is the group of input `x`; groups must be numbered
/// `0..k` with none left empty.
pub fn shattering_value(model: &JointModel, y: &Symbol, grouping: &[usize]) -> Result<Leakage> {
    let n = model.inputs().len();
    if grouping.len() != n {
        return Err(Error::DimensionMismatch {
            context: "grouping",
            expected: n,
            found: grouping.len(),
        });
    }
    let j = positive_outcome(model, y)?;
    let k = grouping.iter().copied().max().map_or(0, |m| m + 1);
    let mut used = vec![false; k];
    for &g in grouping {
        used[g] = true;
    }
    if let Some(empty) = used.iter().position(|u| !u) {
        return Err(Error::Definition(format!("group {empty} has no members")));
    }
    let post = model.posterior_at(j);
    let mut post_mass = vec![0.0; k];
    let mut prior_mass = vec![0.0; k];
    for (x, &g) in grouping.iter().enumerate() {
        post_mass[g] += post.prob(x);
        prior_mass[g] += model.prior().prob(x);
    }
    Ok(max_group_ratio(&post_mass, &prior_mass))
}

fn max_group_ratio(post_mass: &[f64], prior_mass: &[f64]) -> Leakage {
    let mut best = 0.0f64;
    for (&p, &q) in post_mass.iter().zip(prior_mass) {
        let r = match (p > 0.0, q > 0.0) {
            (_, true) => p / q,
            (true, false) => return Leakage::INFINITE,
            (false, false) => 1.0,
        };
        best = best.max(r);
    }
    Leakage::from_ratio(best)
}

/// Best shattering value over every deterministic grouping of the inputs
/// into at most `max_groups` groups.
///
/// A lower bound on the leakage, and equal to it once `max_groups` reaches the
/// input alphabet size (the singleton grouping is then available). Groupings
/// are enumerated once per set partition.
pub fn randomized_function_oracle(model: &JointModel, y: &Symbol, max_groups: usize) -> Result<Leakage> {
    let n = model.inputs().len();
    if n > FUNCTION_ORACLE_MAX_INPUTS {
        return Err(Error::Capacity {
            what: "function oracle input alphabet",
            requested: n,
            limit: FUNCTION_ORACLE_MAX_INPUTS,
        });
    }
    if max_groups == 0 {
        return Err(Error::Parameter("max_groups must be positive".into()));
    }
    let j = positive_outcome(model, y)?;
    let post = model.posterior_at(j);
    let mut search = Search {
        post: post.probs(),
        prior: model.prior().probs(),
        max_groups: max_groups.min(n),
        post_mass: Vec::with_capacity(n),
        prior_mass: Vec::with_capacity(n),
        best: Leakage::ZERO,
    };
    search.extend(0);
    Ok(search.best)
}

struct Search<'a> {
    post: &'a [f64],
    prior: &'a [f64],
    max_groups: usize,
    post_mass: Vec<f64>,
    prior_mass: Vec<f64>,
    best: Leakage,
}

impl Search<'_> {
    // Restricted growth strings: input x joins an existing group or opens the next one.
    fn extend(&mut self, x: usize) {
        if x == self.post.len() {
            let v = max_group_ratio(&self.post_mass, &self.prior_mass);
            if v > self.best {
                self.best = v;
            }
            return;
        }
        for g in 0..self.post_mass.len() {
            self.post_mass[g] += self.post[x];
            self.prior_mass[g] += self.prior[x];
            self.extend(x + 1);
            self.post_mass[g] -= self.post[x];
            self.prior_mass[g] -= self.prior[x];
        }
        if self.post_mass.len() < self.max_groups {
            self.post_mass.push(self.post[x]);
            self.prior_mass.push(self.prior[x]);
            self.extend(x + 1);
            self.post_mass.pop();
            self.prior_mass.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Alphabet, DiscreteChannel, DiscreteDistribution};
    use crate::leakage::pml;

    fn model() -> JointModel {
        let a = Alphabet::indices(4).unwrap();
        let prior = DiscreteDistribution::new(a.clone(), vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let ch = DiscreteChannel::new(
            a,
            Alphabet::indices(2).unwrap(),
            vec![vec![0.9, 0.1], vec![0.7, 0.3], vec![0.2, 0.8], vec![0.05, 0.95]],
        )
        .unwrap();
        JointModel::new(prior, ch).unwrap()
    }

    #[test]
    fn identity_and_constant_groupings() {
        let m = model();
        let y = Symbol::Int(0);
        let id = shattering_value(&m, &y, &[0, 1, 2, 3]).unwrap();
        assert!((id.nats() - pml(&m, &y).unwrap().nats()).abs() < 1e-12);
        let one = shattering_value(&m, &y, &[0, 0, 0, 0]).unwrap();
        assert!(one.nats() < 1e-15);
    }

    #[test]
    fn grouping_errors() {
        let m = model();
        let y = Symbol::Int(0);
        assert!(matches!(
            shattering_value(&m, &y, &[0, 2, 2, 0]),
            Err(Error::Definition(_))
        ));
        assert!(matches!(
            shattering_value(&m, &y, &[0, 1]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn enumeration_counts_set_partitions() {
        // Bell(4) = 15 groupings; checked through the monotone ladder.
        let m = model();
        let y = Symbol::Int(1);
        let vals: Vec<f64> = (1..=4)
            .map(|k| randomized_function_oracle(&m, &y, k).unwrap().nats())
            .collect();
        assert_eq!(vals[0], 0.0);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        assert!((vals[3] - pml(&m, &y).unwrap().nats()).abs() < 1e-12);
    }

    #[test]
    fn capacity() {
        let a = Alphabet::indices(11).unwrap();
        let m = JointModel::new(DiscreteDistribution::uniform(a.clone()), DiscreteChannel::identity(a)).unwrap();
        assert!(randomized_function_oracle(&m, &Symbol::Int(0), 3).unwrap_err().is_capacity());
    }
}
