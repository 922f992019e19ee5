use std::collections::BTreeMap;
use std::fmt;

use crate::dist::{Alphabet, JointModel, Symbol};
use crate::error::{Error, Result};
use crate::leakage::Leakage;

use super::gain::{gain_ratio, positive_outcome, GainFunction};

/// Index of a level set of the posterior/prior ratio: cell `w` holds the
/// inputs with `e^{wε} ≤ f(x) < e^{(w+1)ε}`, and `NegInf` holds `f(x) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellIndex {
    NegInf,
    At(i64),
}

impl fmt::Display for CellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellIndex::NegInf => f.write_str("-inf"),
            CellIndex::At(w) => write!(f, "{w}"),
        }
    }
}

/// The ε-partition of the inputs by posterior/prior ratio, and the gain
/// `g(x, w) = 1{x ∈ B_w} / P_X(B_w)` built on it.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionGain {
    epsilon: f64,
    cells: BTreeMap<CellIndex, Vec<usize>>,
    prior_mass: BTreeMap<CellIndex, f64>,
}

impl PartitionGain {
    /// Partitions the inputs of `model` for outcome `y`.
    ///
    /// Requires `P_{X|Y=y} ≪ P_X`; prior-null inputs then have zero posterior
    /// and ratio `0/0 = 1`.
    pub fn build(model: &JointModel, y: &Symbol, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Parameter(format!("epsilon must be positive, got {epsilon}")));
        }
        let j = positive_outcome(model, y)?;
        let post = model.posterior_at(j);
        let prior = model.prior();

        let mut cells: BTreeMap<CellIndex, Vec<usize>> = BTreeMap::new();
        let mut prior_mass: BTreeMap<CellIndex, f64> = BTreeMap::new();
        for x in 0..prior.len() {
            let (p, q) = (post.prob(x), prior.prob(x));
            let cell = match (p > 0.0, q > 0.0) {
                (true, false) => {
                    return Err(Error::NotAbsolutelyContinuous {
                        witness: prior.alphabet().symbol(x).to_string(),
                    })
                }
                (false, true) => CellIndex::NegInf,
                (false, false) => CellIndex::At(0),
                (true, true) => CellIndex::At(((p.ln() - q.ln()) / epsilon).floor() as i64),
            };
            cells.entry(cell).or_default().push(x);
            *prior_mass.entry(cell).or_default() += q;
        }
        Ok(PartitionGain {
            epsilon,
            cells,
            prior_mass,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Non-empty cells in increasing index order.
    pub fn cells(&self) -> &BTreeMap<CellIndex, Vec<usize>> {
        &self.cells
    }

    /// `P_X(B_w)` for each non-empty cell.
    pub fn prior_mass(&self, cell: CellIndex) -> f64 {
        self.prior_mass.get(&cell).copied().unwrap_or(0.0)
    }

    /// The gain over the estimate space of non-empty cells. Cells of prior
    /// mass zero get gain zero everywhere.
    pub fn gain_function(&self, inputs: &Alphabet) -> GainFunction {
        let index: Vec<CellIndex> = self.cells.keys().copied().collect();
        let labels = Alphabet::new(index.iter().map(|c| Symbol::Str(c.to_string())))
            .expect("cell indices are distinct");
        let mut member = vec![CellIndex::NegInf; inputs.len()];
        for (cell, xs) in &self.cells {
            for &x in xs {
                member[x] = *cell;
            }
        }
        GainFunction::from_fn(inputs.clone(), labels, |x, w| {
            let cell = index[w];
            let mass = self.prior_mass(cell);
            if member[x] == cell && mass > 0.0 {
                1.0 / mass
            } else {
                0.0
            }
        })
        .expect("partition gains are finite and non-negative")
    }
}

/// Leakage achieved by the ε-partition gain; lies in `[pml - ε, pml]`.
pub fn partition_oracle(model: &JointModel, y: &Symbol, epsilon: f64) -> Result<Leakage> {
    let partition = PartitionGain::build(model, y, epsilon)?;
    let g = partition.gain_function(model.inputs());
    Ok(Leakage::from_ratio(gain_ratio(model, y, &g)?))
}
