use crate::dist::{Alphabet, DiscreteChannel, DiscreteDistribution, JointModel, Symbol};
use crate::error::{Error, Result};

/// A dense non-negative gain table `g(x, w)` over inputs × estimates.
///
/// Finite tables always have a finite prior optimum, so every `GainFunction`
/// is an admissible gain.
#[derive(Debug, Clone, PartialEq)]
pub struct GainFunction {
    inputs: Alphabet,
    estimates: Alphabet,
    // row-major: table[x * |D| + w]
    table: Vec<f64>,
}

impl GainFunction {
    pub fn new(inputs: Alphabet, estimates: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != inputs.len() {
            return Err(Error::DimensionMismatch {
                context: "gain table rows",
                expected: inputs.len(),
                found: rows.len(),
            });
        }
        let mut table = Vec::with_capacity(inputs.len() * estimates.len());
        for row in rows {
            if row.len() != estimates.len() {
                return Err(Error::DimensionMismatch {
                    context: "gain table columns",
                    expected: estimates.len(),
                    found: row.len(),
                });
            }
            table.extend(row);
        }
        if let Some(v) = table.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Definition(format!("gain values must be finite and non-negative, got {v}")));
        }
        Ok(GainFunction {
            inputs,
            estimates,
            table,
        })
    }

    pub fn from_fn(inputs: Alphabet, estimates: Alphabet, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let rows = (0..inputs.len())
            .map(|x| (0..estimates.len()).map(|w| f(x, w)).collect())
            .collect();
        GainFunction::new(inputs, estimates, rows)
    }

    pub fn inputs(&self) -> &Alphabet {
        &self.inputs
    }

    pub fn estimates(&self) -> &Alphabet {
        &self.estimates
    }

    pub fn gain(&self, x: usize, w: usize) -> f64 {
        self.table[x * self.estimates.len() + w]
    }

    /// `Σ_x g(x, w) P(x)`.
    pub fn expected(&self, dist: &DiscreteDistribution, w: usize) -> f64 {
        dist.probs()
            .iter()
            .enumerate()
            .map(|(x, &p)| self.gain(x, w) * p)
            .sum()
    }

    /// Expected gain of every pure estimate.
    pub fn expected_all(&self, dist: &DiscreteDistribution) -> Vec<f64> {
        (0..self.estimates.len()).map(|w| self.expected(dist, w)).collect()
    }

    /// Best pure estimate and its expected gain; ties go to the lowest index.
    pub fn best(&self, dist: &DiscreteDistribution) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (w, v) in self.expected_all(dist).into_iter().enumerate() {
            if v > best.1 {
                best = (w, v);
            }
        }
        best
    }

    /// `max_w E[g(X, w)]` under the prior.
    pub fn prior_gain_sup(&self, prior: &DiscreteDistribution) -> f64 {
        self.best(prior).1
    }
}

pub(crate) fn positive_outcome(model: &JointModel, y: &Symbol) -> Result<usize> {
    let j = model.outcomes().index_of(y)?;
    if model.marginal().prob(j) == 0.0 {
        return Err(Error::ZeroProbabilityOutcome(y.to_string()));
    }
    Ok(j)
}

/// Ratio of the adversary's best posterior expected gain to the best prior
/// expected gain.
///
/// Randomized estimators never beat the best pure estimate, so both suprema
/// run over `w` only. A zero denominator gives `+∞` when the numerator is
/// positive and `1` when it is zero as well.
pub fn gain_ratio(model: &JointModel, y: &Symbol, g: &GainFunction) -> Result<f64> {
    if g.inputs() != model.inputs() {
        return Err(Error::AlphabetMismatch("gain function inputs"));
    }
    let j = positive_outcome(model, y)?;
    let post = model.posterior_at(j);
    let num = g.best(&post).1;
    let den = g.best(model.prior()).1;
    Ok(match (num > 0.0, den > 0.0) {
        (_, true) => num / den,
        (true, false) => f64::INFINITY,
        (false, false) => 1.0,
    })
}

/// Gain of an adversary guessing `U ~ P_{U|X}` exactly: `g(x, w) = P_{U|X=x}(w)`.
pub fn make_guessing_gain(subchannel: &DiscreteChannel) -> GainFunction {
    GainFunction::from_fn(subchannel.input().clone(), subchannel.output().clone(), |x, w| {
        subchannel.prob(x, w)
    })
    .expect("channel rows are valid gains")
}

/// Gain of an adversary guessing an integer-valued `U` to within `radius`:
/// `g(x, w) = P_{U|X=x}({a : |a - w| < radius})`.
pub fn make_approx_gain(subchannel: &DiscreteChannel, radius: f64) -> Result<GainFunction> {
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::Parameter(format!("radius must be positive, got {radius}")));
    }
    let labels = subchannel
        .output()
        .symbols()
        .iter()
        .map(|s| {
            s.as_int()
                .ok_or_else(|| Error::Definition(format!("approximate guessing needs integer labels, got `{s}`")))
        })
        .collect::<Result<Vec<i64>>>()?;
    GainFunction::from_fn(subchannel.input().clone(), subchannel.output().clone(), |x, w| {
        labels
            .iter()
            .enumerate()
            .filter(|(_, &a)| ((a - labels[w]).abs() as f64) < radius)
            .map(|(i, _)| subchannel.prob(x, i))
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leakage::pml;

    fn model() -> JointModel {
        let a = Alphabet::indices(3).unwrap();
        let prior = DiscreteDistribution::new(a.clone(), vec![0.2, 0.3, 0.5]).unwrap();
        let ch = DiscreteChannel::new(
            a,
            Alphabet::indices(2).unwrap(),
            vec![vec![0.9, 0.1], vec![0.4, 0.6], vec![0.2, 0.8]],
        )
        .unwrap();
        JointModel::new(prior, ch).unwrap()
    }

    #[test]
    fn constant_gain_has_unit_ratio() {
        let m = model();
        let g = GainFunction::from_fn(m.inputs().clone(), Alphabet::indices(2).unwrap(), |_, _| 1.0).unwrap();
        assert!((gain_ratio(&m, &Symbol::Int(0), &g).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singleton_gain_reaches_pml() {
        let m = model();
        let prior = m.prior().clone();
        let g = GainFunction::from_fn(m.inputs().clone(), m.inputs().clone(), |x, w| {
            if x == w {
                1.0 / prior.prob(x)
            } else {
                0.0
            }
        })
        .unwrap();
        for y in 0..2 {
            let y = Symbol::Int(y);
            let r = gain_ratio(&m, &y, &g).unwrap();
            assert!((r.ln() - pml(&m, &y).unwrap().nats()).abs() < 1e-12);
        }
    }

    #[test]
    fn hypothesis_test_gain() {
        let m = model();
        // A* = {0, 2}
        let member = [1.0, 0.0, 1.0];
        let g = GainFunction::from_fn(m.inputs().clone(), Alphabet::indices(1).unwrap(), |x, _| member[x]).unwrap();
        let post = m.posterior_at(0);
        let expect = (post.prob(0) + post.prob(2)) / (0.2 + 0.5);
        assert!((gain_ratio(&m, &Symbol::Int(0), &g).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn zero_denominator_cases() {
        let m = model();
        let zero = GainFunction::from_fn(m.inputs().clone(), Alphabet::indices(1).unwrap(), |_, _| 0.0).unwrap();
        assert_eq!(gain_ratio(&m, &Symbol::Int(0), &zero).unwrap(), 1.0);
    }

    #[test]
    fn gain_errors() {
        let m = model();
        let other = GainFunction::from_fn(Alphabet::indices(2).unwrap(), Alphabet::indices(1).unwrap(), |_, _| 1.0)
            .unwrap();
        assert!(matches!(
            gain_ratio(&m, &Symbol::Int(0), &other),
            Err(Error::AlphabetMismatch(_))
        ));
        assert!(GainFunction::new(m.inputs().clone(), Alphabet::indices(1).unwrap(), vec![vec![-1.0]; 3]).is_err());
        let labeled = DiscreteChannel::identity(Alphabet::new(["a", "b"]).unwrap());
        assert!(matches!(make_approx_gain(&labeled, 1.0), Err(Error::Definition(_))));
        assert!(matches!(
            make_approx_gain(&DiscreteChannel::identity(Alphabet::indices(2).unwrap()), 0.0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn guessing_gain_identity_prior_sup() {
        let a = Alphabet::indices(4).unwrap();
        let g = make_guessing_gain(&DiscreteChannel::identity(a.clone()));
        let prior = DiscreteDistribution::uniform(a);
        assert!((g.prior_gain_sup(&prior) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn approx_gain_small_radius_is_guessing_gain() {
        let m = model();
        let g1 = make_approx_gain(m.channel(), 0.5).unwrap();
        assert_eq!(g1, make_guessing_gain(m.channel()));
        let wide = make_approx_gain(m.channel(), 10.0).unwrap();
        for x in 0..3 {
            for w in 0..2 {
                assert!((wide.gain(x, w) - 1.0).abs() < 1e-15);
            }
        }
    }
}
