use crate::dist::{poisson_prefix, Alphabet, DiscreteChannel, DiscreteDistribution, JointModel, MAX_TRUNCATION_DEFICIT};
use crate::error::{Error, Result};

use super::closed_form::validate_poisson_binomial;

/// Truncated discrete model of `X ~ Pois(λp)` observed through
/// `Y = X + Pois(λ(1-p))`.
///
/// The prior keeps at least the atoms `0..=y_max`, so every outcome up to
/// `y_max` has its full posterior (`Binom(y, p)`) represented. Prior and
/// kernel rows each drop at most `tail` mass.
pub fn discretize_poisson_binomial(lambda: f64, p: f64, y_max: u64, tail: f64) -> Result<JointModel> {
    validate_poisson_binomial(lambda, p)?;
    if !(tail > 0.0 && tail <= MAX_TRUNCATION_DEFICIT) {
        return Err(Error::TruncationTooCoarse(tail));
    }
    let (prior_pmf, prior_deficit) = poisson_prefix(lambda * p, tail, y_max as usize);
    let x_last = prior_pmf.len() - 1;

    let noise_rate = lambda * (1.0 - p);
    let (noise_head, _) = poisson_prefix(noise_rate, tail, 0);
    let y_last = x_last + noise_head.len() - 1;
    // Long enough that row x can read the tail beyond y_last - x.
    let (noise, _) = poisson_prefix(noise_rate, tail * 1e-12, y_last + 1);
    let mut noise_suffix = vec![0.0; noise.len() + 1];
    for k in (0..noise.len()).rev() {
        noise_suffix[k] = noise_suffix[k + 1] + noise[k];
    }

    let inputs = Alphabet::range(0, x_last as i64)?;
    let outputs = Alphabet::range(0, y_last as i64)?;
    let rows = (0..=x_last)
        .map(|x| {
            let mut probs = vec![0.0; y_last + 1];
            probs[x..].copy_from_slice(&noise[..=y_last - x]);
            let deficit = noise_suffix[y_last - x + 1];
            DiscreteDistribution::with_deficit(outputs.clone(), probs, deficit)
        })
        .collect::<Result<Vec<_>>>()?;
    let prior = DiscreteDistribution::with_deficit(inputs.clone(), prior_pmf, prior_deficit)?;
    JointModel::new(prior, DiscreteChannel::from_rows(inputs, outputs, rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Symbol;

    #[test]
    fn y_zero_posterior_is_point_mass() {
        let m = discretize_poisson_binomial(2.0, 0.5, 10, 1e-12).unwrap();
        let post = m.posterior(&Symbol::Int(0)).unwrap();
        assert!((post.prob(0) - 1.0).abs() < 1e-15);
        assert!(post.probs()[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn covers_requested_outcomes() {
        let m = discretize_poisson_binomial(2.0, 0.5, 30, 1e-12).unwrap();
        assert!(m.inputs().len() >= 31);
        assert!(m.prior().truncation_deficit() <= 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(discretize_poisson_binomial(3.0, 0.5, 5, 1e-12).is_err());
        assert!(discretize_poisson_binomial(2.0, 0.5, 5, 1e-3).is_err());
    }
}
