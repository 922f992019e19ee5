use crate::dist::{truncate_countable, Alphabet, CountableLaw, DiscreteChannel, JointModel};
use crate::error::Result;

use super::closed_form::ClosedFormModel;

/// Truncated discrete model of `X ~ Geom(p)` on `1, 2, ...` released through
/// the binary channel `P(Y = 0 | X = x) = q^x`.
///
/// `ℓ(X → 1)` is a supremum approached as `x → ∞`; on a prefix `1..=n` it falls
/// short by about `q^n`, so `tail` should be chosen with that in mind.
pub fn discretize_geometric_binary(p: f64, q: f64, tail: f64) -> Result<JointModel> {
    ClosedFormModel::GeometricBinary { p, q }.validate()?;
    let prior = truncate_countable(CountableLaw::Geometric { p }, tail)?;
    let outputs = Alphabet::range(0, 1)?;
    let rows = prior
        .alphabet()
        .symbols()
        .iter()
        .map(|x| {
            let stay = q.powi(x.as_int().expect("geometric support is integer") as i32);
            vec![stay, 1.0 - stay]
        })
        .collect();
    let channel = DiscreteChannel::new(prior.alphabet().clone(), outputs, rows)?;
    JointModel::new(prior, channel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginal_matches_closed_form() {
        let m = discretize_geometric_binary(0.3, 0.5, 1e-12).unwrap();
        assert!((m.marginal().prob(0) - 0.15 / 0.65).abs() < 1e-12);
        assert!(m.prior().truncation_deficit() <= 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(discretize_geometric_binary(1.0, 0.5, 1e-12).is_err());
        assert!(discretize_geometric_binary(0.3, 0.5, 1e-3).is_err());
    }
}
