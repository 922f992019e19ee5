use crate::dist::{JointModel, Symbol};
use crate::error::{Error, Result};

use super::gain::GainFunction;

pub const STRATEGY_MAX_ESTIMATES: usize = 4;
pub const STRATEGY_MAX_RESOLUTION: usize = 50;

/// Slack allowed between a mixed strategy and the best pure estimate.
pub const STRATEGY_TOLERANCE: f64 = 1e-12;

/// Largest amount by which a randomized estimator on the simplex grid of
/// the given resolution beats the best pure estimate, for outcome `y`.
///
/// Non-positive whenever mixing never helps.
pub fn randomized_strategy_excess(model: &JointModel, y: &Symbol, g: &GainFunction, resolution: usize) -> Result<f64> {
    let d = g.estimates().len();
    if d > STRATEGY_MAX_ESTIMATES {
        return Err(Error::Capacity {
            what: "strategy check estimate alphabet",
            requested: d,
            limit: STRATEGY_MAX_ESTIMATES,
        });
    }
    if resolution > STRATEGY_MAX_RESOLUTION {
        return Err(Error::Capacity {
            what: "simplex resolution",
            requested: resolution,
            limit: STRATEGY_MAX_RESOLUTION,
        });
    }
    if resolution == 0 {
        return Err(Error::Parameter("resolution must be positive".into()));
    }
    if g.inputs() != model.inputs() {
        return Err(Error::AlphabetMismatch("gain function inputs"));
    }
    let post = model.posterior(y)?;
    let pure = g.expected_all(&post);
    let best = pure.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut worst = f64::NEG_INFINITY;
    let mut counts = vec![0usize; d];
    compositions(&mut counts, 0, resolution, &mut |c| {
        let mixed: f64 = c
            .iter()
            .zip(&pure)
            .map(|(&k, &v)| k as f64 / resolution as f64 * v)
            .sum();
        worst = worst.max(mixed - best);
    });
    Ok(worst)
}

/// True iff no grid point of the simplex over the estimates yields a higher
/// expected posterior gain than the best pure estimate.
pub fn randomized_strategy_check(model: &JointModel, y: &Symbol, g: &GainFunction, resolution: usize) -> Result<bool> {
    Ok(randomized_strategy_excess(model, y, g, resolution)? <= STRATEGY_TOLERANCE)
}

// Every way of writing `left` as an ordered sum of counts[i..].
fn compositions(counts: &mut [usize], i: usize, left: usize, visit: &mut impl FnMut(&[usize])) {
    if i + 1 == counts.len() {
        counts[i] = left;
        visit(counts);
        return;
    }
    for k in 0..=left {
        counts[i] = k;
        compositions(counts, i + 1, left - k, visit);
    }
}
