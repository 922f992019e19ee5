#![allow(dead_code)]

use pmlkit::{Alphabet, DiscreteChannel, DiscreteDistribution, JointModel};
use rand::Rng;

pub fn simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    // Bounded away from zero so every atom has positive mass.
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    let mut v: Vec<f64> = w.iter().map(|x| x / s).collect();
    let head: f64 = v[..n - 1].iter().sum();
    v[n - 1] = 1.0 - head;
    v
}

pub fn random_channel<R: Rng>(rng: &mut R, inputs: usize, outputs: usize) -> DiscreteChannel {
    let rows = (0..inputs).map(|_| simplex(rng, outputs)).collect();
    DiscreteChannel::new(Alphabet::indices(inputs).unwrap(), Alphabet::indices(outputs).unwrap(), rows).unwrap()
}

/// Full-support prior and channel with `2..=max_in` inputs and `2..=max_out` outputs.
pub fn random_model<R: Rng>(rng: &mut R, max_in: usize, max_out: usize) -> JointModel {
    let n = rng.random_range(2..=max_in);
    let m = rng.random_range(2..=max_out);
    let prior = DiscreteDistribution::new(Alphabet::indices(n).unwrap(), simplex(rng, n)).unwrap();
    JointModel::new(prior, random_channel(rng, n, m)).unwrap()
}

pub fn identity_model(prior: &[f64]) -> JointModel {
    let a = Alphabet::indices(prior.len()).unwrap();
    JointModel::new(
        DiscreteDistribution::new(a.clone(), prior.to_vec()).unwrap(),
        DiscreteChannel::identity(a),
    )
    .unwrap()
}

pub fn uniform_identity(n: usize) -> JointModel {
    identity_model(&vec![1.0 / n as f64; n])
}

pub fn constant_model(prior: &[f64], row: &[f64]) -> JointModel {
    let a = Alphabet::indices(prior.len()).unwrap();
    let b = Alphabet::indices(row.len()).unwrap();
    JointModel::new(
        DiscreteDistribution::new(a.clone(), prior.to_vec()).unwrap(),
        DiscreteChannel::constant(a, DiscreteDistribution::new(b, row.to_vec()).unwrap()),
    )
    .unwrap()
}

/// `log Σ_y max_x P(y | x)`, computed straight from the channel table.
pub fn log_column_max_sum(model: &JointModel) -> f64 {
    let ch = model.channel();
    (0..ch.output().len())
        .map(|y| (0..ch.input().len()).map(|x| ch.prob(x, y)).fold(0.0, f64::max))
        .sum::<f64>()
        .ln()
}

/// `log max_x P(y | x) / P_Y(y)` from the channel table.
pub fn likelihood_ratio_leakage(model: &JointModel, y: usize) -> f64 {
    let ch = model.channel();
    let top = (0..ch.input().len()).map(|x| ch.prob(x, y)).fold(0.0, f64::max);
    (top / model.marginal().prob(y)).ln()
}
