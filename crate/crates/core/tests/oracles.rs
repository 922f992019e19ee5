mod common;

use common::{constant_model, uniform_identity};
use pmlkit::continuous::discretize_geometric_binary;
use pmlkit::oracle::{
    gain_ratio, make_approx_gain, make_guessing_gain, partition_oracle, randomized_function_oracle,
    randomized_strategy_check, randomized_strategy_excess, shattering_value, subset_oracle, GainFunction,
    PartitionGain, FUNCTION_ORACLE_MAX_INPUTS, SUBSET_ORACLE_MAX_INPUTS,
};
use pmlkit::{pml, Alphabet, DiscreteChannel, DiscreteDistribution, Error, JointModel, Leakage, Symbol};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn y0() -> Symbol {
    Symbol::Int(0)
}

fn model_4x3() -> JointModel {
    model_with(4, 11)
}

fn model_with(n: usize, seed: u64) -> JointModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prior = DiscreteDistribution::new(Alphabet::indices(n).unwrap(), common::simplex(&mut rng, n)).unwrap();
    JointModel::new(prior, common::random_channel(&mut rng, n, 3)).unwrap()
}

#[test]
fn constant_gain_has_ratio_one() {
    let m = model_4x3();
    let g = GainFunction::from_fn(m.inputs().clone(), Alphabet::indices(2).unwrap(), |_, _| 1.0).unwrap();
    assert!((gain_ratio(&m, &y0(), &g).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn singleton_gain_attains_pml() {
    let m = model_4x3();
    let prior = m.prior().clone();
    let g = GainFunction::from_fn(m.inputs().clone(), m.inputs().clone(), |x, w| {
        if x == w {
            1.0 / prior.prob(x)
        } else {
            0.0
        }
    })
    .unwrap();
    for y in m.outcomes().symbols() {
        let r = gain_ratio(&m, y, &g).unwrap();
        assert!((r.ln() - pml(&m, y).unwrap().nats()).abs() < 1e-12);
    }
}

#[test]
fn hypothesis_test_gain() {
    let m = model_4x3();
    let in_set = [true, false, true, false];
    let g = GainFunction::from_fn(m.inputs().clone(), Alphabet::indices(1).unwrap(), |x, _| {
        in_set[x] as u8 as f64
    })
    .unwrap();
    let post = m.posterior(&y0()).unwrap();
    let mass = |d: &DiscreteDistribution| d.prob(0) + d.prob(2);
    let expected = mass(&post) / mass(m.prior());
    assert!((gain_ratio(&m, &y0(), &g).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn gain_ratio_rejects_null_outcomes_and_mismatched_gains() {
    let a = Alphabet::indices(2).unwrap();
    let ch = DiscreteChannel::new(a.clone(), Alphabet::indices(3).unwrap(), vec![vec![0.5, 0.5, 0.0], vec![0.2, 0.8, 0.0]])
        .unwrap();
    let m = JointModel::new(DiscreteDistribution::uniform(a), ch).unwrap();
    let g = GainFunction::from_fn(m.inputs().clone(), Alphabet::indices(1).unwrap(), |_, _| 1.0).unwrap();
    assert!(matches!(gain_ratio(&m, &Symbol::Int(2), &g), Err(Error::ZeroProbabilityOutcome(_))));
    let wrong = GainFunction::from_fn(Alphabet::indices(3).unwrap(), Alphabet::indices(1).unwrap(), |_, _| 1.0).unwrap();
    assert!(gain_ratio(&m, &y0(), &wrong).is_err());
}

#[test]
fn invalid_gain_values_are_rejected() {
    let a = Alphabet::indices(2).unwrap();
    assert!(GainFunction::new(a.clone(), a.clone(), vec![vec![1.0, -0.5], vec![0.0, 1.0]]).is_err());
    assert!(GainFunction::new(a.clone(), a, vec![vec![1.0, f64::INFINITY], vec![0.0, 1.0]]).is_err());
}

#[test]
fn subset_oracle_examples() {
    let m = model_with(7, 5);
    for y in m.outcomes().symbols() {
        let a = subset_oracle(&m, y).unwrap();
        assert!((a.nats() - pml(&m, y).unwrap().nats()).abs() < 1e-12);
    }
    let c = constant_model(&[0.2, 0.3, 0.5], &[0.5, 0.5]);
    assert_eq!(subset_oracle(&c, &y0()).unwrap(), Leakage::ZERO);
}

#[test]
fn subset_oracle_capacity() {
    let m = uniform_identity(SUBSET_ORACLE_MAX_INPUTS + 1);
    let err = subset_oracle(&m, &y0()).unwrap_err();
    assert!(err.is_capacity());
    assert!(err.to_string().contains("20"), "{err}");
}

#[test]
fn partition_oracle_examples() {
    // A huge ε leaves at most the cells on either side of ratio one.
    let m = model_4x3();
    let big = 50.0;
    let part = PartitionGain::build(&m, &y0(), big).unwrap();
    assert!(part.cells().len() <= 2);
    let v = partition_oracle(&m, &y0(), big).unwrap().nats();
    assert!(v >= 0.0 && v >= pml(&m, &y0()).unwrap().nats() - big);

    let g = discretize_geometric_binary(0.3, 0.5, 1e-12).unwrap();
    let v = partition_oracle(&g, &y0(), 0.01).unwrap().nats();
    let target = (0.65f64 / 0.3).ln();
    assert!(v <= target + 1e-10 && v >= target - 0.01 - 1e-10, "{v}");

    let id = uniform_identity(4);
    let v = partition_oracle(&id, &y0(), 0.05).unwrap().nats();
    assert!(v >= 4f64.ln() - 0.05 - 1e-12 && v <= 4f64.ln() + 1e-12);
}

#[test]
fn partition_cells_follow_the_ratio_bands() {
    let m = model_with(8, 21);
    let eps = 0.05;
    let part = PartitionGain::build(&m, &y0(), eps).unwrap();
    let post = m.posterior(&y0()).unwrap();
    let mut seen = 0;
    for (cell, xs) in part.cells() {
        for &x in xs {
            let f = post.prob(x) / m.prior().prob(x);
            match cell {
                pmlkit::oracle::CellIndex::At(w) => {
                    let lo = (*w as f64 * eps).exp();
                    let hi = ((*w + 1) as f64 * eps).exp();
                    assert!(f >= lo * (1.0 - 1e-12) && f < hi * (1.0 + 1e-12));
                }
                pmlkit::oracle::CellIndex::NegInf => assert_eq!(f, 0.0),
            }
            seen += 1;
        }
    }
    assert_eq!(seen, 8);
}

#[test]
fn partition_oracle_rejects_non_absolutely_continuous_input() {
    // A prior-null atom cannot gain posterior mass through exact Bayes, so the
    // violation is reached only through a zero prior atom that stays null:
    // that case is absolutely continuous and must build fine.
    let a = Alphabet::indices(2).unwrap();
    let ch = DiscreteChannel::new(a.clone(), a.clone(), vec![vec![0.5, 0.5], vec![0.2, 0.8]]).unwrap();
    let prior = DiscreteDistribution::new(a, vec![0.0, 1.0]).unwrap();
    let m = JointModel::new(prior, ch).unwrap();
    assert!(partition_oracle(&m, &y0(), 0.1).is_ok());
    assert!(matches!(partition_oracle(&m, &y0(), 0.0), Err(Error::Parameter(_))));
}

#[test]
fn shattering_examples() {
    let m = model_with(5, 8);
    let identity: Vec<usize> = (0..5).collect();
    for y in m.outcomes().symbols() {
        let v = shattering_value(&m, y, &identity).unwrap().nats();
        assert!((v - pml(&m, y).unwrap().nats()).abs() < 1e-12);
        assert_eq!(shattering_value(&m, y, &[0; 5]).unwrap(), Leakage::ZERO);
    }
    assert!(matches!(shattering_value(&m, &y0(), &[0, 0, 2, 2, 2]), Err(Error::Definition(_))));
    assert!(shattering_value(&m, &y0(), &[0, 1]).is_err());
}

#[test]
fn tail_set_grouping_beats_retained_singletons() {
    let g = discretize_geometric_binary(0.3, 0.5, 1e-12).unwrap();
    let n = g.inputs().len();
    let k = 6;
    // Singletons x_1..x_{k-1}, everything else lumped into one tail set.
    let grouping: Vec<usize> = (0..n).map(|i| i.min(k - 1)).collect();
    let post = g.posterior(&y0()).unwrap();
    let singles = (0..k - 1)
        .map(|i| post.prob(i) / g.prior().prob(i))
        .fold(0.0, f64::max)
        .ln();
    let v = shattering_value(&g, &y0(), &grouping).unwrap().nats();
    assert!(v >= singles - 1e-12);
}

#[test]
fn function_oracle_examples() {
    let m = model_with(4, 13);
    for y in m.outcomes().symbols() {
        let v = randomized_function_oracle(&m, y, 4).unwrap().nats();
        assert!((v - pml(&m, y).unwrap().nats()).abs() < 1e-10);
        assert_eq!(randomized_function_oracle(&m, y, 1).unwrap(), Leakage::ZERO);
    }

    let g = discretize_geometric_binary(0.3, 0.5, 1e-9).unwrap();
    let six: Vec<f64> = {
        let mut p: Vec<f64> = g.prior().probs()[..6].to_vec();
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= s);
        p[5] = 1.0 - p[..5].iter().sum::<f64>();
        p
    };
    let a = Alphabet::range(1, 6).unwrap();
    let rows = (1..=6).map(|x| vec![0.5f64.powi(x), 1.0 - 0.5f64.powi(x)]).collect();
    let m6 = JointModel::new(
        DiscreteDistribution::new(a.clone(), six).unwrap(),
        DiscreteChannel::new(a, Alphabet::range(0, 1).unwrap(), rows).unwrap(),
    )
    .unwrap();
    let full = pml(&m6, &y0()).unwrap().nats();
    let mut prev = 0.0;
    for k in 1..=6 {
        let v = randomized_function_oracle(&m6, &y0(), k).unwrap().nats();
        assert!(v >= prev - 1e-15 && v <= full + 1e-12);
        prev = v;
    }
    assert!((prev - full).abs() < 1e-12);
}

#[test]
fn function_oracle_capacity() {
    let m = uniform_identity(FUNCTION_ORACLE_MAX_INPUTS + 1);
    assert!(randomized_function_oracle(&m, &y0(), 2).unwrap_err().is_capacity());
}

#[test]
fn strategy_examples() {
    let m = model_4x3();
    let g = GainFunction::from_fn(m.inputs().clone(), Alphabet::indices(3).unwrap(), |x, w| ((x + 2 * w) % 3) as f64)
        .unwrap();
    assert!(randomized_strategy_check(&m, &y0(), &g, 20).unwrap());
    assert!(randomized_strategy_check(&m, &y0(), &g, 1).unwrap());

    // Two identical actions: every mixture of them ties the pure optimum.
    let tied = GainFunction::from_fn(m.inputs().clone(), Alphabet::indices(2).unwrap(), |x, _| x as f64).unwrap();
    let excess = randomized_strategy_excess(&m, &y0(), &tied, 20).unwrap();
    assert!(excess.abs() <= 1e-12);

    let wide = GainFunction::from_fn(m.inputs().clone(), Alphabet::indices(5).unwrap(), |_, _| 1.0).unwrap();
    assert!(randomized_strategy_check(&m, &y0(), &wide, 5).unwrap_err().is_capacity());
    assert!(randomized_strategy_check(&m, &y0(), &g, 51).unwrap_err().is_capacity());
}

#[test]
fn guessing_gain_examples() {
    let m = uniform_identity(4);
    let g = make_guessing_gain(m.channel());
    assert!((g.prior_gain_sup(m.prior()) - 0.25).abs() < 1e-15);
    let post = m.posterior(&Symbol::Int(2)).unwrap();
    assert!((g.best(&post).1 - 1.0).abs() < 1e-15);

    let m = model_4x3();
    let constant = DiscreteChannel::constant(
        m.inputs().clone(),
        DiscreteDistribution::new(Alphabet::indices(2).unwrap(), vec![0.3, 0.7]).unwrap(),
    );
    let g = make_guessing_gain(&constant);
    assert!((gain_ratio(&m, &y0(), &g).unwrap() - 1.0).abs() < 1e-12);

    // U = 1{X ∈ A*} with A* = {0, 2}.
    let indicator = DiscreteChannel::new(
        m.inputs().clone(),
        Alphabet::indices(2).unwrap(),
        vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]],
    )
    .unwrap();
    let g = make_guessing_gain(&indicator);
    let post = m.posterior(&y0()).unwrap();
    let a_post = post.prob(0) + post.prob(2);
    let a_prior = m.prior().prob(0) + m.prior().prob(2);
    let expected = a_post.max(1.0 - a_post) / a_prior.max(1.0 - a_prior);
    assert!((gain_ratio(&m, &y0(), &g).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn approximate_gain_examples() {
    let m = model_4x3();
    let ch = DiscreteChannel::new(
        m.inputs().clone(),
        Alphabet::range(1, 3).unwrap(),
        vec![vec![0.2, 0.3, 0.5], vec![1.0, 0.0, 0.0], vec![0.1, 0.1, 0.8], vec![0.4, 0.4, 0.2]],
    )
    .unwrap();
    assert_eq!(make_approx_gain(&ch, 0.5).unwrap(), make_guessing_gain(&ch));
    let all = make_approx_gain(&ch, 10.0).unwrap();
    for x in 0..4 {
        for w in 0..3 {
            assert!((all.gain(x, w) - 1.0).abs() < 1e-15);
        }
    }
    assert!((gain_ratio(&m, &y0(), &all).unwrap() - 1.0).abs() < 1e-12);

    let id = uniform_identity(5);
    let five = Alphabet::range(1, 5).unwrap();
    let u = DiscreteChannel::identity(five.clone());
    let relabeled = JointModel::new(
        DiscreteDistribution::uniform(five.clone()),
        DiscreteChannel::new(five, id.outcomes().clone(), id.channel().rows().iter().map(|r| r.probs().to_vec()).collect())
            .unwrap(),
    )
    .unwrap();
    let g = make_approx_gain(&u, 1.5).unwrap();
    assert_eq!(g.gain(0, 1), 1.0);
    assert_eq!(g.gain(0, 2), 0.0);
    for y in relabeled.outcomes().symbols() {
        let r = gain_ratio(&relabeled, y, &g).unwrap();
        assert!(r.ln() <= pml(&relabeled, y).unwrap().nats() + 1e-12);
    }

    assert!(matches!(make_approx_gain(&u, 0.0), Err(Error::Parameter(_))));
    let labeled = DiscreteChannel::identity(Alphabet::new(["a", "b"]).unwrap());
    assert!(matches!(make_approx_gain(&labeled, 1.0), Err(Error::Definition(_))));
}
