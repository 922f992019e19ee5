//! Discrete distributions, channels and joint models.
//!
//! Everything here is immutable after construction. Probability vectors are
//! validated to sum to one (plus any recorded truncation deficit) within
//! [`SUM_TOLERANCE`]; malformed inputs are rejected rather than renormalized.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on `sum(probs) + truncation_deficit - 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Largest truncation deficit a user-facing constructor accepts.
pub const MAX_TRUNCATION_DEFICIT: f64 = 1e-9;

/// A label of an alphabet entry.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Symbol {
    Int(i64),
    Str(String),
}

impl Symbol {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Symbol::Int(v) => Some(*v),
            Symbol::Str(_) => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Int(v) => write!(f, "{v}"),
            Symbol::Str(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Symbol {
    fn from(v: i64) -> Self {
        Symbol::Int(v)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol::Str(s.to_owned())
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol::Str(s)
    }
}

/// An ordered list of distinct labels.
///
/// Order matters: ties anywhere downstream break toward the lowest index.
#[derive(Debug, Clone)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Alphabet {
    pub fn new<S: Into<Symbol>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<Symbol> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::DuplicateSymbol(s.to_string()));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// Integer labels `lo..=hi`.
    pub fn range(lo: i64, hi: i64) -> Result<Self> {
        Alphabet::new(lo..=hi)
    }

    /// Integer labels `0..n`.
    pub fn indices(n: usize) -> Result<Self> {
        Alphabet::new(0..n as i64)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, i: usize) -> &Symbol {
        &self.symbols[i]
    }

    pub fn index_of(&self, s: &Symbol) -> Result<usize> {
        self.index
            .get(s)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(s.to_string()))
    }

    /// Looks a symbol up by its printed form, e.g. a command-line argument.
    pub fn find_label(&self, label: &str) -> Result<usize> {
        self.symbols
            .iter()
            .position(|s| s.to_string() == label)
            .ok_or_else(|| Error::UnknownSymbol(label.to_owned()))
    }
}

/// A probability vector over an alphabet, with an explicit record of the
/// mass dropped when a countably infinite law was truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    alphabet: Alphabet,
    probs: Vec<f64>,
    truncation_deficit: f64,
}

impl DiscreteDistribution {
    pub fn new(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        Self::with_deficit(alphabet, probs, 0.0)
    }

    pub fn with_deficit(alphabet: Alphabet, probs: Vec<f64>, truncation_deficit: f64) -> Result<Self> {
        if !(0.0..=MAX_TRUNCATION_DEFICIT).contains(&truncation_deficit) {
            return Err(Error::TruncationTooCoarse(truncation_deficit));
        }
        Self::checked(alphabet, probs, truncation_deficit)
    }

    /// Validates entries and normalization but not the deficit cap. Used for
    /// derived laws whose deficit accumulates from several truncated inputs.
    pub(crate) fn checked(alphabet: Alphabet, probs: Vec<f64>, truncation_deficit: f64) -> Result<Self> {
        if probs.len() != alphabet.len() {
            return Err(Error::DimensionMismatch {
                context: "probability vector",
                expected: alphabet.len(),
                found: probs.len(),
            });
        }
        if let Some((index, &value)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidProbability { index, value });
        }
        let sum: f64 = probs.iter().sum();
        if (sum + truncation_deficit - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotNormalized {
                sum,
                deficit: truncation_deficit,
            });
        }
        Ok(DiscreteDistribution {
            alphabet,
            probs,
            truncation_deficit,
        })
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let n = alphabet.len();
        let probs = vec![1.0 / n as f64; n];
        // 1/n summed n times stays within a few ulps of 1.
        DiscreteDistribution {
            alphabet,
            probs,
            truncation_deficit: 0.0,
        }
    }

    pub fn point_mass(alphabet: Alphabet, at: usize) -> Self {
        let mut probs = vec![0.0; alphabet.len()];
        probs[at] = 1.0;
        DiscreteDistribution {
            alphabet,
            probs,
            truncation_deficit: 0.0,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn truncation_deficit(&self) -> f64 {
        self.truncation_deficit
    }

    /// True when every atom has positive mass.
    pub fn has_full_support(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }
}

/// A row-stochastic kernel from an input alphabet to an output alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteChannel {
    input: Alphabet,
    output: Alphabet,
    rows: Vec<DiscreteDistribution>,
}

impl DiscreteChannel {
    /// Builds a channel from untruncated rows; `rows[i][j]` is the probability
    /// of output `j` given input `i`.
    pub fn new(input: Alphabet, output: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| DiscreteDistribution::new(output.clone(), r))
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(input, output, rows)
    }

    pub fn from_rows(input: Alphabet, output: Alphabet, rows: Vec<DiscreteDistribution>) -> Result<Self> {
        if rows.len() != input.len() {
            return Err(Error::DimensionMismatch {
                context: "channel rows",
                expected: input.len(),
                found: rows.len(),
            });
        }
        if rows.iter().any(|r| r.alphabet() != &output) {
            return Err(Error::AlphabetMismatch("channel row"));
        }
        Ok(DiscreteChannel { input, output, rows })
    }

    /// The noiseless channel on `alphabet`.
    pub fn identity(alphabet: Alphabet) -> Self {
        let rows = (0..alphabet.len())
            .map(|i| DiscreteDistribution::point_mass(alphabet.clone(), i))
            .collect();
        DiscreteChannel {
            input: alphabet.clone(),
            output: alphabet,
            rows,
        }
    }

    /// Every input maps to the same output law.
    pub fn constant(input: Alphabet, row: DiscreteDistribution) -> Self {
        let output = row.alphabet().clone();
        let rows = vec![row; input.len()];
        DiscreteChannel { input, output, rows }
    }

    pub fn input(&self) -> &Alphabet {
        &self.input
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn rows(&self) -> &[DiscreteDistribution] {
        &self.rows
    }

    pub fn row(&self, x: usize) -> &DiscreteDistribution {
        &self.rows[x]
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x].prob(y)
    }

    /// Post-processes the output with `next`: the kernel of Z given X for a
    /// Markov chain X - Y - Z.
    pub fn compose(&self, next: &DiscreteChannel) -> Result<DiscreteChannel> {
        if next.input() != &self.output {
            return Err(Error::AlphabetMismatch("channel composition"));
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut probs = vec![0.0; next.output.len()];
                let mut deficit = row.truncation_deficit();
                for (y, &py) in row.probs().iter().enumerate() {
                    if py == 0.0 {
                        continue;
                    }
                    let k = next.row(y);
                    for (acc, &pz) in probs.iter_mut().zip(k.probs()) {
                        *acc += py * pz;
                    }
                    deficit += py * k.truncation_deficit();
                }
                DiscreteDistribution::checked(next.output.clone(), probs, deficit)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DiscreteChannel {
            input: self.input.clone(),
            output: next.output.clone(),
            rows,
        })
    }
}

/// Output law `P_Y(y) = sum_x P_X(x) P_{Y|X=x}(y)`.
///
/// The returned deficit is the prior's deficit plus the prior-weighted row
/// deficits, so `sum(P_Y) + deficit` is still one.
pub fn marginal(prior: &DiscreteDistribution, channel: &DiscreteChannel) -> Result<DiscreteDistribution> {
    if prior.alphabet() != channel.input() {
        return Err(Error::DimensionMismatch {
            context: "prior vs channel input",
            expected: channel.input().len(),
            found: prior.len(),
        });
    }
    let mut probs = vec![0.0; channel.output().len()];
    let mut deficit = prior.truncation_deficit();
    for (x, &px) in prior.probs().iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        let row = channel.row(x);
        for (acc, &p) in probs.iter_mut().zip(row.probs()) {
            *acc += px * p;
        }
        deficit += px * row.truncation_deficit();
    }
    DiscreteDistribution::checked(channel.output().clone(), probs, deficit)
}

/// A prior together with a channel; the joint law `P_X ⊗ P_{Y|X}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointModel {
    prior: DiscreteDistribution,
    channel: DiscreteChannel,
    marginal: DiscreteDistribution,
}

impl JointModel {
    pub fn new(prior: DiscreteDistribution, channel: DiscreteChannel) -> Result<Self> {
        let marginal = marginal(&prior, &channel)?;
        Ok(JointModel {
            prior,
            channel,
            marginal,
        })
    }

    pub fn prior(&self) -> &DiscreteDistribution {
        &self.prior
    }

    pub fn channel(&self) -> &DiscreteChannel {
        &self.channel
    }

    pub fn marginal(&self) -> &DiscreteDistribution {
        &self.marginal
    }

    pub fn inputs(&self) -> &Alphabet {
        self.channel.input()
    }

    pub fn outcomes(&self) -> &Alphabet {
        self.channel.output()
    }

    /// Posterior `P_{X|Y=y}` for the outcome at index `y`.
    ///
    /// When `P_Y(y) = 0` no conditioning takes place and the prior is returned.
    pub fn posterior_at(&self, y: usize) -> DiscreteDistribution {
        let py = self.marginal.prob(y);
        if py == 0.0 {
            return self.prior.clone();
        }
        let probs = self
            .prior
            .probs()
            .iter()
            .enumerate()
            .map(|(x, &px)| px * self.channel.prob(x, y) / py)
            .collect();
        DiscreteDistribution {
            alphabet: self.prior.alphabet().clone(),
            probs,
            truncation_deficit: 0.0,
        }
    }

    pub fn posterior(&self, y: &Symbol) -> Result<DiscreteDistribution> {
        let j = self.outcomes().index_of(y)?;
        Ok(self.posterior_at(j))
    }

    /// Post-processes the output through `next` (X - Y - Z).
    pub fn then(&self, next: &DiscreteChannel) -> Result<JointModel> {
        JointModel::new(self.prior.clone(), self.channel.compose(next)?)
    }
}

/// A countably infinite law that can be truncated to a finite prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum CountableLaw {
    /// `P(x) = p (1-p)^(x-1)` on `x = 1, 2, ...`
    Geometric { p: f64 },
    /// `P(x) = e^-λ λ^x / x!` on `x = 0, 1, ...`
    Poisson { lambda: f64 },
}

impl FromStr for CountableLaw {
    type Err = Error;

    /// Parses descriptors such as `geometric(0.3)` or `poisson(2)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::UnsupportedLaw(s.to_owned()))?;
        let arg = rest
            .strip_suffix(')')
            .and_then(|a| a.trim().parse::<f64>().ok())
            .ok_or_else(|| Error::UnsupportedLaw(s.to_owned()))?;
        match name.trim() {
            "geometric" => Ok(CountableLaw::Geometric { p: arg }),
            "poisson" => Ok(CountableLaw::Poisson { lambda: arg }),
            _ => Err(Error::UnsupportedLaw(s.to_owned())),
        }
    }
}

/// Restricts `law` to the shortest initial segment whose dropped tail mass is
/// at most `tail_bound`, recording that mass as the truncation deficit.
pub fn truncate_countable(law: CountableLaw, tail_bound: f64) -> Result<DiscreteDistribution> {
    if !(tail_bound > 0.0 && tail_bound <= MAX_TRUNCATION_DEFICIT) {
        return Err(Error::TruncationTooCoarse(tail_bound));
    }
    match law {
        CountableLaw::Geometric { p } => truncate_geometric(p, tail_bound),
        CountableLaw::Poisson { lambda } => truncate_poisson(lambda, tail_bound),
    }
}

fn truncate_geometric(p: f64, tail_bound: f64) -> Result<DiscreteDistribution> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::UnsupportedLaw(format!("geometric({p})")));
    }
    let q = 1.0 - p;
    // Tail beyond n is q^n.
    let tail = |n: usize| q.powi(n as i32);
    let mut n = if q == 0.0 {
        1
    } else {
        (tail_bound.ln() / q.ln()).ceil().max(1.0) as usize
    };
    while tail(n) > tail_bound {
        n += 1;
    }
    while n > 1 && tail(n - 1) <= tail_bound {
        n -= 1;
    }
    let probs = (0..n).map(|k| p * q.powi(k as i32)).collect();
    DiscreteDistribution::with_deficit(Alphabet::range(1, n as i64)?, probs, tail(n))
}

fn truncate_poisson(lambda: f64, tail_bound: f64) -> Result<DiscreteDistribution> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::UnsupportedLaw(format!("poisson({lambda})")));
    }
    let (probs, deficit) = poisson_prefix(lambda, tail_bound, 0);
    let last = probs.len() as i64 - 1;
    DiscreteDistribution::with_deficit(Alphabet::range(0, last)?, probs, deficit)
}

/// Shortest Poisson pmf prefix `0..=n` with `n >= min_last` and upper tail at
/// most `tail_bound`; returns the prefix and its exact tail mass.
pub(crate) fn poisson_prefix(lambda: f64, tail_bound: f64, min_last: usize) -> (Vec<f64>, f64) {
    let mut pmf = poisson_pmf_table(lambda, tail_bound * 1e-12);
    if pmf.len() <= min_last {
        let more = poisson_pmf_range(lambda, pmf.len(), min_last + 1);
        pmf.extend(more);
    }
    // suffix[k] = sum_{j >= k} pmf[j], accumulated from the small end.
    let mut suffix = vec![0.0; pmf.len() + 1];
    for k in (0..pmf.len()).rev() {
        suffix[k] = suffix[k + 1] + pmf[k];
    }
    let last = (min_last..pmf.len())
        .find(|&n| suffix[n + 1] <= tail_bound)
        .unwrap_or(pmf.len() - 1);
    let deficit = suffix[last + 1];
    pmf.truncate(last + 1);
    (pmf, deficit)
}

/// Poisson pmf at `from..to`.
pub(crate) fn poisson_pmf_range(lambda: f64, from: usize, to: usize) -> Vec<f64> {
    let ln_lambda = lambda.ln();
    let mut ln_fact: f64 = (2..=from).map(|k| (k as f64).ln()).sum();
    (from..to)
        .map(|k| {
            if k > from {
                ln_fact += (k as f64).ln();
            }
            (-lambda + k as f64 * ln_lambda - ln_fact).exp()
        })
        .collect()
}

/// Poisson pmf from 0 until past the mode and below `negligible`.
pub(crate) fn poisson_pmf_table(lambda: f64, negligible: f64) -> Vec<f64> {
    let ln_lambda = lambda.ln();
    let mut out = Vec::new();
    let mut ln_fact = 0.0;
    let mut k = 0usize;
    loop {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        let v = (-lambda + k as f64 * ln_lambda - ln_fact).exp();
        out.push(v);
        if k as f64 > lambda && (v < negligible || v == 0.0) {
            break;
        }
        k += 1;
    }
    out
}
