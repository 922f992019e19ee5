//! Rényi divergence of order infinity and pointwise maximal leakage on
//! discrete models, plus statistics of the leakage random variable.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::dist::{Alphabet, DiscreteDistribution, JointModel, Symbol};
use crate::error::{Error, Result};

/// Presentation units. Values are always held in nats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn from_nats(self, v: f64) -> f64 {
        match self {
            Units::Nats => v,
            Units::Bits => v / std::f64::consts::LN_2,
        }
    }

    pub fn to_nats(self, v: f64) -> f64 {
        match self {
            Units::Nats => v,
            Units::Bits => v * std::f64::consts::LN_2,
        }
    }
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        })
    }
}

impl FromStr for Units {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" => Ok(Units::Nats),
            "bits" => Ok(Units::Bits),
            other => Err(Error::Parse(format!("unknown units `{other}`"))),
        }
    }
}

/// A non-negative leakage in nats; `+∞` is a first-class value.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Leakage(f64);

impl Leakage {
    pub const ZERO: Leakage = Leakage(0.0);
    pub const INFINITE: Leakage = Leakage(f64::INFINITY);

    /// Wraps a log-ratio. Small negative values (truncation deficits, rounding)
    /// clamp to zero.
    pub fn from_nats(v: f64) -> Leakage {
        assert!(!v.is_nan(), "leakage must not be NaN");
        Leakage(v.max(0.0))
    }

    /// `log(ratio)` with `log(+∞) = +∞`.
    pub fn from_ratio(ratio: f64) -> Leakage {
        Leakage::from_nats(ratio.ln())
    }

    pub fn nats(self) -> f64 {
        self.0
    }

    pub fn bits(self) -> f64 {
        Units::Bits.from_nats(self.0)
    }

    pub fn in_units(self, units: Units) -> f64 {
        units.from_nats(self.0)
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// JSON form: a number, or the string `"inf"`.
    pub fn to_json(self, units: Units) -> serde_json::Value {
        if self.is_infinite() {
            serde_json::Value::String("inf".into())
        } else {
            serde_json::json!(self.in_units(units))
        }
    }
}

impl fmt::Display for Leakage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn same_alphabet(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<()> {
    if p.alphabet() != q.alphabet() {
        return Err(Error::DimensionMismatch {
            context: "divergence arguments",
            expected: q.len(),
            found: p.len(),
        });
    }
    Ok(())
}

/// `D∞(P ‖ Q) = log max_ω P(ω)/Q(ω)`, computed in the log domain.
///
/// Atoms with `P = Q = 0` count as ratio one. The result is `+∞` iff some atom
/// has `P > 0 = Q`.
pub fn renyi_inf(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<Leakage> {
    same_alphabet(p, q)?;
    let mut best = f64::NEG_INFINITY;
    for (&pw, &qw) in p.probs().iter().zip(q.probs()) {
        let log_ratio = match (pw > 0.0, qw > 0.0) {
            (true, true) => pw.ln() - qw.ln(),
            (true, false) => return Ok(Leakage::INFINITE),
            (false, false) => 0.0,
            (false, true) => continue,
        };
        if log_ratio > best {
            best = log_ratio;
        }
    }
    Ok(Leakage::from_nats(best))
}

/// Pointwise maximal leakage `ℓ(X → y) = D∞(P_{X|Y=y} ‖ P_X)`.
///
/// Zero-probability outcomes leak nothing: their posterior is the prior.
pub fn pml(model: &JointModel, y: &Symbol) -> Result<Leakage> {
    let j = model.outcomes().index_of(y)?;
    Ok(pml_at(model, j))
}

/// [`pml`] by outcome index.
pub fn pml_at(model: &JointModel, y: usize) -> Leakage {
    renyi_inf(&model.posterior_at(y), model.prior()).expect("posterior shares the prior's alphabet")
}

/// Result of an absolute-continuity check of a posterior against a prior.
#[derive(Debug, Clone, PartialEq)]
pub struct Continuity {
    pub holds: bool,
    /// Lowest-index atom with positive posterior and zero prior mass.
    pub witness: Option<Symbol>,
}

/// Checks `posterior ≪ prior` on an arbitrary pair of laws.
pub fn absolute_continuity(posterior: &DiscreteDistribution, prior: &DiscreteDistribution) -> Result<Continuity> {
    same_alphabet(posterior, prior)?;
    let witness = posterior
        .probs()
        .iter()
        .zip(prior.probs())
        .position(|(&p, &q)| p > 0.0 && q == 0.0)
        .map(|i| prior.alphabet().symbol(i).clone());
    Ok(Continuity {
        holds: witness.is_none(),
        witness,
    })
}

/// Checks `P_{X|Y=y} ≪ P_X` for an outcome of a joint model.
pub fn check_absolute_continuity(model: &JointModel, y: &Symbol) -> Result<Continuity> {
    let post = model.posterior(y)?;
    absolute_continuity(&post, model.prior())
}

/// The map `y ↦ ℓ(X → y)` together with the outcome law `P_Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeakageProfile {
    leakages: Vec<Leakage>,
    weights: DiscreteDistribution,
    units: Units,
}

impl LeakageProfile {
    /// Assembles a profile from per-outcome leakages (in nats) and their weights.
    pub fn from_parts(leakages: Vec<Leakage>, weights: DiscreteDistribution) -> Result<Self> {
        if leakages.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                context: "leakage profile",
                expected: weights.len(),
                found: leakages.len(),
            });
        }
        if let Some(j) = (0..leakages.len()).find(|&j| weights.prob(j) == 0.0 && leakages[j] != Leakage::ZERO) {
            return Err(Error::Definition(format!(
                "outcome `{}` has zero weight but non-zero leakage",
                weights.alphabet().symbol(j)
            )));
        }
        Ok(LeakageProfile {
            leakages,
            weights,
            units: Units::Nats,
        })
    }

    /// Same profile, presented in other units.
    pub fn with_units(mut self, units: Units) -> Self {
        self.units = units;
        self
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn outcomes(&self) -> &Alphabet {
        self.weights.alphabet()
    }

    pub fn leakages(&self) -> &[Leakage] {
        &self.leakages
    }

    pub fn weights(&self) -> &DiscreteDistribution {
        &self.weights
    }

    /// `log E_{P_Y}[exp ℓ(X → Y)]`; see [`maximal_leakage`].
    pub fn maximal_leakage(&self) -> Leakage {
        maximal_leakage(self)
    }

    pub fn mean_leakage(&self) -> Leakage {
        mean_leakage(self)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ProfileExport::from(self)).expect("profile export is plain data")
    }
}

/// Serialized layout of a [`LeakageProfile`].
#[derive(Debug, Clone, Serialize)]
pub struct ProfileExport {
    pub units: Units,
    pub outcomes: Vec<Symbol>,
    #[serde(serialize_with = "serialize_leakages")]
    pub leakage: Vec<f64>,
    pub p_y: Vec<f64>,
    #[serde(serialize_with = "serialize_leakage")]
    pub maximal_leakage: f64,
    #[serde(serialize_with = "serialize_leakage")]
    pub mean_leakage: f64,
}

impl From<&LeakageProfile> for ProfileExport {
    fn from(p: &LeakageProfile) -> Self {
        let u = p.units;
        ProfileExport {
            units: u,
            outcomes: p.outcomes().symbols().to_vec(),
            leakage: p.leakages.iter().map(|l| l.in_units(u)).collect(),
            p_y: p.weights.probs().to_vec(),
            maximal_leakage: p.maximal_leakage().in_units(u),
            mean_leakage: p.mean_leakage().in_units(u),
        }
    }
}

/// Writes a leakage number, or `"inf"` for `+∞`.
pub fn serialize_leakage<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn serialize_leakages<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        if x.is_infinite() {
            seq.serialize_element("inf")?;
        } else {
            seq.serialize_element(x)?;
        }
    }
    seq.end()
}

/// Leakage of every outcome, weighted by `P_Y`.
pub fn leakage_profile(model: &JointModel) -> LeakageProfile {
    let leakages = (0..model.outcomes().len()).map(|j| pml_at(model, j)).collect();
    LeakageProfile::from_parts(leakages, model.marginal().clone())
        .expect("zero-weight outcomes have zero leakage by construction")
}

/// `log Σ_y P_Y(y) exp ℓ(X → y)`.
///
/// On a full-support finite model this is `log Σ_y max_x P_{Y|X=x}(y)`, the
/// maximal leakage of the channel. Infinite leakage on a positive-weight
/// outcome gives `+∞`.
pub fn maximal_leakage(profile: &LeakageProfile) -> Leakage {
    let terms: Vec<f64> = profile
        .leakages
        .iter()
        .zip(profile.weights.probs())
        .filter(|(_, &w)| w > 0.0)
        .map(|(l, &w)| w.ln() + l.nats())
        .collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top.is_infinite() {
        return if top > 0.0 { Leakage::INFINITE } else { Leakage::ZERO };
    }
    let sum: f64 = terms.iter().map(|t| (t - top).exp()).sum();
    Leakage::from_nats(top + sum.ln())
}

/// `Σ_y P_Y(y) ℓ(X → y)` with `0 · ∞ = 0`.
pub fn mean_leakage(profile: &LeakageProfile) -> Leakage {
    let mut acc = 0.0;
    for (l, &w) in profile.leakages.iter().zip(profile.weights.probs()) {
        if w > 0.0 {
            acc += w * l.nats();
        }
    }
    Leakage::from_nats(acc)
}

/// `P_Y({y : ℓ(X → y) > eps})`, with `eps` in the profile's units.
pub fn tail_probability(profile: &LeakageProfile, eps: f64) -> f64 {
    let eps = profile.units.to_nats(eps);
    profile
        .leakages
        .iter()
        .zip(profile.weights.probs())
        .filter(|(l, _)| l.nats() > eps)
        .map(|(_, &w)| w)
        .sum()
}

/// One step of the empirical leakage CDF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CdfPoint {
    #[serde(serialize_with = "serialize_leakage")]
    pub leakage: f64,
    /// `P_Y(ℓ ≤ leakage)`.
    pub cumulative: f64,
}

/// Distinct leakage values in increasing order with `P_Y(ℓ ≤ v)`, in the
/// profile's units.
pub fn leakage_cdf(profile: &LeakageProfile) -> Vec<CdfPoint> {
    let mut pairs: Vec<(f64, f64)> = profile
        .leakages
        .iter()
        .zip(profile.weights.probs())
        .map(|(l, &w)| (l.nats(), w))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<CdfPoint> = Vec::new();
    let mut cum = 0.0;
    for (v, w) in pairs {
        cum += w;
        let shown = profile.units.from_nats(v);
        match out.last_mut() {
            Some(last) if last.leakage == shown => last.cumulative = cum,
            _ => out.push(CdfPoint {
                leakage: shown,
                cumulative: cum,
            }),
        }
    }
    out
}
