//! Channel and prior file formats.
//!
//! JSON model files look like
//!
//! ```json
//! {"alphabet_x": ["a", "b"], "alphabet_y": [0, 1],
//!  "prior": [0.5, 0.5],
//!  "channel": [[0.9, 0.1], [0.2, 0.8]]}
//! ```
//!
//! with `channel[i][j] = P(Y = alphabet_y[j] | X = alphabet_x[i])`. Optional
//! `prior_truncation_deficit` and `row_truncation_deficits` record mass dropped
//! by truncating countably infinite laws.
//!
//! The CSV alternative carries only the channel: a header row of output
//! symbols, then one row of probabilities per input symbol. If the header's
//! first cell is empty, every row starts with its input label. The prior is
//! supplied separately.

use serde::{Deserialize, Serialize};

use crate::dist::{Alphabet, DiscreteChannel, DiscreteDistribution, JointModel, Symbol};
use crate::error::{Error, Result};

/// On-disk layout of a JSON model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub alphabet_x: Vec<Symbol>,
    pub alphabet_y: Vec<Symbol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<f64>>,
    pub channel: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub prior_truncation_deficit: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row_truncation_deficits: Option<Vec<f64>>,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl ModelFile {
    pub fn from_model(model: &JointModel) -> Self {
        let rows = model.channel().rows();
        let deficits: Vec<f64> = rows.iter().map(|r| r.truncation_deficit()).collect();
        ModelFile {
            alphabet_x: model.inputs().symbols().to_vec(),
            alphabet_y: model.outcomes().symbols().to_vec(),
            prior: Some(model.prior().probs().to_vec()),
            channel: rows.iter().map(|r| r.probs().to_vec()).collect(),
            prior_truncation_deficit: model.prior().truncation_deficit(),
            row_truncation_deficits: deficits.iter().any(|&d| d > 0.0).then_some(deficits),
        }
    }

    pub fn channel(&self) -> Result<DiscreteChannel> {
        let input = Alphabet::new(self.alphabet_x.clone())?;
        let output = Alphabet::new(self.alphabet_y.clone())?;
        if self.channel.len() != input.len() {
            return Err(Error::DimensionMismatch {
                context: "channel rows",
                expected: input.len(),
                found: self.channel.len(),
            });
        }
        let deficits = match &self.row_truncation_deficits {
            Some(d) if d.len() != input.len() => {
                return Err(Error::DimensionMismatch {
                    context: "row_truncation_deficits",
                    expected: input.len(),
                    found: d.len(),
                })
            }
            Some(d) => d.clone(),
            None => vec![0.0; input.len()],
        };
        let rows = self
            .channel
            .iter()
            .zip(deficits)
            .enumerate()
            .map(|(i, (row, d))| {
                DiscreteDistribution::with_deficit(output.clone(), row.clone(), d)
                    .map_err(|e| Error::Parse(format!("channel row {} (`{}`): {e}", i, input.symbol(i))))
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteChannel::from_rows(input, output, rows)
    }

    /// The joint model; `prior` overrides the file's own prior.
    pub fn model(&self, prior: Option<DiscreteDistribution>) -> Result<JointModel> {
        let channel = self.channel()?;
        let prior = match (prior, &self.prior) {
            (Some(p), _) => p,
            (None, Some(p)) => {
                DiscreteDistribution::with_deficit(channel.input().clone(), p.clone(), self.prior_truncation_deficit)
                    .map_err(|e| Error::Parse(format!("prior: {e}")))?
            }
            (None, None) => return Err(Error::Parse("no prior given".into())),
        };
        JointModel::new(prior, channel)
    }
}

/// Parses a JSON model file. Syntax errors carry line and column.
pub fn parse_model_json(text: &str) -> Result<ModelFile> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_symbol(s: &str) -> Symbol {
    let s = s.trim();
    s.parse::<i64>().map(Symbol::Int).unwrap_or_else(|_| Symbol::Str(s.to_owned()))
}

fn parse_number(s: &str, line: u64, column: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}, column {column}: `{}` is not a number", s.trim())))
}

/// A channel read from CSV, with input labels when the file had them.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvChannel {
    pub input_labels: Option<Vec<Symbol>>,
    pub output_labels: Vec<Symbol>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvChannel {
    /// Builds the channel. Inputs are labeled from the file, else from
    /// `inputs`, else `0..n`.
    pub fn channel(&self, inputs: Option<&Alphabet>) -> Result<DiscreteChannel> {
        let input = match (&self.input_labels, inputs) {
            (Some(l), _) => Alphabet::new(l.clone())?,
            (None, Some(a)) => a.clone(),
            (None, None) => Alphabet::indices(self.rows.len())?,
        };
        let output = Alphabet::new(self.output_labels.clone())?;
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                DiscreteDistribution::new(output.clone(), row.clone())
                    .map_err(|e| Error::Parse(format!("channel row {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        DiscreteChannel::from_rows(input, output, rows)
    }
}

pub fn parse_channel_csv(text: &str) -> Result<CsvChannel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?
        .map_err(|e| Error::Parse(e.to_string()))?;
    let labeled = header.get(0).is_some_and(str::is_empty);
    let output_labels: Vec<Symbol> = header.iter().skip(labeled as usize).map(parse_symbol).collect();
    let width = output_labels.len() + labeled as usize;

    let mut input_labels = Vec::new();
    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != width {
            return Err(Error::Parse(format!(
                "line {line}: expected {width} fields, found {}",
                record.len()
            )));
        }
        let mut fields = record.iter().enumerate();
        if labeled {
            input_labels.push(parse_symbol(fields.next().expect("width checked").1));
        }
        rows.push(
            fields
                .map(|(c, f)| parse_number(f, line, c + 1))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(CsvChannel {
        input_labels: labeled.then_some(input_labels),
        output_labels,
        rows,
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PriorJson {
    Bare(Vec<f64>),
    Labeled {
        #[serde(default)]
        alphabet: Option<Vec<Symbol>>,
        prior: Vec<f64>,
        #[serde(default)]
        truncation_deficit: f64,
    },
}

/// A prior read from its own file: JSON (`[...]` or
/// `{"alphabet": [...], "prior": [...], "truncation_deficit": d}`) or a plain
/// list of numbers separated by commas or newlines.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorFile {
    pub alphabet: Option<Vec<Symbol>>,
    pub probs: Vec<f64>,
    pub truncation_deficit: f64,
}

impl PriorFile {
    /// Binds the prior to `inputs`, checking labels when the file had them.
    pub fn distribution(&self, inputs: &Alphabet) -> Result<DiscreteDistribution> {
        if let Some(labels) = &self.alphabet {
            if labels.as_slice() != inputs.symbols() {
                return Err(Error::AlphabetMismatch("prior file vs channel inputs"));
            }
        }
        DiscreteDistribution::with_deficit(inputs.clone(), self.probs.clone(), self.truncation_deficit)
            .map_err(|e| Error::Parse(format!("prior: {e}")))
    }
}

pub fn parse_prior(text: &str) -> Result<PriorFile> {
    let t = text.trim_start();
    if t.starts_with('[') || t.starts_with('{') {
        let parsed: PriorJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        return Ok(match parsed {
            PriorJson::Bare(probs) => PriorFile {
                alphabet: None,
                probs,
                truncation_deficit: 0.0,
            },
            PriorJson::Labeled {
                alphabet,
                prior,
                truncation_deficit,
            } => PriorFile {
                alphabet,
                probs: prior,
                truncation_deficit,
            },
        });
    }
    let mut probs = Vec::new();
    for (l, line) in text.lines().enumerate() {
        for (c, field) in line.split(',').enumerate() {
            if !field.trim().is_empty() {
                probs.push(parse_number(field, l as u64 + 1, c + 1)?);
            }
        }
    }
    Ok(PriorFile {
        alphabet: None,
        probs,
        truncation_deficit: 0.0,
    })
}
