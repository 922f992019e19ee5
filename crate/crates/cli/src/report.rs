use std::fs;
use std::io::{self, Write};
use std::path::Path;

use pmlkit::continuous::GridSpec;
use pmlkit::{JointModel, Units};
use serde::Serialize;

use crate::error::CliResult;

/// Reproducibility fields shared by every report.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub units: Units,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

impl Header {
    pub fn new(command: &'static str, units: Units, seed: u64) -> Self {
        Header {
            tool: "pmlkit",
            version: pmlkit::VERSION,
            command,
            units,
            seed,
            truncation: None,
            grid: None,
        }
    }

    pub fn with_model(mut self, model: &JointModel) -> Self {
        self.truncation = Some(Truncation::of(model));
        self
    }

    /// `key=value` pairs for the comment block of CSV output.
    fn comment_lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("tool={}", self.tool),
            format!("version={}", self.version),
            format!("command={}", self.command),
            format!("units={}", self.units),
            format!("seed={}", self.seed),
        ];
        if let Some(t) = &self.truncation {
            out.push(format!("prior_deficit={}", fmt_num(t.prior_deficit)));
            out.push(format!("max_row_deficit={}", fmt_num(t.max_row_deficit)));
            out.push(format!("marginal_deficit={}", fmt_num(t.marginal_deficit)));
        }
        out
    }
}

/// Probability mass dropped by truncating countable laws.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Truncation {
    pub prior_deficit: f64,
    pub max_row_deficit: f64,
    pub marginal_deficit: f64,
}

impl Truncation {
    pub fn of(model: &JointModel) -> Self {
        Truncation {
            prior_deficit: model.prior().truncation_deficit(),
            max_row_deficit: model
                .channel()
                .rows()
                .iter()
                .map(|r| r.truncation_deficit())
                .fold(0.0, f64::max),
            marginal_deficit: model.marginal().truncation_deficit(),
        }
    }
}

#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    #[serde(flatten)]
    pub header: &'a Header,
    #[serde(flatten)]
    pub body: T,
}

pub fn to_json<T: Serialize>(header: &Header, body: T) -> String {
    let mut s = serde_json::to_string_pretty(&Report { header, body }).expect("reports are plain data");
    s.push('\n');
    s
}

/// CSV with the header as leading `#` comment lines.
pub fn to_csv(header: &Header, extra: &[String], columns: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    for line in header.comment_lines().iter().chain(extra) {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields"));
    out
}

/// A number written exactly as the JSON reports write it.
pub fn fmt_num(v: f64) -> String {
    serde_json::to_string(&v).expect("finite number")
}

/// Number or `inf`, matching the JSON reports.
pub fn fmt_leakage(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        fmt_num(v)
    }
}

pub fn emit(output: Option<&Path>, text: &str) -> CliResult<()> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
