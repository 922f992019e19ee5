use pmlkit::continuous::{
    discretize_geometric_binary, discretize_poisson_binomial, pml_closed_form, pml_density, ClosedFormModel, GridSpec,
};
use pmlkit::io::ModelFile;
use pmlkit::leakage::{serialize_leakage, ProfileExport};
use pmlkit::oracle::{
    gain_ratio, make_guessing_gain, partition_oracle, randomized_function_oracle, randomized_strategy_excess,
    subset_oracle, GainFunction, STRATEGY_TOLERANCE,
};
use pmlkit::{
    leakage_cdf, pml_at, tail_probability, Alphabet, CdfPoint, DiscreteChannel, JointModel, Leakage, LeakageProfile,
    Symbol, Units,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::{ComputeArgs, ContinuousArgs, DiscretizeArgs, Format, OracleKind, TailArgs, VerifyArgs};
use crate::error::{CliError, CliResult};
use crate::input::{json_or_path, load_model};
use crate::report::{emit, fmt_leakage, fmt_num, to_csv, to_json, Header};

/// Slack for oracle comparisons that hold with equality in exact arithmetic.
const ORACLE_TOLERANCE: f64 = 1e-10;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 2;

fn profile(model: &JointModel, units: Units) -> LeakageProfile {
    let leakages: Vec<Leakage> = (0..model.outcomes().len())
        .into_par_iter()
        .map(|j| pml_at(model, j))
        .collect();
    LeakageProfile::from_parts(leakages, model.marginal().clone())
        .expect("zero-weight outcomes have zero leakage")
        .with_units(units)
}

/// The profile export minus `units`, which the header already carries.
#[derive(Serialize)]
struct ProfileBody {
    outcomes: Vec<Symbol>,
    #[serde(serialize_with = "serialize_leakages")]
    leakage: Vec<f64>,
    p_y: Vec<f64>,
    #[serde(serialize_with = "serialize_leakage")]
    maximal_leakage: f64,
    #[serde(serialize_with = "serialize_leakage")]
    mean_leakage: f64,
}

impl From<ProfileExport> for ProfileBody {
    fn from(e: ProfileExport) -> Self {
        ProfileBody {
            outcomes: e.outcomes,
            leakage: e.leakage,
            p_y: e.p_y,
            maximal_leakage: e.maximal_leakage,
            mean_leakage: e.mean_leakage,
        }
    }
}

fn serialize_leakages<S: serde::Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
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

#[derive(Serialize)]
struct SingleOutcome {
    outcome: Symbol,
    #[serde(serialize_with = "serialize_leakage")]
    leakage: f64,
    p_y: f64,
}

pub fn compute(args: &ComputeArgs) -> CliResult<u8> {
    let model = load_model(&args.model)?;
    let units: Units = args.common.units.into();
    let header = Header::new("compute", units, args.common.seed).with_model(&model);

    let text = match &args.outcome {
        Some(label) => {
            let j = model.outcomes().find_label(label)?;
            let single = SingleOutcome {
                outcome: model.outcomes().symbol(j).clone(),
                leakage: pml_at(&model, j).in_units(units),
                p_y: model.marginal().prob(j),
            };
            match args.format {
                Format::Json => to_json(&header, single),
                Format::Csv => to_csv(
                    &header,
                    &[],
                    &["outcome", "leakage", "p_y"],
                    &[vec![single.outcome.to_string(), fmt_leakage(single.leakage), fmt_num(single.p_y)]],
                ),
            }
        }
        None => {
            let p = profile(&model, units);
            let export = ProfileExport::from(&p);
            match args.format {
                Format::Json => to_json(&header, ProfileBody::from(export)),
                Format::Csv => {
                    let rows: Vec<Vec<String>> = export
                        .outcomes
                        .iter()
                        .zip(&export.leakage)
                        .zip(&export.p_y)
                        .map(|((o, l), w)| vec![o.to_string(), fmt_leakage(*l), fmt_num(*w)])
                        .collect();
                    let extra = [
                        format!("maximal_leakage={}", fmt_leakage(export.maximal_leakage)),
                        format!("mean_leakage={}", fmt_leakage(export.mean_leakage)),
                    ];
                    to_csv(&header, &extra, &["outcome", "leakage", "p_y"], &rows)
                }
            }
        }
    };
    emit(args.common.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Status {
    Ok,
    LowerBound,
    Violation,
    /// `P_Y(y) = 0`: leakage is 0 by convention and the oracles do not apply.
    Skipped,
}

#[derive(Serialize)]
struct VerifyRow {
    outcome: Symbol,
    #[serde(serialize_with = "serialize_leakage")]
    pml: f64,
    #[serde(serialize_with = "serialize_opt_leakage", skip_serializing_if = "Option::is_none")]
    oracle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gap: Option<f64>,
    /// Best mixed strategy minus best pure estimate (strategies only).
    #[serde(skip_serializing_if = "Option::is_none")]
    strategy_excess: Option<f64>,
    status: Status,
}

fn serialize_opt_leakage<S: serde::Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) => serialize_leakage(x, s),
        None => s.serialize_none(),
    }
}

#[derive(Serialize)]
struct VerifyBody {
    oracle: &'static str,
    /// What the oracle guarantees relative to the leakage.
    guarantee: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_groups: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolution: Option<usize>,
    rows: Vec<VerifyRow>,
    violations: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GainFile {
    estimates: Vec<Symbol>,
    gain: Vec<Vec<f64>>,
}

fn gap(pml: f64, oracle: f64) -> f64 {
    if pml.is_infinite() && oracle.is_infinite() {
        0.0
    } else {
        pml - oracle
    }
}

pub fn verify(args: &VerifyArgs) -> CliResult<u8> {
    let model = load_model(&args.model)?;
    let units: Units = args.common.units.into();
    let header = Header::new("verify", units, args.common.seed).with_model(&model);
    let n = model.inputs().len();

    let gain = match (args.oracle, &args.gain) {
        (OracleKind::Strategies, Some(path)) => {
            let file: GainFile = json_or_path(&path.to_string_lossy(), "gain table")?;
            Some(GainFunction::new(model.inputs().clone(), Alphabet::new(file.estimates)?, file.gain)?)
        }
        (OracleKind::Strategies, None) => Some(make_guessing_gain(&DiscreteChannel::identity(model.inputs().clone()))),
        (_, Some(_)) => return Err(CliError::Usage("--gain applies to --oracle strategies only".into())),
        _ => None,
    };
    if args.oracle == OracleKind::Partition && !(args.eps > 0.0 && args.eps.is_finite()) {
        return Err(CliError::Usage(format!("--eps must be positive, got {}", args.eps)));
    }
    let max_groups = args.max_groups.unwrap_or(n);
    if max_groups == 0 {
        return Err(CliError::Usage("--max-groups must be positive".into()));
    }
    let eps_nats = args.eps;

    let rows: Vec<pmlkit::Result<VerifyRow>> = (0..model.outcomes().len())
        .into_par_iter()
        .map(|j| {
            let y = model.outcomes().symbol(j);
            let l = pml_at(&model, j).nats();
            let mut row = VerifyRow {
                outcome: y.clone(),
                pml: l,
                oracle: None,
                gap: None,
                strategy_excess: None,
                status: Status::Skipped,
            };
            if model.marginal().prob(j) == 0.0 {
                return Ok(row);
            }
            let (value, status) = match args.oracle {
                OracleKind::Subset => {
                    let v = subset_oracle(&model, y)?.nats();
                    (v, exact_status(l, v))
                }
                OracleKind::Partition => {
                    let v = partition_oracle(&model, y, eps_nats)?.nats();
                    let inside = v <= l + ORACLE_TOLERANCE && v >= l - eps_nats - ORACLE_TOLERANCE;
                    (v, if inside { Status::Ok } else { Status::Violation })
                }
                OracleKind::Functions => {
                    let v = randomized_function_oracle(&model, y, max_groups)?.nats();
                    let status = if max_groups >= n {
                        exact_status(l, v)
                    } else if v <= l + ORACLE_TOLERANCE {
                        Status::LowerBound
                    } else {
                        Status::Violation
                    };
                    (v, status)
                }
                OracleKind::Strategies => {
                    let g = gain.as_ref().expect("built above");
                    let v = gain_ratio(&model, y, g)?.ln();
                    let excess = randomized_strategy_excess(&model, y, g, args.resolution)?;
                    row.strategy_excess = Some(excess);
                    let ok = v <= l + ORACLE_TOLERANCE && excess <= STRATEGY_TOLERANCE;
                    (v, if ok { Status::Ok } else { Status::Violation })
                }
            };
            row.oracle = Some(units.from_nats(value));
            row.gap = Some(units.from_nats(gap(l, value)));
            row.pml = units.from_nats(l);
            row.status = status;
            Ok(row)
        })
        .collect();
    let mut rows = rows.into_iter().collect::<pmlkit::Result<Vec<_>>>()?;
    for r in rows.iter_mut().filter(|r| r.status == Status::Skipped) {
        r.pml = units.from_nats(r.pml);
    }
    let violations = rows.iter().filter(|r| r.status == Status::Violation).count();

    let (name, guarantee) = match args.oracle {
        OracleKind::Subset => ("subset", format!("equal to pml within {ORACLE_TOLERANCE}")),
        OracleKind::Partition => ("partition", format!("within [pml - eps, pml] (eps = {eps_nats} nats)")),
        OracleKind::Functions if max_groups >= n => ("functions", format!("equal to pml within {ORACLE_TOLERANCE}")),
        OracleKind::Functions => ("functions", "lower bound on pml".to_owned()),
        OracleKind::Strategies => (
            "strategies",
            format!("log gain ratio at most pml; mixing gains at most {STRATEGY_TOLERANCE}"),
        ),
    };
    let body = VerifyBody {
        oracle: name,
        guarantee,
        eps: (args.oracle == OracleKind::Partition).then_some(eps_nats),
        max_groups: (args.oracle == OracleKind::Functions).then_some(max_groups),
        resolution: (args.oracle == OracleKind::Strategies).then_some(args.resolution),
        rows,
        violations,
    };
    emit(args.common.output.as_deref(), &to_json(&header, body))?;
    Ok(if violations > 0 { EXIT_VIOLATION } else { EXIT_OK })
}

fn exact_status(pml: f64, oracle: f64) -> Status {
    if gap(pml, oracle).abs() <= ORACLE_TOLERANCE {
        Status::Ok
    } else {
        Status::Violation
    }
}

#[derive(Serialize)]
struct GridCheck {
    #[serde(serialize_with = "serialize_leakage")]
    leakage: f64,
    gap: f64,
    argmax: f64,
    marginal_density: f64,
    boundary: bool,
}

#[derive(Serialize)]
struct ContinuousBody {
    family: ClosedFormModel,
    outcome: f64,
    #[serde(serialize_with = "serialize_leakage")]
    closed_form: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_check: Option<GridCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_error: Option<String>,
}

pub fn continuous(args: &ContinuousArgs) -> CliResult<u8> {
    let family: ClosedFormModel = json_or_path(&args.family, "family description")?;
    let units: Units = args.common.units.into();
    let grid: GridSpec = match &args.grid {
        Some(g) => json_or_path(g, "grid settings")?,
        None => GridSpec::default(),
    };
    let closed = pml_closed_form(&family, args.outcome)?.nats();
    let mut header = Header::new("continuous", units, args.common.seed);
    let mut body = ContinuousBody {
        family,
        outcome: args.outcome,
        closed_form: units.from_nats(closed),
        grid_check: None,
        grid_error: None,
    };

    let mut failure = None;
    if args.check_grid {
        header.grid = Some(grid);
        let check = family
            .density_model()
            .and_then(|d| pml_density(&d, args.outcome, &grid));
        match check {
            Ok(g) => {
                body.grid_check = Some(GridCheck {
                    leakage: units.from_nats(g.nats),
                    gap: units.from_nats((g.nats - closed).abs()),
                    argmax: g.argmax,
                    marginal_density: g.marginal,
                    boundary: g.boundary,
                })
            }
            Err(e) => {
                body.grid_error = Some(e.to_string());
                failure = Some(e);
            }
        }
    }
    emit(args.common.output.as_deref(), &to_json(&header, body))?;
    match failure {
        Some(e) => Err(CliError::GridCheck(e)),
        None => Ok(EXIT_OK),
    }
}

#[derive(Serialize)]
struct TailRow {
    eps: f64,
    tail_probability: f64,
}

#[derive(Serialize)]
struct TailBody {
    rows: Vec<TailRow>,
    cdf: Vec<CdfPoint>,
}

pub fn tail(args: &TailArgs) -> CliResult<u8> {
    let model = load_model(&args.model)?;
    let units: Units = args.common.units.into();
    if let Some(bad) = args.eps.iter().find(|e| e.is_nan() || **e < 0.0) {
        return Err(CliError::Usage(format!("--eps values must be non-negative, got {bad}")));
    }
    let header = Header::new("tail", units, args.common.seed).with_model(&model);
    let p = profile(&model, units);
    let rows: Vec<TailRow> = args
        .eps
        .iter()
        .map(|&eps| TailRow {
            eps,
            tail_probability: tail_probability(&p, eps),
        })
        .collect();
    let text = match args.format {
        Format::Json => to_json(
            &header,
            TailBody {
                rows,
                cdf: leakage_cdf(&p),
            },
        ),
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![fmt_num(r.eps), fmt_num(r.tail_probability)])
                .collect();
            to_csv(&header, &[], &["eps", "tail_probability"], &table)
        }
    };
    emit(args.common.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}

pub fn discretize(args: &DiscretizeArgs) -> CliResult<u8> {
    let family: ClosedFormModel = json_or_path(&args.family, "family description")?;
    let model = match family {
        ClosedFormModel::GeometricBinary { p, q } => discretize_geometric_binary(p, q, args.tail)?,
        ClosedFormModel::PoissonBinomial { lambda, p } => discretize_poisson_binomial(lambda, p, args.y_max, args.tail)?,
        other => {
            return Err(pmlkit::Error::Capability(format!(
                "{} has real-valued outcomes and no discrete counterpart",
                other.name()
            ))
            .into())
        }
    };
    let mut text = serde_json::to_string_pretty(&ModelFile::from_model(&model)).expect("model files are plain data");
    text.push('\n');
    emit(args.output.as_deref(), &text)?;
    Ok(EXIT_OK)
}
