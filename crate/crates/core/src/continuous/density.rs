use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::leakage::Leakage;

pub type Density = Box<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ConditionalDensity = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Tolerance on the prior mass carried by the represented domain.
pub const PRIOR_MASS_TOLERANCE: f64 = 1e-6;

/// Grid used to approximate the essential supremum over the prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub points: usize,
    pub quantile_clip: f64,
    pub refine: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 16384,
            quantile_clip: 1e-9,
            refine: 16,
        }
    }
}

impl GridSpec {
    pub const MIN_POINTS: usize = 1 << 10;

    pub fn validate(&self) -> Result<()> {
        if self.points < Self::MIN_POINTS {
            return Err(Error::Parameter(format!(
                "grid needs at least {} points, got {}",
                Self::MIN_POINTS,
                self.points
            )));
        }
        // Two clipped tails may drop at most PRIOR_MASS_TOLERANCE.
        if !(self.quantile_clip > 0.0 && self.quantile_clip <= PRIOR_MASS_TOLERANCE / 2.0) {
            return Err(Error::Parameter(format!(
                "quantile_clip must lie in (0, 5e-7], got {}",
                self.quantile_clip
            )));
        }
        if self.refine == 0 {
            return Err(Error::Parameter("refine must be at least 1".into()));
        }
        Ok(())
    }
}

/// Where the prior lives and how its domain is represented.
pub enum PriorSupport {
    /// Lebesgue density on a bounded interval.
    Interval { lo: f64, hi: f64 },
    /// Lebesgue density on the line, clipped at the prior quantiles
    /// `[clip, 1 - clip]`; holds the prior quantile function.
    Quantiles(Density),
    /// Probability mass on finitely many atoms (counting measure).
    Atoms(Vec<f64>),
}

/// Prior density, conditional density and (optionally analytic) marginal
/// density of a real-valued model.
pub struct DensityModel {
    support: PriorSupport,
    prior: Density,
    conditional: ConditionalDensity,
    marginal: Option<Density>,
}

impl DensityModel {
    /// `prior(x)` is `f_X(x)` (or the mass of atom `x`), `conditional(y, x)`
    /// is `f_{Y|X}(y, x)`.
    pub fn new(support: PriorSupport, prior: Density, conditional: ConditionalDensity) -> Result<Self> {
        let model = DensityModel {
            support,
            prior,
            conditional,
            marginal: None,
        };
        let mass = model.prior_mass(&GridSpec::default())?;
        if !((1.0 - PRIOR_MASS_TOLERANCE)..=(1.0 + PRIOR_MASS_TOLERANCE)).contains(&mass) {
            return Err(Error::Model(format!(
                "prior mass on the represented domain is {mass}, expected 1 within {PRIOR_MASS_TOLERANCE}"
            )));
        }
        Ok(model)
    }

    /// Supplies an analytic `f_Y`, used instead of numeric integration.
    pub fn with_marginal(mut self, marginal: Density) -> Self {
        self.marginal = Some(marginal);
        self
    }

    pub fn support(&self) -> &PriorSupport {
        &self.support
    }

    /// Integral of the prior over the represented domain.
    pub fn prior_mass(&self, grid: &GridSpec) -> Result<f64> {
        match &self.support {
            PriorSupport::Atoms(xs) => Ok(xs.iter().map(|&x| (self.prior)(x)).sum()),
            _ => {
                let (xs, h) = self.grid(grid)?;
                Ok(trapezoid(xs.iter().map(|&x| (self.prior)(x)), h))
            }
        }
    }

    fn domain(&self, grid: &GridSpec) -> Result<(f64, f64)> {
        let (lo, hi) = match &self.support {
            PriorSupport::Interval { lo, hi } => (*lo, *hi),
            PriorSupport::Quantiles(q) => (q(grid.quantile_clip), q(1.0 - grid.quantile_clip)),
            PriorSupport::Atoms(_) => unreachable!("atoms have no interval domain"),
        };
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Model(format!("invalid prior domain [{lo}, {hi}]")));
        }
        Ok((lo, hi))
    }

    fn grid(&self, grid: &GridSpec) -> Result<(Vec<f64>, f64)> {
        let (lo, hi) = self.domain(grid)?;
        let h = (hi - lo) / (grid.points - 1) as f64;
        Ok(((0..grid.points).map(|i| lo + i as f64 * h).collect(), h))
    }

    /// Numeric `f_Y(y) = ∫ f_{Y|X}(y, x) f_X(x) dx` over the grid.
    pub fn numeric_marginal(&self, y: f64, grid: &GridSpec) -> Result<f64> {
        grid.validate()?;
        let v = match &self.support {
            PriorSupport::Atoms(xs) => xs.iter().map(|&x| (self.prior)(x) * (self.conditional)(y, x)).sum(),
            _ => {
                let (xs, h) = self.grid(grid)?;
                trapezoid(xs.iter().map(|&x| (self.prior)(x) * (self.conditional)(y, x)), h)
            }
        };
        if !v.is_finite() {
            return Err(Error::Model(format!("marginal density at y = {y} is not finite")));
        }
        Ok(v)
    }

    /// `f_Y(y)`: analytic when supplied, numeric otherwise.
    pub fn marginal(&self, y: f64, grid: &GridSpec) -> Result<f64> {
        match &self.marginal {
            Some(f) => {
                let v = f(y);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Model(format!("marginal density at y = {y} is {v}")));
                }
                Ok(v)
            }
            None => self.numeric_marginal(y, grid),
        }
    }

    /// Relative disagreement between the analytic and numeric marginals, when
    /// both exist.
    pub fn marginal_discrepancy(&self, y: f64, grid: &GridSpec) -> Result<Option<f64>> {
        let Some(f) = &self.marginal else {
            return Ok(None);
        };
        let analytic = f(y);
        let numeric = self.numeric_marginal(y, grid)?;
        Ok(Some((analytic - numeric).abs() / analytic.abs().max(f64::MIN_POSITIVE)))
    }

    fn ratio_at(&self, y: f64, x: f64, fy: f64) -> Result<f64> {
        let c = (self.conditional)(y, x);
        if !c.is_finite() || c < 0.0 {
            return Err(Error::Model(format!("conditional density f(y = {y} | x = {x}) is {c}")));
        }
        Ok(c / fy)
    }
}

/// Density-ratio leakage with the grid that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityLeakage {
    #[serde(serialize_with = "crate::leakage::serialize_leakage", rename = "leakage")]
    pub nats: f64,
    /// Input at which the ratio peaked.
    pub argmax: f64,
    /// `f_Y(y)` used as the denominator.
    pub marginal: f64,
    /// The peak sits within one coarse step of the clipped domain's edge, so
    /// the true supremum may lie outside it and exceed `nats`.
    pub boundary: bool,
    pub grid: GridSpec,
}

impl DensityLeakage {
    pub fn leakage(&self) -> Leakage {
        Leakage::from_nats(self.nats)
    }
}

/// `log ess sup_{P_X} f_{Y|X}(y, X) / f_Y(y)`.
///
/// The essential supremum is approximated by a maximum over the grid on the
/// quantile-clipped domain followed by one pass of local refinement
/// (`refine` times denser) around the best cell. Atom priors are scanned
/// exactly over atoms of positive mass. Ties go to the lowest `x`.
pub fn pml_density(model: &DensityModel, y: f64, grid: &GridSpec) -> Result<DensityLeakage> {
    grid.validate()?;
    let fy = model.marginal(y, grid)?;
    if fy == 0.0 {
        return Err(Error::UndefinedOutcome(y));
    }

    let mut boundary = false;
    let (argmax, best) = match &model.support {
        PriorSupport::Atoms(xs) => {
            let mut best = (f64::NAN, f64::NEG_INFINITY);
            for &x in xs {
                if (model.prior)(x) > 0.0 {
                    let r = model.ratio_at(y, x, fy)?;
                    if r > best.1 {
                        best = (x, r);
                    }
                }
            }
            best
        }
        _ => {
            let (xs, h) = model.grid(grid)?;
            let (lo, hi) = (xs[0], xs[xs.len() - 1]);
            let mut best = (xs[0], f64::NEG_INFINITY);
            for &x in &xs {
                let r = model.ratio_at(y, x, fy)?;
                if r > best.1 {
                    best = (x, r);
                }
            }
            let a = (best.0 - h).max(lo);
            let b = (best.0 + h).min(hi);
            let steps = ((b - a) / (h / grid.refine as f64)).round() as usize;
            for i in 0..=steps {
                let x = a + (b - a) * i as f64 / steps.max(1) as f64;
                let r = model.ratio_at(y, x, fy)?;
                if r > best.1 {
                    best = (x, r);
                }
            }
            boundary = best.0 - lo <= h || hi - best.0 <= h;
            best
        }
    };

    Ok(DensityLeakage {
        nats: best.ln().max(0.0),
        argmax,
        marginal: fy,
        boundary,
        grid: *grid,
    })
}

fn trapezoid(values: impl Iterator<Item = f64>, h: f64) -> f64 {
    let v: Vec<f64> = values.collect();
    let n = v.len();
    let inner: f64 = v[1..n - 1].iter().sum();
    h * (inner + 0.5 * (v[0] + v[n - 1]))
}
