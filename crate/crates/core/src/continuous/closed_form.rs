use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::leakage::Leakage;

use super::density::{DensityModel, PriorSupport};
use super::normal_pdf;

/// Model families with a known leakage formula.
///
/// JSON form: `{"family": "additive_gaussian", "params": {"sigma_x": 1.0, "sigma_n": 1.0}}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum ClosedFormModel {
    /// `Y = X + N`, `X ~ N(0, σ_X²)`, `N ~ N(0, σ_N²)` independent.
    AdditiveGaussian { sigma_x: f64, sigma_n: f64 },
    /// Zero-mean jointly Gaussian `(X, Y)` with correlation `ρ`.
    BivariateGaussian { sigma_x: f64, sigma_y: f64, rho: f64 },
    /// `X ~ Ber(1/2)`, `Y | X = x ~ N(x, σ²)`.
    GaussianMixture { sigma: f64 },
    /// `X ~ Pois(λp)`, `Y = X + Pois(λ(1-p))`.
    PoissonBinomial { lambda: f64, p: f64 },
    /// `X ~ Geom(p)` on `1, 2, ...`, `P(Y = 0 | X = x) = q^x`.
    GeometricBinary { p: f64, q: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must lie in (0, 1), got {v}")))
    }
}

impl ClosedFormModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ClosedFormModel::AdditiveGaussian { sigma_x, sigma_n } => {
                positive("sigma_x", sigma_x)?;
                positive("sigma_n", sigma_n)
            }
            ClosedFormModel::BivariateGaussian { sigma_x, sigma_y, rho } => {
                positive("sigma_x", sigma_x)?;
                positive("sigma_y", sigma_y)?;
                if rho > -1.0 && rho < 1.0 {
                    Ok(())
                } else {
                    Err(Error::Parameter(format!("rho must lie in (-1, 1), got {rho}")))
                }
            }
            ClosedFormModel::GaussianMixture { sigma } => positive("sigma", sigma),
            ClosedFormModel::PoissonBinomial { lambda, p } => validate_poisson_binomial(lambda, p),
            ClosedFormModel::GeometricBinary { p, q } => {
                open_unit("p", p)?;
                open_unit("q", q)
            }
        }
    }

    /// Families whose outcome `Y` is integer-valued.
    pub fn is_integer_family(&self) -> bool {
        matches!(
            self,
            ClosedFormModel::PoissonBinomial { .. } | ClosedFormModel::GeometricBinary { .. }
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClosedFormModel::AdditiveGaussian { .. } => "additive_gaussian",
            ClosedFormModel::BivariateGaussian { .. } => "bivariate_gaussian",
            ClosedFormModel::GaussianMixture { .. } => "gaussian_mixture",
            ClosedFormModel::PoissonBinomial { .. } => "poisson_binomial",
            ClosedFormModel::GeometricBinary { .. } => "geometric_binary",
        }
    }

    /// The family as a [`DensityModel`] for grid evaluation. Only the
    /// real-outcome families have one.
    pub fn density_model(&self) -> Result<DensityModel> {
        self.validate()?;
        match *self {
            ClosedFormModel::AdditiveGaussian { sigma_x, sigma_n } => {
                let s = (sigma_x * sigma_x + sigma_n * sigma_n).sqrt();
                Ok(DensityModel::new(
                    gaussian_quantiles(sigma_x),
                    Box::new(move |x| normal_pdf(x, 0.0, sigma_x)),
                    Box::new(move |y, x| normal_pdf(y, x, sigma_n)),
                )?
                .with_marginal(Box::new(move |y| normal_pdf(y, 0.0, s))))
            }
            ClosedFormModel::BivariateGaussian { sigma_x, sigma_y, rho } => {
                let slope = rho * sigma_y / sigma_x;
                let sd = (1.0 - rho * rho).sqrt() * sigma_y;
                Ok(DensityModel::new(
                    gaussian_quantiles(sigma_x),
                    Box::new(move |x| normal_pdf(x, 0.0, sigma_x)),
                    Box::new(move |y, x| normal_pdf(y, slope * x, sd)),
                )?
                .with_marginal(Box::new(move |y| normal_pdf(y, 0.0, sigma_y))))
            }
            ClosedFormModel::GaussianMixture { sigma } => Ok(DensityModel::new(
                PriorSupport::Atoms(vec![0.0, 1.0]),
                Box::new(|x| if x == 0.0 || x == 1.0 { 0.5 } else { 0.0 }),
                Box::new(move |y, x| normal_pdf(y, x, sigma)),
            )?
            .with_marginal(Box::new(move |y| {
                0.5 * (normal_pdf(y, 0.0, sigma) + normal_pdf(y, 1.0, sigma))
            }))),
            _ => Err(Error::Capability(format!(
                "grid evaluation is unsupported for the integer family {}",
                self.name()
            ))),
        }
    }
}

pub(crate) fn validate_poisson_binomial(lambda: f64, p: f64) -> Result<()> {
    open_unit("p", p)?;
    if !(lambda > 1.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!("lambda must exceed 1, got {lambda}")));
    }
    // The formula needs the noise rate at most one; equality keeps the
    // maximizing atom at x = y (tied with x = y - 1).
    if lambda * (1.0 - p) > 1.0 {
        return Err(Error::Parameter(format!(
            "lambda * (1 - p) must not exceed 1, got {}",
            lambda * (1.0 - p)
        )));
    }
    Ok(())
}

fn gaussian_quantiles(sd: f64) -> PriorSupport {
    let n = Normal::new(0.0, sd).expect("positive standard deviation");
    PriorSupport::Quantiles(Box::new(move |u| n.inverse_cdf(u)))
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn integer_outcome(y: f64, family: &str) -> Result<u64> {
    if y >= 0.0 && y.fract() == 0.0 && y.is_finite() {
        Ok(y as u64)
    } else {
        Err(Error::Parameter(format!("{family} outcomes are non-negative integers, got {y}")))
    }
}

/// Closed-form leakage `ℓ(X → y)` in nats.
pub fn pml_closed_form(model: &ClosedFormModel, y: f64) -> Result<Leakage> {
    model.validate()?;
    if !y.is_finite() {
        return Err(Error::Parameter(format!("outcome must be finite, got {y}")));
    }
    let nats = match *model {
        ClosedFormModel::AdditiveGaussian { sigma_x, sigma_n } => {
            let (vx, vn) = (sigma_x * sigma_x, sigma_n * sigma_n);
            0.5 * (vx / vn).ln_1p() + y * y / (2.0 * (vx + vn))
        }
        ClosedFormModel::BivariateGaussian { sigma_y, rho, .. } => {
            if rho == 0.0 {
                0.0
            } else {
                y * y / (2.0 * sigma_y * sigma_y) - 0.5 * (-rho * rho).ln_1p()
            }
        }
        ClosedFormModel::GaussianMixture { sigma } => {
            let d = (y - 0.5).abs() / (sigma * sigma);
            (2.0 / ((-d).exp() + 1.0)).ln()
        }
        ClosedFormModel::PoissonBinomial { lambda, p } => {
            let k = integer_outcome(y, "poisson_binomial")?;
            lambda * p - k as f64 * lambda.ln() + ln_factorial(k)
        }
        ClosedFormModel::GeometricBinary { p, q } => {
            let norm = 1.0 - q + p * q;
            match integer_outcome(y, "geometric_binary")? {
                0 => (norm / p).ln(),
                1 => (norm / (1.0 - q)).ln(),
                _ => return Err(Error::Parameter(format!("geometric_binary outcomes are 0 or 1, got {y}"))),
            }
        }
    };
    Ok(Leakage::from_nats(nats))
}

/// `ln 2 − ℓ(X → y)` for the Gaussian mixture, evaluated as
/// `ln(1 + e^{-|y - 1/2|/σ²})` so that it stays positive far in the tails.
pub fn mixture_limit_check(sigma: f64, y_magnitude: f64) -> Result<f64> {
    positive("sigma", sigma)?;
    positive("y_magnitude", y_magnitude)?;
    let d = (y_magnitude - 0.5).abs() / (sigma * sigma);
    Ok((-d).exp().ln_1p())
}

/// `ln 2`, the leakage of the Gaussian mixture as `|y| → ∞`.
pub const MIXTURE_LIMIT: f64 = LN_2;
