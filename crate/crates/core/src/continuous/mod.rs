//! Leakage for real-valued models: density-ratio grid search, the closed-form
//! catalog, an integrability probe and discrete counterparts of the
//! integer-valued families.

mod closed_form;
mod density;
mod geometric;
mod poisson;
mod probe;

pub use closed_form::{mixture_limit_check, pml_closed_form, ClosedFormModel, MIXTURE_LIMIT};
pub use density::{
    pml_density, ConditionalDensity, Density, DensityLeakage, DensityModel, GridSpec, PriorSupport,
    PRIOR_MASS_TOLERANCE,
};
pub use geometric::discretize_geometric_binary;
pub use poisson::discretize_poisson_binomial;
pub use probe::{integrability_probe, ProbeReport};

/// Density of `N(mean, sd²)` at `x`.
pub fn normal_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
}
