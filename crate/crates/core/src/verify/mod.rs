//! Floating-point layer: residuals, distance estimates, empirical
//! subregularity moduli, and a numeric search for sequence witnesses.

mod falsifier;
mod modulus;
mod project;
#[cfg(test)]
mod tests;

use serde::{Deserialize, Serialize};

use crate::error::NumericError;

pub use falsifier::sequence_falsifier;
pub use modulus::{distance_to_solutions, empirical_modulus, kkt_residual, residual, ModulusRow, ModulusTable};
pub use project::{distance_to_set, project, project_factor, project_polyhedron};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    /// Strictly decreasing, positive.
    pub radii: Vec<f64>,
    pub samples_per_radius: usize,
    pub seed: u64,
    pub projection_tol: f64,
    /// Samples with residual at or below this are skipped.
    pub residual_floor: f64,
    /// Falsifier grid `t_k = t0 · shrink^k`, `k ≤ max_depth`.
    pub t0: f64,
    pub shrink: f64,
    pub max_depth: usize,
    /// Starting points for the distance search.
    pub multistart: usize,
    /// Perturbed directions tried by the falsifier (the first is unperturbed).
    pub perturbations: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            radii: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5],
            samples_per_radius: 200,
            seed: 0,
            projection_tol: 1e-9,
            residual_floor: 1e-12,
            t0: 0.5,
            shrink: 0.5,
            max_depth: 8,
            multistart: 4,
            perturbations: 4,
        }
    }
}

impl SamplingConfig {
    pub fn validate(&self) -> Result<(), NumericError> {
        let bad = |s: &str| Err(NumericError::Config(s.into()));
        if self.radii.is_empty() {
            return bad("radii must be nonempty");
        }
        if self.radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return bad("radii must be positive");
        }
        if self.radii.windows(2).any(|w| w[1] >= w[0]) {
            return bad("radii must be strictly decreasing");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink factor must lie in (0, 1)");
        }
        if !(self.t0.is_finite() && self.t0 > 0.0) {
            return bad("t0 must be positive");
        }
        if !(self.projection_tol > 0.0) || self.residual_floor < 0.0 {
            return bad("tolerances must be positive");
        }
        if self.samples_per_radius == 0 {
            return bad("samples_per_radius must be positive");
        }
        Ok(())
    }

    /// Overrides from a problem file.
    pub fn with_spec(mut self, spec: &crate::system::schema::SamplingSpec) -> Self {
        if let Some(r) = &spec.radii {
            self.radii = r.clone();
        }
        if let Some(s) = spec.samples_per_radius {
            self.samples_per_radius = s;
        }
        if let Some(s) = spec.seed {
            self.seed = s;
        }
        self
    }
}
