//! Instance files: the JSON schema consumed by the CLI and the harness.
//!
//! ```json
//! {
//!   "spectrum": [[l, r], ...],
//!   "points": {"kind": "arithmetic", "step": 1.0, "offset": 0.0, "range": [-900, 900]},
//!   "q": [[l, r], ...],
//!   "params": {
//!     "alpha": null, "delta": 0.05, "epsilon": 0.05,
//!     "mu_grid": [0, 1e-8, 1e-6, 1e-4, 1e-2, 1],
//!     "radii": [25, 50, 100],
//!     "growth": {"C": 1.0, "gamma": 0.5},
//!     "beta": 0.7
//!   }
//! }
//! ```
//!
//! `q` (optional) names the time-side region for concentration runs. Every
//! field of `params` has a default, so a minimal instance is just a spectrum
//! and a point generator; `growth: null` selects the uniform-norm mode and a
//! present `growth` selects the moderate-growth mode.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pointset::{Generator, PointSet};
use crate::spectrum::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthBudget {
    #[serde(rename = "C")]
    pub c: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Trade-off parameter for subspace extraction; `None` derives it from
    /// the measured perturbation level.
    pub alpha: Option<f64>,
    /// Window bandwidth and window-extension factor.
    pub delta: f64,
    /// Concentration slack target (the pipeline flags whether `c >= 1 - epsilon`).
    pub epsilon: f64,
    /// Regularization grid for the per-index solves.
    pub mu_grid: Vec<f64>,
    /// Window radius schedule.
    pub radii: Vec<f64>,
    /// Moderate-growth norm budget `C e^{|j|^gamma}`; `None` = uniform mode.
    pub growth: Option<GrowthBudget>,
    /// Decay target for the sinc-product window (moderate-growth pipelines).
    pub beta: Option<f64>,
    /// Uniform norm budget for the uniform mode; `None` = unconstrained.
    pub norm_budget: Option<f64>,
    /// Interpolation window centers; `None` places windows at the densest
    /// scan position (uniform mode) or the origin (moderate-growth mode).
    pub centers: Option<Vec<f64>>,
    /// Quadrature resolution for concentration operators.
    pub quad_nodes: usize,
    /// How far beyond the window the per-index restriction error is counted.
    pub eval_pad: f64,
    /// How far beyond the concentration region the total-mass quadrature
    /// extends in the pipeline.
    pub domain_pad: f64,
    /// Multiplier window override by registry name.
    pub window: Option<String>,
    pub seed: u64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            alpha: None,
            delta: 0.05,
            epsilon: 0.05,
            mu_grid: vec![0.0, 1e-8, 1e-6, 1e-4, 1e-2, 1.0],
            radii: vec![25.0, 50.0, 100.0],
            growth: None,
            beta: None,
            norm_budget: None,
            centers: None,
            quad_nodes: 512,
            eval_pad: 800.0,
            domain_pad: 400.0,
            window: None,
            seed: 0,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.alpha {
            if !(a > 1.0) {
                return Err(Error::invalid_parameter(
                    "alpha",
                    format!("must be > 1, got {a}"),
                ));
            }
        }
        if !(self.delta > 0.0) {
            return Err(Error::invalid_parameter(
                "delta",
                format!("must be > 0, got {}", self.delta),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid_parameter(
                "epsilon",
                format!("must lie in (0, 1), got {}", self.epsilon),
            ));
        }
        if self.mu_grid.is_empty() || self.mu_grid.iter().any(|&m| !(m >= 0.0)) {
            return Err(Error::invalid_parameter(
                "mu_grid",
                "must be a nonempty list of values >= 0".to_string(),
            ));
        }
        if self.radii.is_empty()
            || self.radii[0] <= 0.0
            || self.radii.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::invalid_parameter(
                "radii",
                "must be positive and strictly increasing".to_string(),
            ));
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b < 1.0) {
                return Err(Error::invalid_parameter(
                    "beta",
                    format!("must lie in (0, 1), got {b}"),
                ));
            }
        }
        if let Some(g) = &self.growth {
            if !(g.c > 0.0) {
                return Err(Error::invalid_parameter(
                    "growth.C",
                    format!("must be > 0, got {}", g.c),
                ));
            }
            if !(g.gamma > 0.0 && g.gamma < 1.0) {
                return Err(Error::invalid_parameter(
                    "growth.gamma",
                    format!("must lie in (0, 1), got {}", g.gamma),
                ));
            }
            if let Some(b) = self.beta {
                if !(g.gamma < b) {
                    return Err(Error::invalid_parameter(
                        "beta",
                        format!("must exceed gamma = {} (got beta = {b})", g.gamma),
                    ));
                }
            }
        }
        if !(self.eval_pad >= 0.0) || !(self.domain_pad > 0.0) {
            return Err(Error::invalid_parameter(
                "eval_pad/domain_pad",
                "pads must be nonnegative (domain pad positive)".to_string(),
            ));
        }
        Ok(())
    }
}

/// Parsed instance file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub spectrum: Vec<(f64, f64)>,
    pub points: Generator,
    #[serde(default)]
    pub q: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub params: Params,
}

impl InstanceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: InstanceSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.params.validate()?;
        Ok(spec)
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        Spectrum::normalize(&self.spectrum)
    }

    pub fn point_set(&self) -> Result<PointSet> {
        PointSet::from_generator(self.points.clone())
    }

    pub fn q_spectrum(&self) -> Result<Option<Spectrum>> {
        self.q
            .as_ref()
            .map(|iv| Spectrum::normalize(iv))
            .transpose()
    }
}
