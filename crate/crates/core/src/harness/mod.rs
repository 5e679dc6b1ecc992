//! Monte Carlo experiments: risk curves, rate fits, variance scaling and
//! ergodic averages.

mod ergodic;
mod pilot;
mod reference;
mod risk;
mod stats;
mod variance;

use crate::error::Result;
use crate::models::{simulate_jump_sde, simulate_ou, JumpSdeModel, OuModel, SamplePath, Start};

pub use ergodic::{ergodic_average, ergodic_rms_experiment, ErgodicReport};
pub use pilot::{pilot_reference, PilotSpec};
pub use reference::{sup_norm_error, GaussianDensity, GridFunction, Reference};
pub use risk::{run_risk_experiment, HRule, RiskExperiment, RiskReport, RiskRow, RiskSummary};
pub use stats::{bootstrap_median_se, fit_log_rate, mean_and_variance, median, quantile, RateFit};
pub use variance::{
    occupation_time, theoretical_variance_exponent, variance_scaling_experiment, VarianceExperiment,
    VarianceScalingReport,
};

/// Either of the two simulated model classes.
#[derive(Debug, Clone)]
pub enum ProcessModel {
    Ou(OuModel),
    JumpSde(JumpSdeModel),
}

impl ProcessModel {
    pub fn dim(&self) -> usize {
        match self {
            ProcessModel::Ou(m) => m.dim(),
            ProcessModel::JumpSde(m) => m.dim(),
        }
    }

    pub fn simulate(&self, horizon: f64, dt: f64, start: &Start, burn_in: Option<f64>, seed: u64) -> Result<SamplePath> {
        match self {
            ProcessModel::Ou(m) => simulate_ou(m, horizon, dt, start, burn_in, seed),
            ProcessModel::JumpSde(m) => simulate_jump_sde(m, horizon, dt, start, burn_in, seed),
        }
    }

    /// Analytic invariant density, available for Brownian-driven OU models
    /// with non-degenerate stationary covariance.
    pub fn gaussian_reference(&self) -> Option<GaussianDensity> {
        match self {
            ProcessModel::Ou(m) if m.is_gaussian() => {
                let cov = m.stationary_cov().ok()?;
                GaussianDensity::new(m.stationary_mean(), cov).ok()
            }
            _ => None,
        }
    }

    /// Stable text used in cache keys; `None` when a coefficient is an opaque closure.
    pub(crate) fn fingerprint(&self) -> Option<String> {
        let s = format!("{self:?}");
        (!s.contains("Custom(..)")).then_some(s)
    }
}
