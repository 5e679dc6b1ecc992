//! Sample-path simulators for Lévy-driven OU processes and jump SDEs, plus
//! numerical checks of their coefficient assumptions.

mod assumptions;
mod jump_sde;
mod lyapunov;
mod ou;
mod path;

pub use assumptions::{
    validate_jump_assumptions, validate_ou_assumptions, AssumptionCheck, AssumptionReport, CheckStatus,
};
pub use jump_sde::{simulate_jump_sde, Drift, JumpConstants, JumpSdeModel, MatrixCoefficient};
pub use lyapunov::stationary_gaussian_cov;
pub use ou::{simulate_ou, OuModel};
pub use path::{SamplePath, Start};

/// Default burn-in when the start is not exactly stationary: `min(T/10, 50)`.
pub fn default_burn_in(horizon: f64) -> f64 {
    (horizon / 10.0).min(50.0)
}

/// Number of steps and the adjusted step so that `n * dt == horizon`.
pub(crate) fn step_grid(horizon: f64, dt: f64) -> crate::Result<(usize, f64)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(crate::Error::validation("dt must be > 0"));
    }
    if !(horizon >= dt && horizon.is_finite()) {
        return Err(crate::Error::validation("horizon must satisfy T >= dt"));
    }
    let n = (horizon / dt).round().max(1.0) as usize;
    Ok((n, horizon / n as f64))
}
