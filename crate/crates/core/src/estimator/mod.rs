//! Kernel estimator of the invariant density from a discretely sampled path.

mod estimate;
mod formulas;
mod grid;

pub use formulas::{
    iterated_log, psi_d, rate_phi, rate_psi, sigma_proxy, theoretical_bandwidth, upsilon, Bandwidth,
};
pub use estimate::{estimate_at, estimate_density, estimate_from_points, DensityEstimate};
pub use grid::EvaluationGrid;
