use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use super::path::{SamplePath, Start};
use super::step_grid;
use crate::error::{Error, Result};
use crate::levy::{JumpMeasureSpec, JumpSampler};
use crate::linalg::{self, Matrix};
use crate::rng::rng_from_seed;

type FieldFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Drift coefficient `b`.
#[derive(Clone)]
pub enum Drift {
    Zero,
    /// `b(x) = -x / max(‖x‖, 1)`.
    SoftRestoring,
    /// Arbitrary field writing `b(x)` into the output slice.
    Custom(FieldFn),
}

impl Drift {
    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Drift::Zero => out.fill(0.0),
            Drift::SoftRestoring => {
                let s = linalg::norm(x).max(1.0);
                for (o, v) in out.iter_mut().zip(x) {
                    *o = -v / s;
                }
            }
            Drift::Custom(f) => f(x, out),
        }
    }
}

impl fmt::Debug for Drift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Drift::Zero => f.write_str("Zero"),
            Drift::SoftRestoring => f.write_str("SoftRestoring"),
            Drift::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// A `d x d` matrix field, written row-major.
#[derive(Clone)]
pub enum MatrixCoefficient {
    Constant(Matrix),
    Custom(FieldFn),
}

impl MatrixCoefficient {
    pub fn scaled_identity(d: usize, s: f64) -> Self {
        MatrixCoefficient::Constant(Matrix::identity(d, d) * s)
    }

    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        match self {
            MatrixCoefficient::Constant(m) => {
                let d = m.nrows();
                for i in 0..d {
                    for j in 0..d {
                        out[i * d + j] = m[(i, j)];
                    }
                }
            }
            MatrixCoefficient::Custom(f) => f(x, out),
        }
    }

    pub fn eval_matrix(&self, x: &[f64]) -> Matrix {
        let d = x.len();
        let mut buf = vec![0.0; d * d];
        self.eval(x, &mut buf);
        Matrix::from_row_slice(d, d, &buf)
    }

    fn constant_row_major(&self) -> Option<Vec<f64>> {
        match self {
            MatrixCoefficient::Constant(m) => Some(linalg::row_major(m)),
            MatrixCoefficient::Custom(_) => None,
        }
    }
}

impl fmt::Debug for MatrixCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixCoefficient::Constant(m) => write!(f, "Constant({:?})", linalg::matrix_to_rows(m)),
            MatrixCoefficient::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Declared constants of the ergodicity and jump-intensity conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpConstants {
    /// Dissipativity rate: `⟨x, b(x)⟩ <= -c1 ‖x‖` for `‖x‖ >= c2`.
    pub c1: f64,
    pub c2: f64,
    /// Exponential moment parameter of the jump measure.
    pub eta0: f64,
    /// Exponent of the jump-intensity bound, in `(0, 2)`.
    pub alpha: f64,
}

impl Default for JumpConstants {
    fn default() -> Self {
        JumpConstants {
            c1: 1.0,
            c2: 1.0,
            eta0: 1.0,
            alpha: 1.0,
        }
    }
}

/// `dX = b(X)dt + σ(X)dW + γ(X⁻) dZ̃` with `Z̃` the compensated pure-jump Lévy process.
#[derive(Debug, Clone)]
pub struct JumpSdeModel {
    dim: usize,
    drift: Drift,
    sigma: MatrixCoefficient,
    gamma: MatrixCoefficient,
    jumps: JumpMeasureSpec,
    constants: JumpConstants,
}

impl JumpSdeModel {
    pub fn new(
        drift: Drift,
        sigma: MatrixCoefficient,
        gamma: MatrixCoefficient,
        jumps: JumpMeasureSpec,
        constants: JumpConstants,
    ) -> Result<Self> {
        let dim = jumps.dim();
        for (name, c) in [("sigma", &sigma), ("gamma", &gamma)] {
            if let MatrixCoefficient::Constant(m) = c {
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::validation(format!("{name} must be {dim}x{dim}")));
                }
            }
        }
        if dim > 8 {
            return Err(Error::validation("dimensions above 8 are not supported"));
        }
        let JumpConstants { c1, c2, eta0, alpha } = constants;
        if !(c1 > 0.0 && c2 > 0.0 && eta0 > 0.0) {
            return Err(Error::validation("c1, c2 and eta0 must be > 0"));
        }
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(Error::validation("alpha must lie in (0, 2)"));
        }
        Ok(JumpSdeModel {
            dim,
            drift,
            sigma,
            gamma,
            jumps,
            constants,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn drift(&self) -> &Drift {
        &self.drift
    }

    pub fn sigma(&self) -> &MatrixCoefficient {
        &self.sigma
    }

    pub fn gamma(&self) -> &MatrixCoefficient {
        &self.gamma
    }

    pub fn jumps(&self) -> &JumpMeasureSpec {
        &self.jumps
    }

    pub fn constants(&self) -> &JumpConstants {
        &self.constants
    }
}

/// Euler–Maruyama:
/// `X ← X + b(X)dt + σ(X)√dt ξ + γ(X) ΔZ̃`.
///
/// [`Start::Stationary`] starts at the origin and applies the default burn-in.
pub fn simulate_jump_sde(
    model: &JumpSdeModel,
    horizon: f64,
    dt: f64,
    start: &Start,
    burn_in: Option<f64>,
    seed: u64,
) -> Result<SamplePath> {
    let d = model.dim;
    let (n, dt) = step_grid(horizon, dt)?;
    let burn = match (burn_in, start) {
        (Some(b), _) if b >= 0.0 && b.is_finite() => b,
        (Some(_), _) => return Err(Error::validation("burn-in must be >= 0")),
        (None, Start::Stationary) => super::default_burn_in(horizon),
        (None, Start::Fixed(_)) => 0.0,
    };
    let burn_steps = (burn / dt).round() as usize;
    let mut x = [0.0f64; 8];
    if let Start::Fixed(x0) = start {
        if x0.len() != d || x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("initial state has the wrong dimension"));
        }
        x[..d].copy_from_slice(x0);
    }

    let mut rng = rng_from_seed(seed);
    let jumps = JumpSampler::new(&model.jumps, dt)?;
    let has_jumps = !model.jumps.is_none();
    let sqrt_dt = dt.sqrt();
    let sigma_const = model.sigma.constant_row_major();
    let gamma_const = model.gamma.constant_row_major();
    let mut sigma = sigma_const.clone().unwrap_or_else(|| vec![0.0; d * d]);
    let mut gamma = gamma_const.clone().unwrap_or_else(|| vec![0.0; d * d]);
    let mut b = [0.0f64; 8];
    let mut xi = [0.0f64; 8];
    let mut dz = [0.0f64; 8];

    let mut states = Vec::with_capacity((n + 1) * d);
    for step in 0..burn_steps + n {
        if step == burn_steps {
            states.extend_from_slice(&x[..d]);
        }
        model.drift.eval(&x[..d], &mut b[..d]);
        if sigma_const.is_none() {
            model.sigma.eval(&x[..d], &mut sigma);
        }
        for v in xi[..d].iter_mut() {
            *v = rng.sample::<f64, _>(StandardNormal) * sqrt_dt;
        }
        if has_jumps {
            if gamma_const.is_none() {
                model.gamma.eval(&x[..d], &mut gamma);
            }
            jumps.sample(&mut rng, &mut dz[..d]);
        }
        let mut next = [0.0f64; 8];
        for i in 0..d {
            let mut acc = x[i] + b[i] * dt;
            for j in 0..d {
                acc += sigma[i * d + j] * xi[j];
            }
            if has_jumps {
                for j in 0..d {
                    acc += gamma[i * d + j] * dz[j];
                }
            }
            next[i] = acc;
        }
        if next[..d].iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { step: step + 1 });
        }
        x = next;
        if step >= burn_steps {
            states.extend_from_slice(&x[..d]);
        }
    }
    SamplePath::new(d, dt, states, seed, burn_steps, "jumpsde")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{JumpLaw, JumpMeasure, MomentFlags};

    fn diffusion(d: usize, drift: Drift, sigma: f64) -> JumpSdeModel {
        JumpSdeModel::new(
            drift,
            MatrixCoefficient::scaled_identity(d, sigma),
            MatrixCoefficient::scaled_identity(d, 0.0),
            JumpMeasureSpec::none(d),
            JumpConstants::default(),
        )
        .unwrap()
    }

    #[test]
    fn all_zero_coefficients_keep_the_path_constant() {
        let m = diffusion(2, Drift::Zero, 0.0);
        let p = simulate_jump_sde(&m, 3.0, 0.1, &Start::Fixed(vec![0.5, -2.0]), None, 4).unwrap();
        assert!(p.rows().all(|r| r == [0.5, -2.0]));
    }

    fn brownian_terminal_variance(dt: f64, reps: usize, seed0: u64) -> (f64, f64) {
        let m = diffusion(1, Drift::Zero, 1.0);
        let t = 2.0;
        let xs: Vec<f64> = (0..reps)
            .map(|r| simulate_jump_sde(&m, t, dt, &Start::Fixed(vec![1.0]), None, seed0 + r as u64).unwrap().last()[0] - 1.0)
            .collect();
        let mean = xs.iter().sum::<f64>() / reps as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        // standard error of a Gaussian sample variance
        (var, var * (2.0 / (reps - 1) as f64).sqrt())
    }

    #[test]
    fn brownian_marginal_variance() {
        let (var, se) = brownian_terminal_variance(0.01, 10_000, 0);
        assert!((var - 2.0).abs() < 3.0 * se, "var={var} se={se}");
    }

    #[test]
    fn halving_dt_keeps_the_variance() {
        let (v1, se1) = brownian_terminal_variance(0.02, 10_000, 50_000);
        let (v2, se2) = brownian_terminal_variance(0.01, 10_000, 90_000);
        let se = (se1 * se1 + se2 * se2).sqrt();
        assert!((v1 - v2).abs() < 2.0 * se, "{v1} vs {v2}");
    }

    #[test]
    fn soft_restoring_long_run_mean_norm_is_stable() {
        let m = diffusion(2, Drift::SoftRestoring, 1.0);
        let mean_norm = |t: f64, seed: u64| {
            let p = simulate_jump_sde(&m, t, 0.01, &Start::Fixed(vec![0.0, 0.0]), Some(10.0), seed).unwrap();
            p.rows().map(linalg::norm).sum::<f64>() / (p.n_steps() + 1) as f64
        };
        let a = mean_norm(4000.0, 1);
        let b = mean_norm(8000.0, 2);
        assert!(a.is_finite() && b.is_finite());
        assert!(((a - b) / a).abs() < 0.05, "{a} vs {b}");
    }

    #[test]
    fn explosive_drift_reports_step() {
        let m = JumpSdeModel::new(
            Drift::Custom(Arc::new(|x, out| out[0] = x[0] * x[0] * 1e10)),
            MatrixCoefficient::scaled_identity(1, 0.0),
            MatrixCoefficient::scaled_identity(1, 0.0),
            JumpMeasureSpec::none(1),
            JumpConstants::default(),
        )
        .unwrap();
        let err = simulate_jump_sde(&m, 10.0, 0.1, &Start::Fixed(vec![1.0]), None, 0).unwrap_err();
        assert!(matches!(err, Error::NonFiniteState { step } if step >= 1));
    }

    #[test]
    fn seed_determinism_with_jumps() {
        let jumps = JumpMeasureSpec::new(
            2,
            JumpMeasure::CompoundPoisson {
                rate: 1.0,
                law: JumpLaw::Gaussian {
                    cov: Matrix::identity(2, 2),
                },
            },
            MomentFlags::default(),
        )
        .unwrap();
        let m = JumpSdeModel::new(
            Drift::SoftRestoring,
            MatrixCoefficient::scaled_identity(2, 1.0),
            MatrixCoefficient::scaled_identity(2, 0.5),
            jumps,
            JumpConstants::default(),
        )
        .unwrap();
        let a = simulate_jump_sde(&m, 50.0, 0.01, &Start::Stationary, None, 3).unwrap();
        let b = simulate_jump_sde(&m, 50.0, 0.01, &Start::Stationary, None, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.burn_in_steps(), 500);
    }

    #[test]
    fn rejects_bad_constants() {
        let bad = JumpConstants {
            alpha: 2.0,
            ..JumpConstants::default()
        };
        assert!(JumpSdeModel::new(
            Drift::Zero,
            MatrixCoefficient::scaled_identity(1, 1.0),
            MatrixCoefficient::scaled_identity(1, 1.0),
            JumpMeasureSpec::none(1),
            bad
        )
        .is_err());
    }
}
