use rand_distr::StandardNormal;
use rand::Rng;

use super::path::{SamplePath, Start};
use super::{lyapunov::stationary_gaussian_cov, step_grid};
use crate::error::{Error, Result};
use crate::levy::{IncrementSampler, LevyTriplet};
use crate::linalg::{self, Matrix};
use crate::rng::rng_from_seed;

/// Lévy-driven Ornstein–Uhlenbeck process `dX = -BX dt + dZ`.
#[derive(Debug, Clone, PartialEq)]
pub struct OuModel {
    b: Matrix,
    noise: LevyTriplet,
}

impl OuModel {
    /// Fails unless every eigenvalue of `b` has real part above `1e-10`.
    pub fn new(b: Matrix, noise: LevyTriplet) -> Result<Self> {
        if !b.is_square() || b.nrows() != noise.dim() {
            return Err(Error::validation("B must be square and match the noise dimension"));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("B has non-finite entries"));
        }
        let min_re = linalg::min_real_eigenvalue(&b);
        if !(min_re > 1e-10) {
            return Err(Error::validation(format!(
                "B is not stable: smallest eigenvalue real part {min_re}"
            )));
        }
        Ok(OuModel { b, noise })
    }

    pub fn dim(&self) -> usize {
        self.b.nrows()
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn noise(&self) -> &LevyTriplet {
        &self.noise
    }

    /// True when the driving noise is a Brownian motion with drift.
    pub fn is_gaussian(&self) -> bool {
        self.noise.jumps().is_none()
    }

    /// Mean of the stationary law, `B⁻¹ a` (compensated jumps are centered).
    pub fn stationary_mean(&self) -> Vec<f64> {
        let a = linalg::Vector::from_column_slice(self.noise.drift());
        match self.b.clone().lu().solve(&a) {
            Some(m) => m.iter().copied().collect(),
            None => vec![0.0; self.dim()],
        }
    }

    /// Stationary covariance of the Brownian-driven case.
    pub fn stationary_cov(&self) -> Result<Matrix> {
        stationary_gaussian_cov(&self.b, self.noise.gaussian_cov())
    }
}

/// Simulates `model` on `[0, horizon]` with the exact one-step linear map
/// `X ← e^{-dt B} X + e^{-dt B/2} ΔZ`.
///
/// `dt` is shrunk slightly when needed so that it divides `horizon`. With
/// [`Start::Stationary`] a Brownian-driven model starts from its exact
/// stationary Gaussian law; otherwise the default burn-in is simulated and
/// discarded. An explicit `burn_in` overrides the default.
pub fn simulate_ou(
    model: &OuModel,
    horizon: f64,
    dt: f64,
    start: &Start,
    burn_in: Option<f64>,
    seed: u64,
) -> Result<SamplePath> {
    let d = model.dim();
    let (n, dt) = step_grid(horizon, dt)?;
    let exact_start = matches!(start, Start::Stationary) && model.is_gaussian();
    let burn = match burn_in {
        Some(b) if b >= 0.0 && b.is_finite() => b,
        Some(_) => return Err(Error::validation("burn-in must be >= 0")),
        None if matches!(start, Start::Stationary) && !exact_start => super::default_burn_in(horizon),
        None => 0.0,
    };
    let burn_steps = (burn / dt).round() as usize;

    let mut rng = rng_from_seed(seed);
    let mut x = [0.0f64; 8];
    match start {
        Start::Fixed(x0) => {
            if x0.len() != d || x0.iter().any(|v| !v.is_finite()) {
                return Err(Error::validation("initial state has the wrong dimension"));
            }
            x[..d].copy_from_slice(x0);
        }
        Start::Stationary => {
            let mean = model.stationary_mean();
            x[..d].copy_from_slice(&mean);
            if exact_start {
                let l = linalg::row_major(&linalg::psd_sqrt(&model.stationary_cov()?));
                let xi: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                for i in 0..d {
                    x[i] += (0..d).map(|j| l[i * d + j] * xi[j]).sum::<f64>();
                }
            }
        }
    }

    let a = linalg::row_major(&linalg::expm(&(model.b() * -dt)));
    let m = linalg::row_major(&linalg::expm(&(model.b() * (-0.5 * dt))));
    let sampler = IncrementSampler::new(model.noise(), dt)?;
    let mut dz = [0.0f64; 8];
    let mut next = [0.0f64; 8];
    let mut step = |x: &mut [f64; 8], rng: &mut _| {
        sampler.sample(rng, &mut dz[..d]);
        for i in 0..d {
            let row_a = &a[i * d..(i + 1) * d];
            let row_m = &m[i * d..(i + 1) * d];
            let mut acc = 0.0;
            for j in 0..d {
                acc += row_a[j] * x[j] + row_m[j] * dz[j];
            }
            next[i] = acc;
        }
        x[..d].copy_from_slice(&next[..d]);
    };
    for _ in 0..burn_steps {
        step(&mut x, &mut rng);
    }
    let mut states = Vec::with_capacity((n + 1) * d);
    states.extend_from_slice(&x[..d]);
    for _ in 0..n {
        step(&mut x, &mut rng);
        states.extend_from_slice(&x[..d]);
    }
    SamplePath::new(d, dt, states, seed, burn_steps, "ou")
}
