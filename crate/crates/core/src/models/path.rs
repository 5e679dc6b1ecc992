use crate::error::{Error, Result};

/// How a simulation is initialised.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// Deterministic initial state.
    Fixed(Vec<f64>),
    /// Exact stationary draw when available, otherwise burn-in from the
    /// stationary mean of the drift.
    Stationary,
}

/// A trajectory on the uniform grid `t_i = i * dt`, `i = 0..=n_steps`.
///
/// States are stored row-major, one row of `dim` coordinates per time.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    dim: usize,
    dt: f64,
    n_steps: usize,
    states: Vec<f64>,
    seed: u64,
    burn_in_steps: usize,
    model_tag: String,
}

impl SamplePath {
    pub fn new(
        dim: usize,
        dt: f64,
        states: Vec<f64>,
        seed: u64,
        burn_in_steps: usize,
        model_tag: impl Into<String>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("path dimension must be at least 1"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::validation("path dt must be > 0"));
        }
        if !states.len().is_multiple_of(dim) || states.len() / dim < 2 {
            return Err(Error::validation("path needs at least two rows of complete states"));
        }
        let n_steps = states.len() / dim - 1;
        Ok(SamplePath {
            dim,
            dt,
            n_steps,
            states,
            seed,
            burn_in_steps,
            model_tag: model_tag.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn horizon(&self) -> f64 {
        self.n_steps as f64 * self.dt
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn burn_in_steps(&self) -> usize {
        self.burn_in_steps
    }

    pub fn model_tag(&self) -> &str {
        &self.model_tag
    }

    /// All `n_steps + 1` rows.
    pub fn states(&self) -> &[f64] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn last(&self) -> &[f64] {
        self.state(self.n_steps)
    }

    /// The `n_steps` left endpoints `X_{t_0}, …, X_{t_{n-1}}` of the Riemann sum.
    pub fn left_points(&self) -> &[f64] {
        &self.states[..self.n_steps * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.states.chunks_exact(self.dim)
    }
}
