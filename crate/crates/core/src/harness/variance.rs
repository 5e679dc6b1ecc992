use rayon::prelude::*;

use super::stats::{fit_log_rate, mean_and_variance, RateFit};
use super::ProcessModel;
use crate::error::{Error, Result};
use crate::models::{SamplePath, Start};
use crate::rng::replication_seed;

#[derive(Debug, Clone)]
pub struct VarianceExperiment {
    pub model: ProcessModel,
    pub center: Vec<f64>,
    /// Volumes of the cubes whose indicators are integrated, each in `(0, 1)`.
    pub lambdas: Vec<f64>,
    pub horizon: f64,
    pub dt: f64,
    pub reps: usize,
    pub master_seed: u64,
    pub start: Start,
    pub burn_in: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarianceScalingReport {
    pub lambdas: Vec<f64>,
    /// Empirical `Var(∫₀ᵀ f) / T` per volume.
    pub var_over_t: Vec<f64>,
    pub mean_occupation: Vec<f64>,
    /// Log-log fit of `var_over_t` against `lambdas`; absent when some variance is zero.
    pub fit: Option<RateFit>,
    pub theoretical_exponent: f64,
}

/// Exponent of `λ ↦ λ · μ(S) · ψ_d(λ)²` with `μ(S) ≈ ρ λ`.
pub fn theoretical_variance_exponent(d: usize) -> f64 {
    match d {
        1 | 2 => 2.0,
        _ => 1.0 + 2.0 / d as f64,
    }
}

/// `∫₀ᵀ 1{X_t ∈ center + [-a/2, a/2]^d} dt` by a left Riemann sum, for each
/// side length `a`.
pub fn occupation_time(path: &SamplePath, center: &[f64], sides: &[f64]) -> Vec<f64> {
    let d = path.dim();
    let mut counts = vec![0u64; sides.len()];
    for x in path.left_points().chunks_exact(d) {
        let r = x
            .iter()
            .zip(center)
            .map(|(a, c)| (a - c).abs())
            .fold(0.0, f64::max);
        for (c, &a) in counts.iter_mut().zip(sides) {
            if r <= 0.5 * a {
                *c += 1;
            }
        }
    }
    counts.into_iter().map(|c| c as f64 * path.dt()).collect()
}

pub fn variance_scaling_experiment(exp: &VarianceExperiment) -> Result<VarianceScalingReport> {
    let d = exp.model.dim();
    if exp.reps < 50 {
        return Err(Error::validation("variance experiment needs reps >= 50"));
    }
    if exp.center.len() != d {
        return Err(Error::validation("center dimension does not match the model"));
    }
    if exp.lambdas.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
        return Err(Error::validation("lambda values must lie in (0, 1)"));
    }
    let lo = exp.lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = exp.lambdas.iter().cloned().fold(0.0, f64::max);
    if (hi / lo).log10() < 1.5 {
        return Err(Error::validation("lambda values must span at least 1.5 decades"));
    }
    let sides: Vec<f64> = exp.lambdas.iter().map(|l| l.powf(1.0 / d as f64)).collect();
    let occupations = (0..exp.reps)
        .into_par_iter()
        .map(|r| {
            let seed = replication_seed(exp.master_seed, r as u64);
            let path = exp.model.simulate(exp.horizon, exp.dt, &exp.start, exp.burn_in, seed)?;
            Ok(occupation_time(&path, &exp.center, &sides))
        })
        .collect::<Result<Vec<_>>>()?;
    if occupations.iter().all(|o| o.iter().all(|v| *v == 0.0)) {
        return Err(Error::DegenerateData(
            "no path visited any indicator support; move the center into the bulk".into(),
        ));
    }
    let mut var_over_t = Vec::with_capacity(sides.len());
    let mut mean_occupation = Vec::with_capacity(sides.len());
    for i in 0..sides.len() {
        let col: Vec<f64> = occupations.iter().map(|o| o[i]).collect();
        let (m, v) = mean_and_variance(&col);
        mean_occupation.push(m);
        var_over_t.push(v / exp.horizon);
    }
    let fit = if var_over_t.iter().all(|v| *v > 0.0) && exp.lambdas.len() >= 3 {
        Some(fit_log_rate(&exp.lambdas, &var_over_t)?)
    } else {
        None
    };
    Ok(VarianceScalingReport {
        lambdas: exp.lambdas.clone(),
        var_over_t,
        mean_occupation,
        fit,
        theoretical_exponent: theoretical_variance_exponent(d),
    })
}
