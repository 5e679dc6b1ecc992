use rayon::prelude::*;

use super::stats::{fit_log_rate, mean_and_variance, RateFit};
use super::ProcessModel;
use crate::error::{Error, Result};
use crate::models::{SamplePath, Start};
use crate::rng::replication_seed;

/// `(1/n) Σ_{i<n} g(X_{t_i})`.
pub fn ergodic_average(path: &SamplePath, g: &dyn Fn(&[f64]) -> f64) -> f64 {
    let d = path.dim();
    let pts = path.left_points();
    let n = pts.len() / d;
    pts.chunks_exact(d).map(g).sum::<f64>() / n as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicReport {
    pub horizons: Vec<f64>,
    /// Root mean square of `average - target` over replications.
    pub rms: Vec<f64>,
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
    pub fit: Option<RateFit>,
}

/// RMS deviation of ergodic averages from `target` for each horizon.
#[allow(clippy::too_many_arguments)]
pub fn ergodic_rms_experiment(
    model: &ProcessModel,
    g: &(dyn Fn(&[f64]) -> f64 + Sync),
    target: f64,
    horizons: &[f64],
    dt: f64,
    reps: usize,
    master_seed: u64,
    start: &Start,
) -> Result<ErgodicReport> {
    if reps < 2 {
        return Err(Error::validation("ergodic experiment needs reps >= 2"));
    }
    let mut rms = Vec::new();
    let mut mean = Vec::new();
    let mut std_err = Vec::new();
    for &t in horizons {
        let avgs = (0..reps)
            .into_par_iter()
            .map(|r| {
                let path = model.simulate(t, dt, start, None, replication_seed(master_seed, r as u64))?;
                Ok(ergodic_average(&path, g))
            })
            .collect::<Result<Vec<f64>>>()?;
        let (m, v) = mean_and_variance(&avgs);
        mean.push(m);
        std_err.push((v / reps as f64).sqrt());
        rms.push((avgs.iter().map(|a| (a - target).powi(2)).sum::<f64>() / reps as f64).sqrt());
    }
    let fit = if horizons.len() >= 3 && rms.iter().all(|r| *r > 0.0) {
        Some(fit_log_rate(horizons, &rms)?)
    } else {
        None
    };
    Ok(ErgodicReport {
        horizons: horizons.to_vec(),
        rms,
        mean,
        std_err,
        fit,
    })
}
