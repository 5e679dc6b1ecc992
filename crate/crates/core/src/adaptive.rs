//! Lepski-type data-driven bandwidth selection on a geometric grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
pub use crate::estimator::iterated_log;
use crate::estimator::{estimate_density, sigma_proxy, DensityEstimate, EvaluationGrid};
use crate::kernel::Kernel;
use crate::models::SamplePath;


/// Candidate bandwidths `η^{-l}`, `l = 0, 1, ...`, above the threshold
/// `(log_(k)T (log T)^5 / T)^{1/(d+2)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthGrid {
    pub eta: f64,
    pub k: usize,
    pub dim: usize,
    pub horizon: f64,
    pub threshold: f64,
    /// Strictly decreasing, starting at 1.
    pub bandwidths: Vec<f64>,
}

impl BandwidthGrid {
    pub fn h_min(&self) -> f64 {
        *self.bandwidths.last().expect("grid is never empty")
    }

    pub fn len(&self) -> usize {
        self.bandwidths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bandwidths.is_empty()
    }
}

/// Lower threshold of the candidate set.
pub fn grid_threshold(t: f64, d: usize, k: usize) -> Result<f64> {
    let lk = iterated_log(t, k)?;
    let lt = t.ln();
    Ok((lk * lt.powi(5) / t).powf(1.0 / (d as f64 + 2.0)))
}

pub fn build_grid(t: f64, d: usize, eta: f64, k: usize) -> Result<BandwidthGrid> {
    if !(eta > 1.0 && eta.is_finite()) {
        return Err(Error::validation(format!("eta must be > 1, got {eta}")));
    }
    if d == 0 {
        return Err(Error::validation("dimension must be >= 1"));
    }
    if k == 0 {
        return Err(Error::validation("iterated log order k must be >= 1"));
    }
    let threshold = grid_threshold(t, d, k)?;
    if threshold >= 1.0 {
        return Err(Error::EmptyGrid { threshold, horizon: t });
    }
    let mut bandwidths = Vec::new();
    let mut l = 0i32;
    loop {
        let h = eta.powi(-l);
        if !(h > threshold) {
            break;
        }
        bandwidths.push(h);
        l += 1;
    }
    Ok(BandwidthGrid {
        eta,
        k,
        dim: d,
        horizon: t,
        threshold,
        bandwidths,
    })
}

/// One comparison `‖ρ̂_h - ρ̂_g‖ ≤ √max_est · σ(g, T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairStat {
    pub h: f64,
    pub g: f64,
    pub diff_sup: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace {
    pub selected_h: f64,
    /// Grid sup of `ρ̂_{h_min}`, clamped at zero.
    pub max_est: f64,
    /// True when the raw grid sup was negative and got clamped.
    pub clamped: bool,
    pub pairs: Vec<PairStat>,
    /// Per candidate, in grid order: whether all comparisons with `g <= h` passed.
    pub qualifies: Vec<(f64, bool)>,
}

/// Selection from precomputed estimates, one per grid bandwidth in grid order.
pub fn select_from_estimates(grid: &BandwidthGrid, estimates: &[DensityEstimate]) -> Result<SelectionTrace> {
    if grid.is_empty() || estimates.len() != grid.len() {
        return Err(Error::validation("need exactly one estimate per grid bandwidth"));
    }
    let raw_max = estimates.last().expect("non-empty").max();
    let clamped = raw_max < 0.0;
    if clamped {
        log::info!("sup of the finest estimate is {raw_max} < 0; clamped to 0");
    }
    let max_est = raw_max.max(0.0);
    let root = max_est.sqrt();
    let sigmas = grid
        .bandwidths
        .iter()
        .map(|&g| sigma_proxy(g, grid.horizon, grid.dim, grid.k))
        .collect::<Result<Vec<_>>>()?;

    let mut pairs = Vec::new();
    let mut qualifies = Vec::with_capacity(grid.len());
    for (i, &h) in grid.bandwidths.iter().enumerate() {
        let mut ok = true;
        for j in i..grid.len() {
            let g = grid.bandwidths[j];
            let diff_sup = estimates[i].sup_distance(&estimates[j])?;
            let threshold = root * sigmas[j];
            let pass = diff_sup <= threshold;
            ok &= pass;
            pairs.push(PairStat {
                h,
                g,
                diff_sup,
                threshold,
                pass,
            });
        }
        qualifies.push((h, ok));
    }
    let selected_h = qualifies
        .iter()
        .find(|(_, ok)| *ok)
        .map(|(h, _)| *h)
        .unwrap_or_else(|| grid.h_min());
    Ok(SelectionTrace {
        selected_h,
        max_est,
        clamped,
        pairs,
        qualifies,
    })
}

/// Estimates for every grid bandwidth, in grid order.
pub fn grid_estimates(
    path: &SamplePath,
    k: &Kernel,
    grid: &BandwidthGrid,
    eval_grid: &EvaluationGrid,
) -> Result<Vec<DensityEstimate>> {
    grid.bandwidths
        .par_iter()
        .map(|&h| estimate_density(path, k, h, eval_grid))
        .collect()
}

/// `ĥ_T`: the largest `h` in the grid with `‖ρ̂_h - ρ̂_g‖ ≤ √‖ρ̂_{h_min}‖ σ(g,T)` for all `g <= h`.
pub fn select_bandwidth(
    path: &SamplePath,
    k: &Kernel,
    grid: &BandwidthGrid,
    eval_grid: &EvaluationGrid,
) -> Result<SelectionTrace> {
    if grid.dim != path.dim() {
        return Err(Error::validation("bandwidth grid and path dimensions differ"));
    }
    let rel = (grid.horizon - path.horizon()).abs() / path.horizon();
    if rel > 1e-9 {
        log::warn!("bandwidth grid built for T = {} but path horizon is {}", grid.horizon, path.horizon());
    }
    if path.dt() > grid.h_min() / 10.0 {
        log::warn!("dt = {} exceeds h_min/10 = {}", path.dt(), grid.h_min() / 10.0);
    }
    let estimates = grid_estimates(path, k, grid, eval_grid)?;
    select_from_estimates(grid, &estimates)
}
