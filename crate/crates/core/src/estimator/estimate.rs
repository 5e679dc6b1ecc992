use rayon::prelude::*;

use super::grid::EvaluationGrid;
use crate::error::{Error, Result};
use crate::kernel::{Kernel, SUPPORT_HALF_WIDTH};
use crate::models::SamplePath;

const MAX_CHUNKS: usize = 64;
const MIN_CHUNK_LEN: usize = 4096;
const MAX_ACCUMULATOR_VALUES: usize = 1 << 23;

/// `ρ̂_{h,T}` on an evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    pub grid: EvaluationGrid,
    pub values: Vec<f64>,
    pub h: f64,
    pub horizon: f64,
    pub kernel_order: usize,
}

impl DensityEstimate {
    /// Largest value on the grid.
    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_x |ρ̂(x) - other(x)|` over the shared grid.
    pub fn sup_distance(&self, other: &DensityEstimate) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::validation("estimates live on different grids"));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Trapezoid-rule integral over the grid box.
    pub fn trapezoid_mass(&self) -> f64 {
        let d = self.grid.dim();
        let m = self.grid.points_per_axis();
        let mut total = 0.0;
        let mut idx = vec![0usize; d];
        for v in &self.values {
            let w: f64 = idx
                .iter()
                .map(|&j| if j == 0 || j + 1 == m { 0.5 } else { 1.0 })
                .product();
            total += w * v;
            for a in (0..d).rev() {
                idx[a] += 1;
                if idx[a] < m {
                    break;
                }
                idx[a] = 0;
            }
        }
        total * self.grid.cell_volume()
    }
}

fn check_inputs(k: &Kernel, h: f64, dim: usize, grid: &EvaluationGrid) -> Result<()> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::validation(format!("bandwidth must lie in (0, 1], got {h}")));
    }
    if k.dim() != dim || grid.dim() != dim {
        return Err(Error::validation(format!(
            "dimension mismatch: path {dim}, kernel {}, grid {}",
            k.dim(),
            grid.dim()
        )));
    }
    Ok(())
}

/// Unnormalized kernel sums `Σ_i K((x - X_i)/h)` on the grid, over a block of
/// row-major points, visiting only grid nodes inside each point's support.
fn accumulate(points: &[f64], k: &Kernel, h: f64, grid: &EvaluationGrid, acc: &mut [f64]) {
    let d = grid.dim();
    let m = grid.points_per_axis();
    let reach = SUPPORT_HALF_WIDTH * h;
    let mut lo = vec![0usize; d];
    let mut len = vec![0usize; d];
    let mut weights: Vec<Vec<f64>> = vec![Vec::with_capacity(64); d];
    let mut idx = vec![0usize; d];
    let mut partial = vec![0.0f64; d + 1];
    'points: for x in points.chunks_exact(d) {
        for a in 0..d {
            let s = grid.spacing(a);
            let l = grid.lower()[a];
            let first = ((x[a] - reach - l) / s).ceil() - 1.0;
            let last = ((x[a] + reach - l) / s).floor() + 1.0;
            if last < 0.0 || first > (m - 1) as f64 || !first.is_finite() || !last.is_finite() {
                continue 'points;
            }
            let first = first.max(0.0) as usize;
            let last = (last as usize).min(m - 1);
            lo[a] = first;
            len[a] = last - first + 1;
            let w = &mut weights[a];
            w.clear();
            for j in first..=last {
                w.push(k.eval_1d((grid.coord(a, j) - x[a]) / h));
            }
        }
        // odometer over the local box with running products
        idx.iter_mut().for_each(|i| *i = 0);
        partial[0] = 1.0;
        for a in 0..d {
            partial[a + 1] = partial[a] * weights[a][0];
        }
        loop {
            let v = partial[d];
            if v != 0.0 {
                let mut flat = 0;
                for a in 0..d {
                    flat = flat * m + lo[a] + idx[a];
                }
                acc[flat] += v;
            }
            let mut a = d;
            loop {
                if a == 0 {
                    continue 'points;
                }
                a -= 1;
                idx[a] += 1;
                if idx[a] < len[a] {
                    break;
                }
                idx[a] = 0;
            }
            for b in a..d {
                partial[b + 1] = partial[b] * weights[b][idx[b]];
            }
        }
    }
}

/// Kernel estimate from `n` row-major points of dimension `grid.dim()`.
///
/// Work is split into chunks whose boundaries depend only on `n` and the grid
/// size, and partial sums are merged in chunk order, so the result does not
/// depend on the number of worker threads.
pub fn estimate_from_points(points: &[f64], k: &Kernel, h: f64, grid: &EvaluationGrid) -> Result<Vec<f64>> {
    let d = grid.dim();
    check_inputs(k, h, d, grid)?;
    if points.is_empty() || !points.len().is_multiple_of(d) {
        return Err(Error::validation("point set is empty or ragged"));
    }
    let n = points.len() / d;
    let cells = grid.len();
    let max_chunks = (MAX_ACCUMULATOR_VALUES / cells).clamp(1, MAX_CHUNKS);
    let chunk_len = n.div_ceil(max_chunks).max(MIN_CHUNK_LEN);
    let partials: Vec<Vec<f64>> = points
        .par_chunks(chunk_len * d)
        .map(|block| {
            let mut acc = vec![0.0; cells];
            accumulate(block, k, h, grid, &mut acc);
            acc
        })
        .collect();
    let mut iter = partials.into_iter();
    let mut total = iter.next().expect("at least one chunk");
    for p in iter {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    let scale = 1.0 / (n as f64 * h.powi(d as i32));
    for v in total.iter_mut() {
        *v *= scale;
    }
    Ok(total)
}

fn warn_coarse_dt(path: &SamplePath, h: f64) {
    if path.dt() > h / 10.0 {
        log::warn!("time step {} exceeds h/10 = {}; Riemann error may dominate", path.dt(), h / 10.0);
    }
}

/// `ρ̂_{h,T}(x) = (1/n) Σ_{i<n} h^{-d} K((x - X_{t_i})/h)` on every grid point.
pub fn estimate_density(path: &SamplePath, k: &Kernel, h: f64, grid: &EvaluationGrid) -> Result<DensityEstimate> {
    warn_coarse_dt(path, h);
    let values = estimate_from_points(path.left_points(), k, h, grid)?;
    Ok(DensityEstimate {
        grid: grid.clone(),
        values,
        h,
        horizon: path.horizon(),
        kernel_order: k.order(),
    })
}

/// `ρ̂_{h,T}(x)` at a single point by direct summation.
pub fn estimate_at(path: &SamplePath, k: &Kernel, h: f64, x: &[f64]) -> Result<f64> {
    let d = path.dim();
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::validation(format!("bandwidth must lie in (0, 1], got {h}")));
    }
    if x.len() != d || k.dim() != d {
        return Err(Error::validation("dimension mismatch"));
    }
    warn_coarse_dt(path, h);
    let pts = path.left_points();
    let n = pts.len() / d;
    let mut u = vec![0.0; d];
    let mut s = 0.0;
    for p in pts.chunks_exact(d) {
        for a in 0..d {
            u[a] = (x[a] - p[a]) / h;
        }
        s += k.eval(&u);
    }
    Ok(s / (n as f64 * h.powi(d as i32)))
}
