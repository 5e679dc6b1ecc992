use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::estimator::{DensityEstimate, EvaluationGrid};
use crate::linalg::Matrix;

/// A reference density used to measure estimation error.
pub type Reference = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// `N(mean, cov)` density.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianDensity {
    mean: Vec<f64>,
    precision: Matrix,
    norm: f64,
}

impl GaussianDensity {
    pub fn new(mean: Vec<f64>, cov: Matrix) -> Result<Self> {
        let d = mean.len();
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::validation("covariance shape does not match the mean"));
        }
        let chol = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::validation("covariance is not positive definite"))?;
        let det = chol.determinant();
        let precision = chol.inverse();
        let norm = 1.0 / ((2.0 * PI).powi(d as i32) * det).sqrt();
        Ok(GaussianDensity { mean, precision, norm })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.mean.len();
        let y: Vec<f64> = x.iter().zip(&self.mean).map(|(a, m)| a - m).collect();
        let mut q = 0.0;
        for i in 0..d {
            for j in 0..d {
                q += y[i] * self.precision[(i, j)] * y[j];
            }
        }
        self.norm * (-0.5 * q).exp()
    }

    pub fn into_reference(self) -> Reference {
        Arc::new(move |x| self.eval(x))
    }
}

/// Multilinear interpolation of values stored on an [`EvaluationGrid`];
/// exact at the lattice nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: EvaluationGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: EvaluationGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::validation("value count does not match the grid"));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_estimate(est: &DensityEstimate) -> Self {
        GridFunction {
            grid: est.grid.clone(),
            values: est.values.clone(),
        }
    }

    pub fn grid(&self) -> &EvaluationGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Interpolated value; points outside the box are clamped to it.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let d = self.grid.dim();
        let m = self.grid.points_per_axis();
        let mut base = vec![0usize; d];
        let mut frac = vec![0.0; d];
        for a in 0..d {
            let s = self.grid.spacing(a);
            let pos = ((x[a] - self.grid.lower()[a]) / s).clamp(0.0, (m - 1) as f64);
            let j = (pos.floor() as usize).min(m - 2);
            base[a] = j;
            frac[a] = pos - j as f64;
        }
        let mut total = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut flat = 0;
            for a in 0..d {
                let up = (corner >> (d - 1 - a)) & 1;
                w *= if up == 1 { frac[a] } else { 1.0 - frac[a] };
                flat = flat * m + base[a] + up;
            }
            if w != 0.0 {
                total += w * self.values[flat];
            }
        }
        total
    }

    pub fn into_reference(self) -> Reference {
        Arc::new(move |x| self.eval(x))
    }
}

/// `max_x |ρ̂(x) - reference(x)|` over the estimate's grid.
pub fn sup_norm_error(est: &DensityEstimate, reference: &dyn Fn(&[f64]) -> f64) -> f64 {
    let mut p = vec![0.0; est.grid.dim()];
    let mut worst = 0.0f64;
    for (i, v) in est.values.iter().enumerate() {
        est.grid.point(i, &mut p);
        worst = worst.max((v - reference(&p)).abs());
    }
    worst
}


#[cfg(test)]
mod tests {
    use super::*;

    fn est_with(values: Vec<f64>) -> DensityEstimate {
        let grid = EvaluationGrid::cube(2, -1.0, 1.0, 3).unwrap();
        DensityEstimate {
            grid,
            values,
            h: 0.5,
            horizon: 1.0,
            kernel_order: 1,
        }
    }

    #[test]
    fn sup_error_examples() {
        let g = GaussianDensity::new(vec![0.0, 0.0], Matrix::identity(2, 2) * 0.5).unwrap();
        let grid = EvaluationGrid::cube(2, -1.0, 1.0, 3).unwrap();
        let exact: Vec<f64> = grid.points().map(|p| g.eval(&p)).collect();
        assert_eq!(sup_norm_error(&est_with(exact.clone()), &|x| g.eval(x)), 0.0);
        let shifted: Vec<f64> = exact.iter().map(|v| v + 0.3).collect();
        assert!((sup_norm_error(&est_with(shifted), &|x| g.eval(x)) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn gaussian_matches_closed_form() {
        let g = GaussianDensity::new(vec![0.0, 0.0], Matrix::identity(2, 2) * 0.5).unwrap();
        let x = [0.3, -0.7];
        let want = (-(0.09 + 0.49f64)).exp() / PI;
        assert!((g.eval(&x) - want).abs() < 1e-15);
    }

    #[test]
    fn grid_function_is_exact_at_nodes_and_linear_between() {
        let grid = EvaluationGrid::cube(2, 0.0, 1.0, 5).unwrap();
        let vals: Vec<f64> = grid.points().map(|p| 2.0 * p[0] - p[1] + 0.5).collect();
        let f = GridFunction::new(grid.clone(), vals.clone()).unwrap();
        for (i, p) in grid.points().enumerate() {
            assert!((f.eval(&p) - vals[i]).abs() < 1e-14);
        }
        assert!((f.eval(&[0.33, 0.71]) - (0.66 - 0.71 + 0.5)).abs() < 1e-14);
    }
}
