use crate::error::{Error, Result};

/// Regular lattice on an axis-aligned box, last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationGrid {
    lower: Vec<f64>,
    upper: Vec<f64>,
    points_per_axis: usize,
}

impl EvaluationGrid {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, points_per_axis: usize) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::validation("grid bounds must be non-empty vectors of equal length"));
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::validation("grid needs lower < upper on every axis"));
        }
        if points_per_axis < 2 {
            return Err(Error::validation("grid needs at least 2 points per axis"));
        }
        let total = (points_per_axis as f64).powi(lower.len() as i32);
        if total > 1e8 {
            return Err(Error::validation(format!("grid with {total} points is too large")));
        }
        Ok(EvaluationGrid {
            lower,
            upper,
            points_per_axis,
        })
    }

    /// The cube `[lo, hi]^d`.
    pub fn cube(dim: usize, lo: f64, hi: f64, points_per_axis: usize) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim], points_per_axis)
    }

    /// Smallest lattice on the box whose spacing is at most `max_spacing` on every axis.
    pub fn with_max_spacing(lower: Vec<f64>, upper: Vec<f64>, max_spacing: f64) -> Result<Self> {
        if !(max_spacing > 0.0) {
            return Err(Error::validation("spacing must be > 0"));
        }
        let widest = lower
            .iter()
            .zip(&upper)
            .map(|(a, b)| b - a)
            .fold(0.0, f64::max);
        let m = (widest / max_spacing).ceil() as usize + 1;
        Self::new(lower, upper, m.max(2))
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.points_per_axis - 1) as f64
    }

    /// Coordinate of lattice index `j` on `axis`; the last index hits `upper` exactly.
    #[inline]
    pub fn coord(&self, axis: usize, j: usize) -> f64 {
        if j + 1 == self.points_per_axis {
            self.upper[axis]
        } else {
            self.lower[axis] + j as f64 * self.spacing(axis)
        }
    }

    /// Coordinates of all lattice nodes on one axis.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.points_per_axis).map(|j| self.coord(axis, j)).collect()
    }

    /// Writes the point with flat index `idx` into `out`.
    pub fn point(&self, mut idx: usize, out: &mut [f64]) {
        let m = self.points_per_axis;
        for axis in (0..self.dim()).rev() {
            out[axis] = self.coord(axis, idx % m);
            idx /= m;
        }
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(|i| {
            let mut p = vec![0.0; self.dim()];
            self.point(i, &mut p);
            p
        })
    }

    /// Volume of one lattice cell.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Same lattice shifted by `v`.
    pub fn translated(&self, v: &[f64]) -> Result<Self> {
        let lower = self.lower.iter().zip(v).map(|(a, b)| a + b).collect();
        let upper = self.upper.iter().zip(v).map(|(a, b)| a + b).collect();
        Self::new(lower, upper, self.points_per_axis)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_layout() {
        let g = EvaluationGrid::new(vec![-1.0, 0.0], vec![1.0, 2.0], 3).unwrap();
        assert_eq!(g.len(), 9);
        let pts: Vec<Vec<f64>> = g.points().collect();
        assert_eq!(pts[0], vec![-1.0, 0.0]);
        assert_eq!(pts[1], vec![-1.0, 1.0]);
        assert_eq!(pts[8], vec![1.0, 2.0]);
        assert_eq!(g.spacing(0), 1.0);
    }

    #[test]
    fn rejects_bad_boxes() {
        assert!(EvaluationGrid::new(vec![0.0], vec![0.0], 5).is_err());
        assert!(EvaluationGrid::new(vec![0.0], vec![1.0], 1).is_err());
        assert!(EvaluationGrid::new(vec![0.0, 0.0], vec![1.0], 3).is_err());
    }

    #[test]
    fn spacing_bound_is_met() {
        let g = EvaluationGrid::with_max_spacing(vec![-1.0; 2], vec![1.0; 2], 0.03).unwrap();
        assert!(g.spacing(0) <= 0.03);
        assert!(g.spacing(0) > 0.02);
    }
}
