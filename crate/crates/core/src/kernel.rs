//! Compactly supported product kernels of prescribed order on `[-1/2, 1/2]^d`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::quadrature::Rule;

/// Half-width of the kernel support along each axis.
pub const SUPPORT_HALF_WIDTH: f64 = 0.5;

const MOMENT_NODES: usize = 200;

/// Univariate weight the kernel polynomial multiplies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// `(1 - 2|u|)_+`, continuous at the support boundary.
    Triangle,
    /// Indicator of `[-1/2, 1/2]`.
    Box,
}

/// `K(u) = Π_i K₁(u_i)` with `K₁(u) = p(u²) w(u)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    dim: usize,
    order: usize,
    profile: Profile,
    /// Coefficients `c_j` of `p(s) = Σ c_j s^j`.
    coeffs: Vec<f64>,
    lipschitz: f64,
    sup: f64,
}

impl Kernel {
    /// Uniform kernel `K ≡ 1` on the support, declared to have order `order`.
    pub fn uniform(dim: usize, order: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("kernel dimension must be >= 1"));
        }
        Ok(Kernel {
            dim,
            order,
            profile: Profile::Box,
            coeffs: vec![1.0],
            lipschitz: f64::INFINITY,
            sup: 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Lipschitz constant with respect to the sup-norm on `R^d`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Upper bound on `sup |K|`.
    pub fn sup_bound(&self) -> f64 {
        self.sup.powi(self.dim as i32)
    }

    /// Univariate factor `K₁(u)`.
    #[inline]
    pub fn eval_1d(&self, u: f64) -> f64 {
        let a = u.abs();
        if a > SUPPORT_HALF_WIDTH {
            return 0.0;
        }
        let w = match self.profile {
            Profile::Triangle => 1.0 - 2.0 * a,
            Profile::Box => 1.0,
        };
        let s = u * u;
        let mut p = 0.0;
        for c in self.coeffs.iter().rev() {
            p = p * s + c;
        }
        p * w
    }

    /// `K(u)`; zero outside the support.
    pub fn eval(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim);
        let mut v = 1.0;
        for &x in u {
            v *= self.eval_1d(x);
            if v == 0.0 {
                return 0.0;
            }
        }
        v
    }
}

/// Moment matrix entry `∫ u^{2n} (1 - 2|u|) du` over the support.
fn triangle_moment(n: usize) -> f64 {
    0.25f64.powi(n as i32) / ((2 * n + 1) as f64 * (2 * n + 2) as f64)
}

/// Product kernel of order `ell` in dimension `dim`.
///
/// Even orders are rounded up to the next odd order, which a symmetric
/// kernel attains anyway.
pub fn build_order_kernel(dim: usize, ell: usize) -> Result<Kernel> {
    if dim == 0 {
        return Err(Error::validation("kernel dimension must be >= 1"));
    }
    if ell == 0 {
        return Err(Error::validation("kernel order must be >= 1"));
    }
    let order = if ell.is_multiple_of(2) {
        log::info!("kernel order {ell} rounded up to {}", ell + 1);
        ell + 1
    } else {
        ell
    };
    let m = (order - 1) / 2 + 1;
    let a = DMatrix::from_fn(m, m, |j, i| triangle_moment(i + j));
    let mut rhs = DVector::zeros(m);
    rhs[0] = 1.0;
    let coeffs = a
        .lu()
        .solve(&rhs)
        .filter(|c| c.iter().all(|v| v.is_finite()))
        .ok_or_else(|| Error::Numeric(format!("singular moment system for order {order}")))?;
    let coeffs: Vec<f64> = coeffs.iter().copied().collect();

    // q(u) = p(u²)(1 - 2u) = Σ a_k u^k on [0, 1/2]
    let mut a_k = vec![0.0; 2 * m];
    for (j, c) in coeffs.iter().enumerate() {
        a_k[2 * j] += c;
        a_k[2 * j + 1] -= 2.0 * c;
    }
    let l1: f64 = a_k
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, a)| (k as f64 * a).abs() * SUPPORT_HALF_WIDTH.powi(k as i32 - 1))
        .sum();
    let m1: f64 = a_k
        .iter()
        .enumerate()
        .map(|(k, a)| a.abs() * SUPPORT_HALF_WIDTH.powi(k as i32))
        .sum();
    let lipschitz = dim as f64 * l1 * m1.powi(dim as i32 - 1);
    Ok(Kernel {
        dim,
        order,
        profile: Profile::Triangle,
        coeffs,
        lipschitz,
        sup: m1,
    })
}

/// One moment `∫ u^α K(u) du` with its target value.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEntry {
    pub alpha: Vec<usize>,
    pub value: f64,
    pub target: f64,
}

impl MomentEntry {
    pub fn deviation(&self) -> f64 {
        (self.value - self.target).abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub entries: Vec<MomentEntry>,
    pub tol: f64,
}

impl MomentReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.deviation() <= self.tol)
    }

    /// Entry with the largest deviation from its target.
    pub fn worst(&self) -> &MomentEntry {
        self.entries
            .iter()
            .max_by(|a, b| a.deviation().total_cmp(&b.deviation()))
            .expect("report always holds the zeroth moment")
    }

    pub fn get(&self, alpha: &[usize]) -> Option<&MomentEntry> {
        self.entries.iter().find(|e| e.alpha == alpha)
    }
}

/// Univariate moments `∫ u^k K₁(u) du`, `k = 0..=max_k`, by Gauss–Legendre
/// on each half-axis.
pub fn univariate_moments(k: &Kernel, max_k: usize) -> Vec<f64> {
    let rule = Rule::new(MOMENT_NODES);
    let mut out = vec![0.0; max_k + 1];
    for (a, b) in [(-SUPPORT_HALF_WIDTH, 0.0), (0.0, SUPPORT_HALF_WIDTH)] {
        for (x, w) in rule.mapped(a, b) {
            let kv = w * k.eval_1d(x);
            let mut p = 1.0;
            for m in out.iter_mut() {
                *m += kv * p;
                p *= x;
            }
        }
    }
    out
}

/// Checks `∫K = 1` and `∫u^α K = 0` for `1 <= |α| <= order`.
///
/// The tensor Gauss–Legendre rule factorizes over axes for product kernels,
/// so each multivariate moment is the product of univariate ones.
pub fn verify_moments(k: &Kernel, tol: f64) -> Result<MomentReport> {
    if !(tol > 0.0) {
        return Err(Error::validation("tolerance must be > 0"));
    }
    let ell = k.order;
    let m1 = univariate_moments(k, ell);
    let mut entries = Vec::new();
    let mut alpha = vec![0usize; k.dim];
    loop {
        let total: usize = alpha.iter().sum();
        if total <= ell {
            let value = alpha.iter().map(|&a| m1[a]).product();
            entries.push(MomentEntry {
                alpha: alpha.clone(),
                value,
                target: if total == 0 { 1.0 } else { 0.0 },
            });
        }
        // odometer over {0..=ell}^d
        let mut i = 0;
        while i < k.dim {
            alpha[i] += 1;
            if alpha[i] <= ell {
                break;
            }
            alpha[i] = 0;
            i += 1;
        }
        if i == k.dim {
            break;
        }
    }
    Ok(MomentReport { entries, tol })
}
