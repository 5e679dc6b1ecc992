//! Increments of a d-dimensional Lévy process given by its generating triplet.
//!
//! Jumps come in three flavours: none, compound Poisson with a Gaussian or
//! point-mass jump law, and a radially symmetric Lévy density. For the
//! density family, jumps of norm at most `eps` are replaced by a Gaussian
//! with covariance [`small_jump_covariance`] and the remaining jumps are
//! simulated as a compound Poisson process with their compensator removed.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::quadrature::Rule;

/// Default truncation radius for small jumps of the density family.
pub const DEFAULT_SMALL_JUMP_EPS: f64 = 1e-2;

/// Partial sums beyond this value are reported as divergent.
/// Radius beyond which moment integrals are extrapolated rather than integrated.
const TAIL_RADIUS: f64 = 1e6;
const TAIL_BISECTIONS: u32 = 10;

pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Radially symmetric Lévy densities `ν(z) = g(‖z‖)`.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialDensity {
    /// `mass` times the `N(0, scale² I)` density.
    Gaussian { mass: f64, scale: f64 },
    /// Constant `height` on the closed ball of the given radius.
    UniformBall { height: f64, radius: f64 },
    /// Constant `height` on `{inner <= ‖z‖ <= outer}`.
    UniformShell { height: f64, inner: f64, outer: f64 },
    /// `c ‖z‖^{-d-alpha} exp(-decay ‖z‖)`, infinite activity.
    TemperedStable { c: f64, alpha: f64, decay: f64 },
}

impl RadialDensity {
    /// `ln value(r)`, finite wherever the density is positive and representable.
    fn log_value(&self, r: f64, dim: usize) -> f64 {
        match *self {
            RadialDensity::Gaussian { mass, scale } => {
                let s2 = scale * scale;
                mass.ln() - 0.5 * dim as f64 * (2.0 * PI * s2).ln() - r * r / (2.0 * s2)
            }
            RadialDensity::TemperedStable { c, alpha, decay } if r > 0.0 => {
                c.ln() - (dim as f64 + alpha) * r.ln() - decay * r
            }
            _ => self.value(r, dim).ln(),
        }
    }

    pub fn value(&self, r: f64, dim: usize) -> f64 {
        match *self {
            RadialDensity::Gaussian { mass, scale } => {
                let s2 = scale * scale;
                mass * (2.0 * PI * s2).powf(-(dim as f64) / 2.0) * (-r * r / (2.0 * s2)).exp()
            }
            RadialDensity::UniformBall { height, radius } => {
                if r <= radius {
                    height
                } else {
                    0.0
                }
            }
            RadialDensity::UniformShell {
                height,
                inner,
                outer,
            } => {
                if (inner..=outer).contains(&r) {
                    height
                } else {
                    0.0
                }
            }
            RadialDensity::TemperedStable { c, alpha, decay } => {
                if r <= 0.0 {
                    f64::INFINITY
                } else {
                    c * r.powf(-(dim as f64) - alpha) * (-decay * r).exp()
                }
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            RadialDensity::UniformBall { radius, .. } => vec![radius],
            RadialDensity::UniformShell { inner, outer, .. } => vec![inner, outer],
            _ => Vec::new(),
        }
    }

    fn outer_radius(&self) -> Option<f64> {
        match *self {
            RadialDensity::UniformBall { radius, .. } => Some(radius),
            RadialDensity::UniformShell { outer, .. } => Some(outer),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            RadialDensity::Gaussian { mass, scale } => mass > 0.0 && scale > 0.0,
            RadialDensity::UniformBall { height, radius } => height > 0.0 && radius > 0.0,
            RadialDensity::UniformShell {
                height,
                inner,
                outer,
            } => height > 0.0 && inner >= 0.0 && outer > inner,
            RadialDensity::TemperedStable { c, alpha, decay } => {
                c > 0.0 && alpha > 0.0 && alpha < 2.0 && decay >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::validation(format!("invalid Lévy density parameters {self:?}")))
        }
    }
}

/// Law of a single jump of a compound Poisson process.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpLaw {
    /// Centered Gaussian with the given covariance.
    Gaussian { cov: Matrix },
    /// Every jump equals `atom`.
    PointMass { atom: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum JumpMeasure {
    None,
    CompoundPoisson { rate: f64, law: JumpLaw },
    Density { density: RadialDensity, eps: f64 },
}

/// Declared moment properties of the jump measure, echoed by assumption reports.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MomentFlags {
    /// `η₀` for which `∫‖z‖² e^{η₀‖z‖} ν(dz) < ∞` is declared.
    pub exp_moment_eta0: Option<f64>,
    /// `p > 0` with `∫_{‖z‖>1} ‖z‖^p ν(dz) < ∞`.
    pub p_moment: Option<f64>,
    /// `α > 2` with `∫_{‖z‖>1} (log‖z‖)^α ν(dz) < ∞`.
    pub log_moment_alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpMeasureSpec {
    dim: usize,
    measure: JumpMeasure,
    flags: MomentFlags,
}

impl JumpMeasureSpec {
    pub fn new(dim: usize, measure: JumpMeasure, flags: MomentFlags) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("dimension must be at least 1"));
        }
        match &measure {
            JumpMeasure::None => {}
            JumpMeasure::CompoundPoisson { rate, law } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return Err(Error::validation("compound Poisson rate must be > 0"));
                }
                match law {
                    JumpLaw::Gaussian { cov } => {
                        if cov.nrows() != dim {
                            return Err(Error::validation("jump covariance dimension mismatch"));
                        }
                        linalg::check_psd(cov, "jump covariance")?;
                    }
                    JumpLaw::PointMass { atom } => {
                        if atom.len() != dim || atom.iter().any(|v| !v.is_finite()) {
                            return Err(Error::validation("jump atom dimension mismatch"));
                        }
                    }
                }
            }
            JumpMeasure::Density { density, eps } => {
                if !(*eps > 0.0) {
                    return Err(Error::validation("small-jump truncation eps must be > 0"));
                }
                density.validate()?;
            }
        }
        Ok(JumpMeasureSpec { dim, measure, flags })
    }

    pub fn none(dim: usize) -> Self {
        JumpMeasureSpec {
            dim,
            measure: JumpMeasure::None,
            flags: MomentFlags::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn measure(&self) -> &JumpMeasure {
        &self.measure
    }

    pub fn flags(&self) -> &MomentFlags {
        &self.flags
    }

    pub fn is_none(&self) -> bool {
        matches!(self.measure, JumpMeasure::None)
    }

    /// Lebesgue density of `ν` at `z`, or `None` when `ν` has no density.
    pub fn density_at(&self, z: &[f64]) -> Option<f64> {
        match &self.measure {
            JumpMeasure::None => Some(0.0),
            JumpMeasure::Density { density, .. } => Some(density.value(linalg::norm(z), self.dim)),
            JumpMeasure::CompoundPoisson { rate, law } => match law {
                JumpLaw::PointMass { .. } => None,
                JumpLaw::Gaussian { cov } => {
                    let chol = cov.clone().cholesky()?;
                    let zv = linalg::Vector::from_column_slice(z);
                    let y = chol.solve(&zv);
                    let quad = zv.dot(&y);
                    let det = chol.determinant();
                    let norm = (2.0 * PI).powf(self.dim as f64 / 2.0) * det.sqrt();
                    Some(rate * (-0.5 * quad).exp() / norm)
                }
            },
        }
    }
}

/// Generating triplet `(a, Q, ν)` of a Lévy process.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyTriplet {
    drift: Vec<f64>,
    gaussian_cov: Matrix,
    jumps: JumpMeasureSpec,
}

impl LevyTriplet {
    pub fn new(drift: Vec<f64>, gaussian_cov: Matrix, jumps: JumpMeasureSpec) -> Result<Self> {
        let d = drift.len();
        if d == 0 {
            return Err(Error::validation("dimension must be at least 1"));
        }
        if gaussian_cov.nrows() != d || gaussian_cov.ncols() != d {
            return Err(Error::validation("Gaussian covariance dimension mismatch"));
        }
        if jumps.dim() != d {
            return Err(Error::validation("jump measure dimension mismatch"));
        }
        linalg::check_psd(&gaussian_cov, "Gaussian covariance Q")?;
        Ok(LevyTriplet {
            drift,
            gaussian_cov,
            jumps,
        })
    }

    /// Brownian motion with covariance `q` and no drift or jumps.
    pub fn brownian(q: Matrix) -> Result<Self> {
        let d = q.nrows();
        LevyTriplet::new(vec![0.0; d], q, JumpMeasureSpec::none(d))
    }

    pub fn dim(&self) -> usize {
        self.drift.len()
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    pub fn gaussian_cov(&self) -> &Matrix {
        &self.gaussian_cov
    }

    pub fn jumps(&self) -> &JumpMeasureSpec {
        &self.jumps
    }
}

/// Value of a possibly divergent moment integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentIntegral {
    Finite(f64),
    /// The partial sum crossed [`DIVERGENCE_GUARD`].
    Diverged { partial: f64 },
}

impl MomentIntegral {
    pub fn is_finite(&self) -> bool {
        matches!(self, MomentIntegral::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            MomentIntegral::Finite(v) => Some(v),
            MomentIntegral::Diverged { .. } => None,
        }
    }
}

/// Surface area of the unit sphere in `R^d`.
pub fn unit_sphere_area(d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * unit_sphere_area(d - 2),
    }
}

/// `∫_{‖z‖≤eps} z zᵀ ν(dz)` for the density family.
pub fn small_jump_covariance(spec: &JumpMeasureSpec, eps: f64) -> Result<Matrix> {
    if !(eps > 0.0) {
        return Err(Error::validation("eps must be > 0"));
    }
    let JumpMeasure::Density { density, .. } = &spec.measure else {
        return Err(Error::validation(
            "small-jump covariance requires a density-family jump measure",
        ));
    };
    let d = spec.dim;
    let mut breaks = density.breakpoints();
    breaks.retain(|b| *b > 0.0 && *b < eps);
    // isotropy: ∫ z_i z_j ν = δ_ij/d ∫ ‖z‖² ν
    let radial = integrate_radial_ball(|r| r.powi(d as i32 + 1) * density.value(r, d), eps, &breaks)?;
    let s = unit_sphere_area(d) * radial / d as f64;
    Ok(Matrix::identity(d, d) * s)
}

/// `∫‖z‖² e^{η₀‖z‖} ν(dz)`, reporting divergence instead of failing.
pub fn exponential_moment_check(spec: &JumpMeasureSpec, eta0: f64) -> Result<MomentIntegral> {
    if !(eta0 > 0.0) {
        return Err(Error::validation("eta0 must be > 0"));
    }
    let d = spec.dim;
    match &spec.measure {
        JumpMeasure::None => Ok(MomentIntegral::Finite(0.0)),
        JumpMeasure::CompoundPoisson { rate, law } => match law {
            JumpLaw::PointMass { atom } => {
                let r = linalg::norm(atom);
                let v = rate * r * r * (eta0 * r).exp();
                Ok(guarded(v))
            }
            JumpLaw::Gaussian { cov } => {
                if let Some(s2) = isotropic_variance(cov) {
                    if s2 == 0.0 {
                        return Ok(MomentIntegral::Finite(0.0));
                    }
                    let g = RadialDensity::Gaussian {
                        mass: *rate,
                        scale: s2.sqrt(),
                    };
                    radial_moment(&g, d, 0.0, |r| 2.0 * r.ln() + eta0 * r)
                } else {
                    let e = gaussian_expectation(cov, 48, |z| {
                        let r = linalg::norm(z);
                        r * r * (eta0 * r).exp()
                    });
                    Ok(guarded(rate * e))
                }
            }
        },
        JumpMeasure::Density { density, .. } => {
            radial_moment(density, d, 0.0, |r| 2.0 * r.ln() + eta0 * r)
        }
    }
}

/// `∫_{‖z‖>radius} log‖z‖ ν(dz)`, the stationarity moment of Lévy-driven OU processes.
pub fn log_moment_beyond(spec: &JumpMeasureSpec, radius: f64) -> Result<MomentIntegral> {
    if !(radius >= 1.0) {
        return Err(Error::validation("radius must be >= 1"));
    }
    let d = spec.dim;
    match &spec.measure {
        JumpMeasure::None => Ok(MomentIntegral::Finite(0.0)),
        JumpMeasure::CompoundPoisson { rate, law } => match law {
            JumpLaw::PointMass { atom } => {
                let r = linalg::norm(atom);
                Ok(MomentIntegral::Finite(if r > radius { rate * r.ln() } else { 0.0 }))
            }
            JumpLaw::Gaussian { cov } => {
                let e = gaussian_expectation(cov, 48, |z| {
                    let r = linalg::norm(z);
                    if r > radius {
                        r.ln()
                    } else {
                        0.0
                    }
                });
                Ok(guarded(rate * e))
            }
        },
        JumpMeasure::Density { density, .. } => radial_moment(density, d, radius, |r| r.ln().ln()),
    }
}

fn guarded(v: f64) -> MomentIntegral {
    if v.is_finite() && v <= DIVERGENCE_GUARD {
        MomentIntegral::Finite(v)
    } else {
        MomentIntegral::Diverged { partial: v }
    }
}

fn isotropic_variance(cov: &Matrix) -> Option<f64> {
    let s2 = cov[(0, 0)];
    let d = cov.nrows();
    let iso = (0..d).all(|i| {
        (0..d).all(|j| {
            let want = if i == j { s2 } else { 0.0 };
            (cov[(i, j)] - want).abs() <= 1e-14 * s2.abs().max(1.0)
        })
    });
    iso.then_some(s2)
}

/// Probabilists' Gauss–Hermite rule (weights sum to one) via Golub–Welsch.
fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let jacobi = Matrix::from_fn(n, n, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64).sqrt()
        } else {
            0.0
        }
    });
    let eig = jacobi.symmetric_eigen();
    let nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let weights: Vec<f64> = (0..n).map(|k| eig.eigenvectors[(0, k)].powi(2)).collect();
    (nodes, weights)
}

/// `E[f(J)]` for `J ~ N(0, cov)` by a tensor Gauss–Hermite rule.
fn gaussian_expectation(cov: &Matrix, n: usize, f: impl Fn(&[f64]) -> f64) -> f64 {
    let d = cov.nrows();
    let l = linalg::row_major(&linalg::psd_sqrt(cov));
    let (nodes, weights) = gauss_hermite(n);
    let total = n.pow(d as u32);
    let mut xi = vec![0.0; d];
    let mut z = vec![0.0; d];
    let mut acc = 0.0;
    for flat in 0..total {
        let mut rem = flat;
        let mut w = 1.0;
        for x in xi.iter_mut() {
            let k = rem % n;
            rem /= n;
            *x = nodes[k];
            w *= weights[k];
        }
        linalg::mat_vec(&l, &xi, &mut z);
        acc += w * f(&z);
    }
    acc
}

const PANEL_ORDER: usize = 20;
const MAX_BISECTIONS: u32 = 24;

/// Adaptive Gauss–Legendre on `[a, b]` comparing a 20- and a 40-point rule.
fn adaptive_gl(f: &dyn Fn(f64) -> f64, a: f64, b: f64, coarse: &Rule, fine: &Rule, depth: u32) -> Result<f64> {
    adaptive_gl_atol(f, a, b, coarse, fine, depth, 1e-300)
}

/// As [`adaptive_gl`], also accepting panels whose error is below `atol`.
fn adaptive_gl_atol(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    coarse: &Rule,
    fine: &Rule,
    depth: u32,
    atol: f64,
) -> Result<f64> {
    let c = coarse.integrate(a, b, f);
    let v = fine.integrate(a, b, f);
    let diff = (v - c).abs();
    if diff <= 1e-12 * v.abs() || diff <= atol {
        return Ok(v);
    }
    if depth == 0 {
        if diff <= 1e-6 * v.abs() {
            return Ok(v);
        }
        return Err(Error::Numeric(format!(
            "quadrature on [{a:e}, {b:e}] did not converge (relative change {:e})",
            diff / v.abs().max(f64::MIN_POSITIVE)
        )));
    }
    let m = 0.5 * (a + b);
    Ok(adaptive_gl_atol(f, a, m, coarse, fine, depth - 1, 0.5 * atol)?
        + adaptive_gl_atol(f, m, b, coarse, fine, depth - 1, 0.5 * atol)?)
}

/// `∫_0^eps h(r) dr` with geometric panels toward the origin, where `h`
/// may carry an integrable power singularity at zero.
fn integrate_radial_ball(h: impl Fn(f64) -> f64, eps: f64, breaks: &[f64]) -> Result<f64> {
    let coarse = Rule::new(PANEL_ORDER);
    let fine = Rule::new(2 * PANEL_ORDER);
    let mut cuts: Vec<f64> = (0..=80).map(|k| eps * 0.5f64.powi(k)).collect();
    cuts.extend_from_slice(breaks);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    // innermost piece [0, a]: integrate the local power law h(r) ≈ C r^q exactly
    let a = cuts[0];
    let (ha, hh) = (h(a), h(0.5 * a));
    let mut total = if ha == 0.0 && hh == 0.0 {
        0.0
    } else {
        let q = (ha / hh).log2();
        if !(q > -1.0) || !q.is_finite() {
            return Err(Error::Numeric("integrand is not integrable at the origin".into()));
        }
        a * ha / (q + 1.0)
    };
    for w in cuts.windows(2) {
        total += adaptive_gl(&h, w[0], w[1], &coarse, &fine, MAX_BISECTIONS)?;
    }
    Ok(total)
}

/// `S_{d-1} ∫_{start}^∞ r^{d-1} g(r) f(r) dr` with the divergence guard.
fn radial_moment(
    density: &RadialDensity,
    d: usize,
    start: f64,
    log_f: impl Fn(f64) -> f64,
) -> Result<MomentIntegral> {
    let ln_area = unit_sphere_area(d).ln();
    let h = |r: f64| {
        let lv = density.log_value(r, d);
        if lv == f64::NEG_INFINITY {
            0.0
        } else {
            (ln_area + (d as f64 - 1.0) * r.ln() + lv + log_f(r)).exp()
        }
    };
    let coarse = Rule::new(PANEL_ORDER);
    let fine = Rule::new(2 * PANEL_ORDER);
    let mut total = 0.0;
    let mut lo = start;
    if start < 1.0 {
        let breaks: Vec<f64> = density
            .breakpoints()
            .into_iter()
            .filter(|b| *b > start && *b < 1.0)
            .collect();
        total += if start == 0.0 {
            integrate_radial_ball(h, 1.0, &breaks)?
        } else {
            let mut cuts = vec![start, 1.0];
            cuts.extend(breaks);
            cuts.sort_by(f64::total_cmp);
            let mut s = 0.0;
            for w in cuts.windows(2) {
                s += adaptive_gl(&h, w[0], w[1], &coarse, &fine, MAX_BISECTIONS)?;
            }
            s
        };
        lo = 1.0;
    }
    let outer = density.outer_radius();
    let breaks = density.breakpoints();
    let mut quiet = 0;
    let mut panels = (0.0f64, 0.0f64);
    while lo < TAIL_RADIUS {
        if outer.is_some_and(|o| lo >= o) {
            break;
        }
        let mut hi = 2.0 * lo;
        if let Some(o) = outer {
            hi = hi.min(o);
        }
        let mut cuts = vec![lo, hi];
        cuts.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
        cuts.sort_by(f64::total_cmp);
        if cuts.iter().any(|&r| !h(r).is_finite()) {
            return Ok(MomentIntegral::Diverged { partial: f64::INFINITY });
        }
        let atol = 1e-15 * total.abs();
        let mut panel = 0.0;
        for w in cuts.windows(2) {
            panel += adaptive_gl_atol(&h, w[0], w[1], &coarse, &fine, TAIL_BISECTIONS, atol)?;
        }
        total += panel;
        panels = (panels.1, panel);
        if !total.is_finite() || total.abs() > DIVERGENCE_GUARD {
            return Ok(MomentIntegral::Diverged { partial: total });
        }
        if panel.abs() <= 1e-16 * total.abs().max(f64::MIN_POSITIVE) {
            quiet += 1;
            if quiet >= 4 {
                break;
            }
        } else {
            quiet = 0;
        }
        lo = hi;
    }
    if lo >= TAIL_RADIUS && quiet < 4 {
        // geometric extrapolation of the doubling panels beyond the last radius
        let (prev, last) = panels;
        let q = last / prev;
        if !(q < 1.0) {
            return Ok(MomentIntegral::Diverged { partial: total });
        }
        total += last * q / (1.0 - q);
        if total.abs() > DIVERGENCE_GUARD {
            return Ok(MomentIntegral::Diverged { partial: total });
        }
    }
    Ok(MomentIntegral::Finite(total))
}

/// Inverse-CDF table for the norm of jumps larger than `eps`.
#[derive(Debug, Clone)]
struct RadialTable {
    radii: Vec<f64>,
    cdf: Vec<f64>,
}

impl RadialTable {
    fn build(density: &RadialDensity, d: usize, eps: f64) -> Result<(Self, f64)> {
        let area = unit_sphere_area(d);
        let h = |r: f64| area * r.powi(d as i32 - 1) * density.value(r, d);
        let coarse = Rule::new(PANEL_ORDER);
        let fine = Rule::new(2 * PANEL_ORDER);
        let upper = match density.outer_radius() {
            Some(o) => o,
            None => {
                // extend until the remaining tail is negligible
                let mut r = eps.max(1e-3) * 2.0;
                let mut mass = adaptive_gl(&h, eps, r, &coarse, &fine, MAX_BISECTIONS)?;
                loop {
                    let tail = adaptive_gl(&h, r, 2.0 * r, &coarse, &fine, MAX_BISECTIONS)?;
                    mass += tail;
                    r *= 2.0;
                    if tail <= 1e-14 * mass || r > 1e12 {
                        break;
                    }
                }
                r
            }
        };
        if upper <= eps {
            return Ok((
                RadialTable {
                    radii: vec![eps],
                    cdf: vec![0.0],
                },
                0.0,
            ));
        }
        const CELLS: usize = 4096;
        let ratio = (upper / eps).ln();
        let mut radii: Vec<f64> = (0..=CELLS)
            .map(|k| eps * (ratio * k as f64 / CELLS as f64).exp())
            .collect();
        radii.extend(density.breakpoints().into_iter().filter(|b| *b > eps && *b < upper));
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        let mut cdf = Vec::with_capacity(radii.len());
        cdf.push(0.0);
        let mut acc = 0.0;
        for w in radii.windows(2) {
            acc += coarse.integrate(w[0], w[1], h);
            cdf.push(acc);
        }
        Ok((RadialTable { radii, cdf }, acc))
    }

    fn sample_radius(&self, u: f64) -> f64 {
        let total = *self.cdf.last().unwrap_or(&0.0);
        let target = u * total;
        let k = self.cdf.partition_point(|c| *c < target).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[k - 1], self.cdf[k]);
        let (r0, r1) = (self.radii[k - 1], self.radii[k]);
        if c1 > c0 {
            r0 + (r1 - r0) * (target - c0) / (c1 - c0)
        } else {
            r0
        }
    }
}

#[derive(Debug, Clone)]
enum LargeJumps {
    Gaussian { factor: Vec<f64> },
    Atom { atom: Vec<f64> },
    Radial { table: RadialTable },
}

/// Samples the compensated jump part of a Lévy increment over a fixed `dt`.
#[derive(Debug, Clone)]
pub struct JumpSampler {
    dim: usize,
    count: Option<Poisson<f64>>,
    large: Option<LargeJumps>,
    /// `dt ∫_{‖z‖>eps} z ν(dz)`, removed from the large jumps.
    compensator: Vec<f64>,
    /// Square root of the small-jump Gaussian covariance times `dt`.
    small_factor: Option<Vec<f64>>,
}

impl JumpSampler {
    pub fn new(spec: &JumpMeasureSpec, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::validation("dt must be > 0"));
        }
        let d = spec.dim;
        if d > 8 {
            return Err(Error::validation("dimensions above 8 are not supported"));
        }
        let mut sampler = JumpSampler {
            dim: d,
            count: None,
            large: None,
            compensator: vec![0.0; d],
            small_factor: None,
        };
        match &spec.measure {
            JumpMeasure::None => {}
            JumpMeasure::CompoundPoisson { rate, law } => {
                sampler.count = Some(poisson(rate * dt)?);
                sampler.large = Some(match law {
                    JumpLaw::Gaussian { cov } => LargeJumps::Gaussian {
                        factor: linalg::row_major(&linalg::psd_sqrt(cov)),
                    },
                    JumpLaw::PointMass { atom } => {
                        for (c, a) in sampler.compensator.iter_mut().zip(atom) {
                            *c = rate * dt * a;
                        }
                        LargeJumps::Atom { atom: atom.clone() }
                    }
                });
            }
            JumpMeasure::Density { density, eps } => {
                let (table, mass) = RadialTable::build(density, d, *eps)?;
                if mass > 0.0 {
                    sampler.count = Some(poisson(mass * dt)?);
                    sampler.large = Some(LargeJumps::Radial { table });
                }
                // symmetric law: compensator of the large jumps vanishes
                let small = small_jump_covariance(spec, *eps)? * dt;
                if linalg::max_abs(&small) > 0.0 {
                    sampler.small_factor = Some(linalg::row_major(&linalg::psd_sqrt(&small)));
                }
            }
        }
        Ok(sampler)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Writes one compensated jump increment into `out` and returns the number of jumps.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> u64 {
        debug_assert_eq!(out.len(), self.dim);
        for (o, c) in out.iter_mut().zip(&self.compensator) {
            *o = -c;
        }
        let mut n = 0;
        if let (Some(count), Some(large)) = (&self.count, &self.large) {
            n = count.sample(rng) as u64;
            let d = self.dim;
            let mut xi = [0.0f64; 8];
            for _ in 0..n {
                match large {
                    LargeJumps::Gaussian { factor } => {
                        gaussian_into(rng, factor, d, &mut xi, out);
                    }
                    LargeJumps::Atom { atom } => {
                        for (o, a) in out.iter_mut().zip(atom) {
                            *o += a;
                        }
                    }
                    LargeJumps::Radial { table } => {
                        let r = table.sample_radius(rng.random::<f64>());
                        let dir = &mut xi[..d];
                        let mut nrm = 0.0;
                        while nrm == 0.0 {
                            for v in dir.iter_mut() {
                                *v = rng.sample(StandardNormal);
                            }
                            nrm = linalg::norm(dir);
                        }
                        for (o, v) in out.iter_mut().zip(dir.iter()) {
                            *o += r * v / nrm;
                        }
                    }
                }
            }
        }
        if let Some(factor) = &self.small_factor {
            let mut xi = [0.0f64; 8];
            gaussian_into(rng, factor, self.dim, &mut xi, out);
        }
        n
    }
}

fn poisson(mean: f64) -> Result<Poisson<f64>> {
    Poisson::new(mean).map_err(|e| Error::validation(format!("Poisson mean {mean}: {e}")))
}

/// `out += factor · ξ` with `ξ` standard normal; `factor` is row-major `d x d`.
#[inline]
fn gaussian_into<R: Rng + ?Sized>(rng: &mut R, factor: &[f64], d: usize, xi: &mut [f64; 8], out: &mut [f64]) {
    for v in xi[..d].iter_mut() {
        *v = rng.sample(StandardNormal);
    }
    for (i, o) in out.iter_mut().enumerate() {
        let row = &factor[i * d..(i + 1) * d];
        *o += row.iter().zip(&xi[..d]).map(|(a, b)| a * b).sum::<f64>();
    }
}

/// Samples full increments `Z_{t+dt} - Z_t` of a Lévy process.
#[derive(Debug, Clone)]
pub struct IncrementSampler {
    drift_dt: Vec<f64>,
    gaussian_factor: Option<Vec<f64>>,
    jumps: JumpSampler,
}

impl IncrementSampler {
    pub fn new(triplet: &LevyTriplet, dt: f64) -> Result<Self> {
        let jumps = JumpSampler::new(&triplet.jumps, dt)?;
        let q = triplet.gaussian_cov() * dt;
        let gaussian_factor = (linalg::max_abs(&q) > 0.0).then(|| linalg::row_major(&linalg::psd_sqrt(&q)));
        Ok(IncrementSampler {
            drift_dt: triplet.drift.iter().map(|a| a * dt).collect(),
            gaussian_factor,
            jumps,
        })
    }

    pub fn dim(&self) -> usize {
        self.drift_dt.len()
    }

    /// Writes one increment into `out`; returns the number of jumps it contains.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) -> u64 {
        let n = self.jumps.sample(rng, out);
        for (o, a) in out.iter_mut().zip(&self.drift_dt) {
            *o += a;
        }
        if let Some(factor) = &self.gaussian_factor {
            let mut xi = [0.0f64; 8];
            gaussian_into(rng, factor, self.dim(), &mut xi, out);
        }
        n
    }
}

/// One increment of length `dt`. Builds a sampler per call; prefer
/// [`IncrementSampler`] in loops.
pub fn sample_increment<R: Rng + ?Sized>(triplet: &LevyTriplet, dt: f64, rng: &mut R) -> Result<Vec<f64>> {
    let sampler = IncrementSampler::new(triplet, dt)?;
    let mut out = vec![0.0; triplet.dim()];
    sampler.sample(rng, &mut out);
    Ok(out)
}
