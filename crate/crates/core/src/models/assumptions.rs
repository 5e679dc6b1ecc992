use rand::Rng;
use rand_distr::StandardNormal;

use super::jump_sde::JumpSdeModel;
use super::ou::OuModel;
use crate::error::{Error, Result};
use crate::levy::{exponential_moment_check, log_moment_beyond, MomentIntegral};
use crate::linalg;
use crate::rng::{rng_from_seed, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Informational entry that neither passes nor fails.
    Info,
}

/// A single assumption check with its worst sampled witness value.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionCheck {
    pub name: String,
    pub status: CheckStatus,
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
}

impl AssumptionReport {
    fn push(&mut self, name: &str, status: CheckStatus, value: f64, detail: impl Into<String>) {
        self.checks.push(AssumptionCheck {
            name: name.to_string(),
            status,
            value,
            detail: detail.into(),
        });
    }

    /// True when no check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AssumptionCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }
}

fn pass_if(ok: bool) -> CheckStatus {
    if ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    }
}

fn random_direction(rng: &mut SimRng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = linalg::norm(&v);
        if n > 1e-8 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn on_sphere(rng: &mut SimRng, d: usize, r: f64) -> Vec<f64> {
    random_direction(rng, d).into_iter().map(|x| x * r).collect()
}

fn matrix_sup(m: &[f64]) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Sampled checks of the jump SDE coefficient conditions.
///
/// `radius_grid` lists the sphere radii used for the drift and coefficient
/// samples; an empty grid defaults to `c2 · {1, 2, 4, 8, 16}`. Lipschitz
/// and boundedness entries are sampled estimates: a pass means no sampled
/// violation.
pub fn validate_jump_assumptions(
    model: &JumpSdeModel,
    sample_count: usize,
    radius_grid: &[f64],
    seed: u64,
) -> Result<AssumptionReport> {
    if sample_count < 100 {
        return Err(Error::validation("sample_count must be >= 100"));
    }
    if radius_grid.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::validation("radius grid entries must be positive"));
    }
    let d = model.dim();
    let c = *model.constants();
    let mut rng = rng_from_seed(seed);
    let mut report = AssumptionReport::default();
    let radii: Vec<f64> = if radius_grid.is_empty() {
        [1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|k| k * c.c2).collect()
    } else {
        radius_grid.to_vec()
    };
    let per_radius = sample_count.div_ceil(radii.len()).max(1);
    let mut b = vec![0.0; d];

    // drift dissipativity on spheres of radius >= c2
    let mut worst = f64::NEG_INFINITY;
    let mut worst_x = 0.0;
    for &r in radii.iter().filter(|&&r| r >= c.c2) {
        for _ in 0..per_radius {
            let x = on_sphere(&mut rng, d, r);
            model.drift().eval(&x, &mut b);
            let margin = x.iter().zip(&b).map(|(a, c)| a * c).sum::<f64>() + c.c1 * r;
            if margin > worst {
                worst = margin;
                worst_x = r;
            }
        }
    }
    if worst == f64::NEG_INFINITY {
        report.push("drift_dissipativity", CheckStatus::Fail, f64::NAN, "no sample radius >= c2");
    } else {
        let tol = 1e-12 * (1.0 + worst_x);
        report.push(
            "drift_dissipativity",
            pass_if(worst <= tol),
            worst,
            format!("max <x,b(x)> + c1|x| at |x|={worst_x}"),
        );
    }

    // uniform ellipticity of σσᵀ
    let mut lmin = f64::INFINITY;
    let mut lmax = 0.0f64;
    let mut sample_points: Vec<Vec<f64>> = vec![vec![0.0; d]];
    for &r in &radii {
        for _ in 0..per_radius {
            sample_points.push(on_sphere(&mut rng, d, r));
        }
    }
    for x in &sample_points {
        let s = model.sigma().eval_matrix(x);
        let ev = linalg::symmetric_eigenvalues(&(&s * s.transpose()));
        lmin = lmin.min(ev[0]);
        lmax = lmax.max(ev[d - 1]);
    }
    if lmin <= 1e-12 {
        report.push("ellipticity", CheckStatus::Fail, lmin, "smallest eigenvalue of sigma sigma^T");
    } else {
        let cst = lmax.max(1.0 / lmin).max(1.0);
        report.push(
            "ellipticity",
            pass_if(cst.is_finite()),
            cst,
            format!("eigenvalues in [{lmin}, {lmax}]"),
        );
    }

    // sampled Lipschitz ratios
    let rmax = radii.iter().cloned().fold(0.0, f64::max);
    let mut lip = |name: &str, f: &dyn Fn(&[f64], &mut [f64]), len: usize, rng: &mut SimRng| {
        let mut fa = vec![0.0; len];
        let mut fb = vec![0.0; len];
        let mut worst = 0.0f64;
        for i in 0..sample_count {
            let r = rmax * rng.random::<f64>();
            let x = on_sphere(rng, d, r);
            let scale = 10f64.powi(-((i % 4) as i32));
            let dir = random_direction(rng, d);
            let y: Vec<f64> = x.iter().zip(&dir).map(|(a, u)| a + scale * u).collect();
            f(&x, &mut fa);
            f(&y, &mut fb);
            let diff: f64 = fa.iter().zip(&fb).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            worst = worst.max(diff / scale);
        }
        report.push(name, pass_if(worst.is_finite()), worst, "sampled finite-difference ratio");
    };
    lip("lipschitz_b", &|x, o| model.drift().eval(x, o), d, &mut rng);
    lip("lipschitz_sigma", &|x, o| model.sigma().eval(x, o), d * d, &mut rng);
    lip("lipschitz_gamma", &|x, o| model.gamma().eval(x, o), d * d, &mut rng);

    // boundedness of b and γ: compare sup over an outer shell with the sampled region
    let mut bounded = |name: &str, f: &dyn Fn(&[f64]) -> f64, rng: &mut SimRng| {
        let inner = sample_points.iter().map(|x| f(x)).fold(0.0f64, f64::max);
        let mut outer = 0.0f64;
        for k in 1..=4 {
            let r = rmax * 10f64.powi(k);
            for _ in 0..per_radius.min(64) {
                outer = outer.max(f(&on_sphere(rng, d, r)));
            }
        }
        let ok = outer.is_finite() && outer <= 10.0 * inner + 1e-12;
        report.push(name, pass_if(ok), outer, format!("sup at radius up to {} vs {inner} inside", rmax * 1e4));
    };
    bounded(
        "bounded_b",
        &|x| {
            let mut o = vec![0.0; d];
            model.drift().eval(x, &mut o);
            linalg::norm(&o)
        },
        &mut rng,
    );
    bounded(
        "bounded_gamma",
        &|x| {
            let mut o = vec![0.0; d * d];
            model.gamma().eval(x, &mut o);
            matrix_sup(&o)
        },
        &mut rng,
    );

    // ν absolutely continuous and κ_α(x, z) = ‖γ(x)z‖^{d+α} ν(z) bounded
    let jumps = model.jumps();
    let probe = vec![0.5; d];
    match jumps.density_at(&probe) {
        None => {
            report.push("absolute_continuity", CheckStatus::Fail, f64::NAN, "jump measure has an atom");
            report.push("kappa_bounded", CheckStatus::Fail, f64::NAN, "no Lebesgue density");
        }
        Some(_) => {
            report.push("absolute_continuity", CheckStatus::Pass, 0.0, "Lebesgue density available");
            let z_radii: Vec<f64> = (0..=50).map(|i| 1e-3 * 10f64.powf(5.0 * i as f64 / 50.0)).collect();
            let mut sup_at = vec![0.0f64; z_radii.len()];
            let mut g = vec![0.0; d * d];
            let mut gz = vec![0.0; d];
            for x in sample_points.iter().step_by((sample_points.len() / 32).max(1)) {
                model.gamma().eval(x, &mut g);
                for (k, &r) in z_radii.iter().enumerate() {
                    for _ in 0..4 {
                        let z = on_sphere(&mut rng, d, r);
                        linalg::mat_vec(&g, &z, &mut gz);
                        let nu = jumps.density_at(&z).unwrap_or(f64::NAN);
                        let v = linalg::norm(&gz).powf(d as f64 + c.alpha) * nu;
                        sup_at[k] = sup_at[k].max(if v.is_nan() { f64::INFINITY } else { v });
                    }
                }
            }
            let sup = sup_at.iter().cloned().fold(0.0, f64::max);
            let n = sup_at.len();
            let rising_inner = sup_at[0] > 0.0 && sup_at[0] >= sup_at[1] && sup_at[1] >= sup_at[2] && sup_at[0] > 1.5 * sup_at[5];
            let rising_outer = sup_at[n - 1] > 0.0 && sup_at[n - 1] > 1.5 * sup_at[n - 6];
            let ok = sup.is_finite() && !rising_inner && !rising_outer;
            report.push("kappa_bounded", pass_if(ok), sup, "sup over |z| in [1e-3, 1e2]");
        }
    }

    match exponential_moment_check(jumps, c.eta0)? {
        MomentIntegral::Finite(v) => report.push("exponential_moment", CheckStatus::Pass, v, "finite"),
        MomentIntegral::Diverged { partial } => {
            report.push("exponential_moment", CheckStatus::Fail, partial, "integral diverged")
        }
    }
    Ok(report)
}

/// Rank, stability and moment checks for a Lévy-driven OU model.
pub fn validate_ou_assumptions(model: &OuModel) -> Result<AssumptionReport> {
    let mut report = AssumptionReport::default();
    let d = model.dim();
    let noise = model.noise();
    let q = noise.gaussian_cov();
    let rank = linalg::numeric_rank(q, 1e-10);
    report.push("rank_q", pass_if(rank == d), rank as f64, format!("numeric rank of Q, d={d}"));

    let re = linalg::min_real_eigenvalue(model.b());
    report.push("b_stable", pass_if(re > 1e-10), re, "smallest real part of eig(B)");

    match log_moment_beyond(noise.jumps(), 2.0)? {
        MomentIntegral::Finite(v) => report.push("stationarity_log_moment", CheckStatus::Pass, v, "finite"),
        MomentIntegral::Diverged { partial } => {
            report.push("stationarity_log_moment", CheckStatus::Fail, partial, "integral diverged")
        }
    }

    let flags = noise.jumps().flags();
    let p = flags.p_moment;
    let alpha = flags.log_moment_alpha;
    report.push(
        "p_moment",
        CheckStatus::Info,
        p.unwrap_or(f64::NAN),
        if p.is_some() { "declared finite" } else { "not declared" },
    );
    report.push(
        "log_moment",
        CheckStatus::Info,
        alpha.unwrap_or(f64::NAN),
        if alpha.is_some() { "declared finite" } else { "not declared" },
    );
    let full_rank = rank == d;
    let moment = full_rank && p.is_some_and(|p| p > 0.0);
    report.push(
        "scenario_moment",
        if moment { CheckStatus::Pass } else { CheckStatus::Info },
        d as f64,
        if moment { "applicable in any dimension" } else { "not applicable" },
    );
    let log_scen = full_rank && d == 1 && alpha.is_some_and(|a| a > 2.0);
    report.push(
        "scenario_log_moment",
        if log_scen { CheckStatus::Pass } else { CheckStatus::Info },
        d as f64,
        if log_scen { "applicable for d = 1" } else { "not applicable" },
    );
    Ok(report)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{JumpLaw, JumpMeasure, JumpMeasureSpec, LevyTriplet, MomentFlags, RadialDensity};
    use crate::linalg::Matrix;
    use crate::models::{Drift, JumpConstants, MatrixCoefficient};

    fn model(drift: Drift, sigma: Matrix, jumps: JumpMeasureSpec) -> JumpSdeModel {
        let d = jumps.dim();
        JumpSdeModel::new(
            drift,
            MatrixCoefficient::Constant(sigma),
            MatrixCoefficient::scaled_identity(d, 0.5),
            jumps,
            JumpConstants::default(),
        )
        .unwrap()
    }

    fn cp_gauss(d: usize) -> JumpMeasureSpec {
        JumpMeasureSpec::new(
            d,
            JumpMeasure::CompoundPoisson {
                rate: 1.0,
                law: JumpLaw::Gaussian {
                    cov: Matrix::identity(d, d),
                },
            },
            MomentFlags::default(),
        )
        .unwrap()
    }

    #[test]
    fn soft_restoring_gaussian_jumps_pass() {
        let m = model(Drift::SoftRestoring, Matrix::identity(2, 2), cp_gauss(2));
        let r = validate_jump_assumptions(&m, 200, &[], 1).unwrap();
        assert!(r.passed(), "{:#?}", r);
        let drift = r.get("drift_dissipativity").unwrap();
        assert!(drift.value.abs() < 1e-12);
        assert_eq!(r.get("ellipticity").unwrap().value, 1.0);
    }

    #[test]
    fn degenerate_sigma_fails_with_zero_witness() {
        let s = Matrix::from_diagonal(&linalg::Vector::from_vec(vec![1.0, 0.0]));
        let m = model(Drift::SoftRestoring, s, cp_gauss(2));
        let r = validate_jump_assumptions(&m, 200, &[], 1).unwrap();
        let e = r.get("ellipticity").unwrap();
        assert_eq!(e.status, CheckStatus::Fail);
        assert!(e.value.abs() < 1e-12);
    }

    #[test]
    fn linear_drift_is_flagged_unbounded() {
        let m = model(
            Drift::Custom(std::sync::Arc::new(|x, o| {
                for (a, b) in o.iter_mut().zip(x) {
                    *a = -b;
                }
            })),
            Matrix::identity(1, 1),
            cp_gauss(1),
        );
        let r = validate_jump_assumptions(&m, 100, &[], 0).unwrap();
        assert_eq!(r.get("bounded_b").unwrap().status, CheckStatus::Fail);
        assert_eq!(r.get("drift_dissipativity").unwrap().status, CheckStatus::Pass);
    }

    #[test]
    fn point_mass_and_singular_densities_fail_jump_checks() {
        let atom = JumpMeasureSpec::new(
            1,
            JumpMeasure::CompoundPoisson {
                rate: 1.0,
                law: JumpLaw::PointMass { atom: vec![1.0] },
            },
            MomentFlags::default(),
        )
        .unwrap();
        let r = validate_jump_assumptions(&model(Drift::SoftRestoring, Matrix::identity(1, 1), atom), 100, &[], 0)
            .unwrap();
        assert_eq!(r.get("absolute_continuity").unwrap().status, CheckStatus::Fail);

        // ν(z) ~ |z|^{-1-1.5} near 0 makes κ_1 blow up at the origin
        let stable = JumpMeasureSpec::new(
            1,
            JumpMeasure::Density {
                density: RadialDensity::TemperedStable {
                    c: 1.0,
                    alpha: 1.5,
                    decay: 1.0,
                },
                eps: 1e-2,
            },
            MomentFlags::default(),
        )
        .unwrap();
        let r = validate_jump_assumptions(&model(Drift::SoftRestoring, Matrix::identity(1, 1), stable), 100, &[], 0)
            .unwrap();
        assert_eq!(r.get("kappa_bounded").unwrap().status, CheckStatus::Fail);
    }

    #[test]
    fn validator_is_pure() {
        let m = model(Drift::SoftRestoring, Matrix::identity(2, 2), cp_gauss(2));
        let before = format!("{m:?}");
        let a = validate_jump_assumptions(&m, 150, &[1.0, 3.0], 9).unwrap();
        let b = validate_jump_assumptions(&m, 150, &[1.0, 3.0], 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(before, format!("{m:?}"));
        assert!(validate_jump_assumptions(&m, 99, &[], 0).is_err());
    }

    #[test]
    fn ou_rank_and_scenarios() {
        let ok = OuModel::new(Matrix::identity(2, 2), LevyTriplet::brownian(Matrix::identity(2, 2)).unwrap()).unwrap();
        let r = validate_ou_assumptions(&ok).unwrap();
        assert_eq!(r.get("rank_q").unwrap().status, CheckStatus::Pass);
        assert_eq!(r.get("scenario_moment").unwrap().status, CheckStatus::Info);

        let q = Matrix::from_diagonal(&linalg::Vector::from_vec(vec![1.0, 0.0]));
        let bad = OuModel::new(Matrix::identity(2, 2), LevyTriplet::brownian(q).unwrap()).unwrap();
        assert_eq!(validate_ou_assumptions(&bad).unwrap().get("rank_q").unwrap().status, CheckStatus::Fail);

        let flags = MomentFlags {
            p_moment: Some(2.0),
            ..MomentFlags::default()
        };
        let jumps = JumpMeasureSpec::new(
            2,
            JumpMeasure::CompoundPoisson {
                rate: 1.0,
                law: JumpLaw::Gaussian {
                    cov: Matrix::identity(2, 2),
                },
            },
            flags,
        )
        .unwrap();
        let noise = LevyTriplet::new(vec![0.0; 2], Matrix::identity(2, 2), jumps).unwrap();
        let m = OuModel::new(Matrix::identity(2, 2), noise).unwrap();
        let r = validate_ou_assumptions(&m).unwrap();
        assert_eq!(r.get("scenario_moment").unwrap().status, CheckStatus::Pass);
        assert_eq!(r.get("scenario_log_moment").unwrap().status, CheckStatus::Info);
        assert!(r.passed());
    }
}
