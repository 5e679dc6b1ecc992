//! Pipelines behind the `ergokde` subcommands. Each is a pure function of the
//! resolved configuration and its inputs.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::adaptive::{build_grid, select_bandwidth};
use crate::config::{ExperimentConfig, ReferenceKind};
use crate::csv_io::{fmt_f64, read_path, write_csv_file, write_estimate, write_path};
use crate::error::{Error, Result};
use crate::estimator::{estimate_density, psi_d, rate_phi, rate_psi, sigma_proxy, theoretical_bandwidth, upsilon};
use crate::harness::{
    pilot_reference, run_risk_experiment, variance_scaling_experiment, HRule, PilotSpec, Reference, RiskExperiment,
    VarianceExperiment,
};
use crate::kernel::build_order_kernel;
use crate::models::SamplePath;

/// Selectable closed-form expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    Psi,
    Sigma,
    Upsilon,
    Phi,
    PsiRate,
    Bandwidth,
}

/// `<out>.<suffix>`, used for companion files.
pub fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn load_or_simulate(cfg: &ExperimentConfig, input: Option<&Path>) -> Result<SamplePath> {
    match input {
        Some(p) => read_path(BufReader::new(File::open(p)?)),
        None => {
            let s = &cfg.simulation;
            cfg.build_model()?
                .simulate(s.horizon, s.dt, &cfg.start()?, s.burn_in, s.seed)
        }
    }
}

pub fn simulate(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let path = load_or_simulate(cfg, None)?;
    write_path(std::io::BufWriter::new(File::create(out)?), &path)
}

/// Estimates on the configured grid; returns the bandwidth used.
pub fn estimate(cfg: &ExperimentConfig, out: &Path, input: Option<&Path>) -> Result<f64> {
    let path = load_or_simulate(cfg, input)?;
    if path.dim() != cfg.model.dim {
        return Err(Error::config("model.dim", format!("input path has dimension {}", path.dim())));
    }
    let k = build_order_kernel(path.dim(), cfg.kernel.order)?;
    let grid = cfg.eval_grid()?;
    let h = cfg.h_rule().choose(&path, &k, &grid)?;
    let est = estimate_density(&path, &k, h, &grid)?;
    write_estimate(std::io::BufWriter::new(File::create(out)?), &est)?;
    Ok(h)
}

/// Runs the selection rule and writes its pairwise trace; returns the selected bandwidth.
pub fn adapt(cfg: &ExperimentConfig, out: &Path, input: Option<&Path>) -> Result<f64> {
    let path = load_or_simulate(cfg, input)?;
    let grid = build_grid(path.horizon(), path.dim(), cfg.adaptive.eta, cfg.adaptive.k)?;
    let k = build_order_kernel(path.dim(), cfg.kernel.order)?;
    let trace = select_bandwidth(&path, &k, &grid, &cfg.eval_grid()?)?;
    let rows = trace.pairs.iter().map(|p| {
        vec![
            fmt_f64(p.h),
            fmt_f64(p.g),
            fmt_f64(p.diff_sup),
            fmt_f64(p.threshold),
            p.pass.to_string(),
        ]
    });
    write_csv_file(out, &header(&["h", "g", "diff_sup", "threshold", "pass"]), rows)?;
    Ok(trace.selected_h)
}

/// Fitted slopes of a risk experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatesSummary {
    pub sup_slope: f64,
    pub sup_residual_rms: f64,
    pub pt_slope: f64,
}

fn reference(cfg: &ExperimentConfig, exp: &RiskExperiment) -> Result<Reference> {
    match cfg.experiment.reference {
        ReferenceKind::Gaussian => exp
            .model
            .gaussian_reference()
            .map(|g| g.into_reference())
            .ok_or_else(|| Error::config("experiment.reference", "model has no closed-form invariant density")),
        ReferenceKind::Pilot => {
            let d = exp.model.dim();
            let t_max = exp.t_list.iter().cloned().fold(f64::MIN, f64::max);
            let mut h_min = f64::INFINITY;
            for &t in &exp.t_list {
                let h = match exp.h_rule.static_bandwidth(d, t)? {
                    Some(h) => h,
                    None => {
                        let HRule::Adaptive { eta, k, .. } = exp.h_rule else {
                            unreachable!("only adaptive rules depend on data")
                        };
                        build_grid(t, d, eta, k)?.h_min()
                    }
                };
                h_min = h_min.min(h);
            }
            let spec = PilotSpec {
                horizon: cfg.experiment.pilot_factor * t_max,
                dt: exp.dt,
                h: h_min / 2.0,
                kernel_order: exp.kernel_order,
                eval_grid: exp.eval_grid.clone(),
                seed: exp.master_seed.wrapping_add(u32::MAX as u64),
                start: exp.start.clone(),
                burn_in: exp.burn_in,
                cache_dir: cfg.experiment.pilot_cache.clone(),
            };
            let pilot = pilot_reference(&exp.model, &spec)?;
            Ok(Arc::new(move |x: &[f64]| pilot.eval(x)))
        }
    }
}

/// Risk rows to `out` and `logT,log_med_err` to `<out>.rate.csv`.
pub fn rates(cfg: &ExperimentConfig, out: &Path) -> Result<RatesSummary> {
    let s = &cfg.simulation;
    let exp = RiskExperiment {
        model: cfg.build_model()?,
        kernel_order: cfg.kernel.order,
        t_list: cfg.experiment.t_list.clone(),
        h_rule: cfg.h_rule(),
        reps: cfg.experiment.reps,
        master_seed: s.seed,
        dt: s.dt,
        start: cfg.start()?,
        burn_in: s.burn_in,
        eval_grid: cfg.eval_grid()?,
        point: cfg.estimator.point.clone().expect("resolved"),
    };
    let reference = reference(cfg, &exp)?;
    let report = run_risk_experiment(&exp, &reference)?;
    let rows = report.rows.iter().map(|r| {
        vec![
            fmt_f64(r.t),
            r.seed.to_string(),
            fmt_f64(r.h),
            fmt_f64(r.sup_err),
            fmt_f64(r.pt_sq_err),
        ]
    });
    write_csv_file(out, &header(&["T", "seed", "h", "sup_err", "pt_sq_err"]), rows)?;
    let med = report.median_sup();
    let rate_rows = report
        .horizons()
        .into_iter()
        .zip(&med)
        .map(|(t, &m)| vec![fmt_f64(t.ln()), fmt_f64(m.ln())]);
    write_csv_file(&sibling(out, "rate.csv"), &header(&["logT", "log_med_err"]), rate_rows)?;
    let (sup_slope, sup_residual_rms) = match report.sup_rate() {
        Ok(f) => (f.slope, f.residual_rms),
        Err(_) => (f64::NAN, f64::NAN),
    };
    let pt_slope = report.pointwise_rate().map_or(f64::NAN, |f| f.slope);
    Ok(RatesSummary {
        sup_slope,
        sup_residual_rms,
        pt_slope,
    })
}

/// `lambda,var_over_T`; returns the fitted slope and its theoretical counterpart.
pub fn variance(cfg: &ExperimentConfig, out: &Path) -> Result<(Option<f64>, f64)> {
    let s = &cfg.simulation;
    let exp = VarianceExperiment {
        model: cfg.build_model()?,
        center: cfg.experiment.center.clone().expect("resolved"),
        lambdas: cfg.experiment.lambda_list.clone(),
        horizon: s.horizon,
        dt: s.dt,
        reps: cfg.experiment.reps,
        master_seed: s.seed,
        start: cfg.start()?,
        burn_in: s.burn_in,
    };
    let report = variance_scaling_experiment(&exp)?;
    let rows = report
        .lambdas
        .iter()
        .zip(&report.var_over_t)
        .map(|(&l, &v)| vec![fmt_f64(l), fmt_f64(v)]);
    write_csv_file(out, &header(&["lambda", "var_over_T"]), rows)?;
    Ok((report.fit.map(|f| f.slope), report.theoretical_exponent))
}

pub fn formulas(cfg: &ExperimentConfig, out: &Path, which: Formula) -> Result<()> {
    let d = cfg.model.dim;
    let f = &cfg.formulas;
    let ts = &cfg.experiment.t_list;
    let beta = cfg.estimator.beta;
    let mut rows = Vec::new();
    let names: &[&str] = match which {
        Formula::Psi => {
            for &x in &f.x_list {
                rows.push(vec![fmt_f64(x), fmt_f64(psi_d(x, d)?)]);
            }
            &["x", "psi"]
        }
        Formula::Sigma => {
            for &t in ts {
                for &h in &f.h_list {
                    rows.push(vec![fmt_f64(t), fmt_f64(h), fmt_f64(sigma_proxy(h, t, d, cfg.adaptive.k)?)]);
                }
            }
            &["T", "h", "sigma"]
        }
        Formula::Upsilon => {
            for &t in ts {
                for &h in &f.h_list {
                    rows.push(vec![
                        fmt_f64(t),
                        fmt_f64(h),
                        fmt_f64(f.u),
                        fmt_f64(upsilon(h, t, f.u, d)?),
                    ]);
                }
            }
            &["T", "h", "u", "upsilon"]
        }
        Formula::Phi => {
            for &t in ts {
                rows.push(vec![fmt_f64(t), fmt_f64(rate_phi(d, beta, t)?)]);
            }
            &["T", "phi"]
        }
        Formula::PsiRate => {
            for &t in ts {
                rows.push(vec![fmt_f64(t), fmt_f64(rate_psi(d, beta, t)?)]);
            }
            &["T", "psi_rate"]
        }
        Formula::Bandwidth => {
            for &t in ts {
                let b = theoretical_bandwidth(d, beta, t, cfg.estimator.c_h)?;
                rows.push(vec![fmt_f64(t), fmt_f64(b.h), fmt_f64(b.raw), b.clipped.to_string()]);
            }
            &["T", "h", "raw", "clipped"]
        }
    };
    write_csv_file(out, &header(names), rows)
}
