use rayon::prelude::*;

use super::reference::{sup_norm_error, Reference};
use super::stats::{bootstrap_median_se, fit_log_rate, median, quantile, RateFit};
use super::ProcessModel;
use crate::adaptive::{build_grid, select_bandwidth};
use crate::error::{Error, Result};
use crate::estimator::{estimate_at, estimate_density, theoretical_bandwidth, EvaluationGrid};
use crate::kernel::{build_order_kernel, Kernel};
use crate::models::{SamplePath, Start};
use crate::rng::replication_seed;

const BOOTSTRAP_RESAMPLES: usize = 500;

/// How the bandwidth is chosen for each replication.
#[derive(Debug, Clone, PartialEq)]
pub enum HRule {
    Fixed(f64),
    /// Asymptotic rule with smoothness `beta` and constant `c_h`.
    Theoretical { beta: f64, c_h: f64 },
    /// Data-driven selection for `d >= 3`; falls back to the theoretical rule for `d <= 2`.
    Adaptive { eta: f64, k: usize, beta: f64, c_h: f64 },
}

impl HRule {
    /// Bandwidth that does not depend on the data, if any.
    pub fn static_bandwidth(&self, d: usize, t: f64) -> Result<Option<f64>> {
        match *self {
            HRule::Fixed(h) => Ok(Some(h)),
            HRule::Theoretical { beta, c_h } => Ok(Some(theoretical_bandwidth(d, beta, t, c_h)?.h)),
            HRule::Adaptive { beta, c_h, .. } if d <= 2 => Ok(Some(theoretical_bandwidth(d, beta, t, c_h)?.h)),
            HRule::Adaptive { .. } => Ok(None),
        }
    }

    /// Bandwidth for one path.
    pub fn choose(&self, path: &SamplePath, k: &Kernel, eval_grid: &EvaluationGrid) -> Result<f64> {
        let d = path.dim();
        let t = path.horizon();
        if let Some(h) = self.static_bandwidth(d, t)? {
            return Ok(h);
        }
        let HRule::Adaptive { eta, k: kk, .. } = *self else {
            unreachable!("static rules handled above")
        };
        let grid = build_grid(t, d, eta, kk)?;
        Ok(select_bandwidth(path, k, &grid, eval_grid)?.selected_h)
    }
}

#[derive(Debug, Clone)]
pub struct RiskExperiment {
    pub model: ProcessModel,
    pub kernel_order: usize,
    pub t_list: Vec<f64>,
    pub h_rule: HRule,
    pub reps: usize,
    pub master_seed: u64,
    pub dt: f64,
    pub start: Start,
    pub burn_in: Option<f64>,
    pub eval_grid: EvaluationGrid,
    /// Location of the pointwise squared error.
    pub point: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskRow {
    pub t: f64,
    pub seed: u64,
    pub h: f64,
    pub sup_err: f64,
    pub pt_sq_err: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskSummary {
    pub t: f64,
    pub reps: usize,
    pub median_h: f64,
    pub median_sup: f64,
    pub q1_sup: f64,
    pub q3_sup: f64,
    pub boot_se_sup: f64,
    pub median_pt: f64,
    pub q1_pt: f64,
    pub q3_pt: f64,
    pub boot_se_pt: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    /// Sorted by `(t, seed)`.
    pub rows: Vec<RiskRow>,
    pub summaries: Vec<RiskSummary>,
}

impl RiskReport {
    pub fn median_sup(&self) -> Vec<f64> {
        self.summaries.iter().map(|s| s.median_sup).collect()
    }

    pub fn median_pt(&self) -> Vec<f64> {
        self.summaries.iter().map(|s| s.median_pt).collect()
    }

    pub fn horizons(&self) -> Vec<f64> {
        self.summaries.iter().map(|s| s.t).collect()
    }

    pub fn sup_rate(&self) -> Result<RateFit> {
        fit_log_rate(&self.horizons(), &self.median_sup())
    }

    pub fn pointwise_rate(&self) -> Result<RateFit> {
        fit_log_rate(&self.horizons(), &self.median_pt())
    }

    pub fn from_rows(mut rows: Vec<RiskRow>, master_seed: u64) -> Self {
        rows.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.seed.cmp(&b.seed)));
        let mut summaries = Vec::new();
        let mut i = 0;
        while i < rows.len() {
            let t = rows[i].t;
            let j = rows[i..].iter().position(|r| r.t != t).map_or(rows.len(), |p| i + p);
            let block = &rows[i..j];
            let sup: Vec<f64> = block.iter().map(|r| r.sup_err).collect();
            let pt: Vec<f64> = block.iter().map(|r| r.pt_sq_err).collect();
            let hs: Vec<f64> = block.iter().map(|r| r.h).collect();
            let boot_seed = master_seed ^ 0x5DEE_CE66_D1CE_B007 ^ (summaries.len() as u64);
            summaries.push(RiskSummary {
                t,
                reps: block.len(),
                median_h: median(&hs),
                median_sup: median(&sup),
                q1_sup: quantile(&sup, 0.25),
                q3_sup: quantile(&sup, 0.75),
                boot_se_sup: bootstrap_median_se(&sup, BOOTSTRAP_RESAMPLES, boot_seed),
                median_pt: median(&pt),
                q1_pt: quantile(&pt, 0.25),
                q3_pt: quantile(&pt, 0.75),
                boot_se_pt: bootstrap_median_se(&pt, BOOTSTRAP_RESAMPLES, boot_seed.wrapping_add(1)),
            });
            i = j;
        }
        RiskReport { rows, summaries }
    }
}

fn validate(exp: &RiskExperiment) -> Result<()> {
    let d = exp.model.dim();
    if exp.reps == 0 {
        return Err(Error::validation("reps must be >= 1"));
    }
    if exp.t_list.is_empty() {
        return Err(Error::validation("T list is empty"));
    }
    if exp.eval_grid.dim() != d || exp.point.len() != d {
        return Err(Error::validation("grid or reference point dimension does not match the model"));
    }
    Ok(())
}

/// Full factorial over `t_list × reps`. Replication `r` uses seed
/// `master_seed + r` for every horizon.
pub fn run_risk_experiment(exp: &RiskExperiment, reference: &Reference) -> Result<RiskReport> {
    validate(exp)?;
    let d = exp.model.dim();
    let kernel = build_order_kernel(d, exp.kernel_order)?;
    let jobs: Vec<(f64, u64)> = exp
        .t_list
        .iter()
        .flat_map(|&t| (0..exp.reps).map(move |r| (t, replication_seed(exp.master_seed, r as u64))))
        .collect();
    let ref_at_point = reference(&exp.point);
    let rows = jobs
        .par_iter()
        .map(|&(t, seed)| {
            let path = exp.model.simulate(t, exp.dt, &exp.start, exp.burn_in, seed)?;
            let h = exp.h_rule.choose(&path, &kernel, &exp.eval_grid)?;
            let est = estimate_density(&path, &kernel, h, &exp.eval_grid)?;
            let sup_err = sup_norm_error(&est, reference.as_ref());
            let pt = estimate_at(&path, &kernel, h, &exp.point)?;
            Ok(RiskRow {
                t,
                seed,
                h,
                sup_err,
                pt_sq_err: (pt - ref_at_point).powi(2),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RiskReport::from_rows(rows, exp.master_seed))
}
