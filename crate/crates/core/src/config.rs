//! TOML experiment configuration. Key reference: `docs/config.md`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::EvaluationGrid;
use crate::harness::{HRule, ProcessModel};
use crate::levy::{JumpLaw, JumpMeasure, JumpMeasureSpec, LevyTriplet, MomentFlags, RadialDensity};
use crate::linalg::{matrix_from_rows, Matrix};
use crate::models::{Drift, JumpConstants, JumpSdeModel, MatrixCoefficient, OuModel, Start};

const MAX_KERNEL_ORDER: usize = 15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub adaptive: AdaptiveConfig,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub formulas: FormulasConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ou,
    JumpSde,
}

/// A square matrix given by name, as a multiple of the identity, or row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    /// `"identity"` or `"zero"`.
    Named(String),
    Scalar(f64),
    Rows(Vec<Vec<f64>>),
}

impl Coefficient {
    fn identity() -> Self {
        Coefficient::Named("identity".into())
    }

    pub fn to_matrix(&self, dim: usize, key: &str) -> Result<Matrix> {
        let m = match self {
            Coefficient::Named(n) if n == "identity" => Matrix::identity(dim, dim),
            Coefficient::Named(n) if n == "zero" => Matrix::zeros(dim, dim),
            Coefficient::Named(n) => {
                return Err(Error::config(key, format!("unknown built-in matrix \"{n}\"")));
            }
            Coefficient::Scalar(s) => Matrix::identity(dim, dim) * *s,
            Coefficient::Rows(rows) => matrix_from_rows(rows).map_err(|e| Error::config(key, e.to_string()))?,
        };
        if m.nrows() != dim {
            return Err(Error::config(key, format!("expected a {dim}x{dim} matrix")));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::config(key, "entries must be finite"));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(rename = "type")]
    pub kind: ModelKind,
    pub dim: usize,
    /// OU drift matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Coefficient>,
    /// OU Brownian covariance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Coefficient>,
    /// Jump SDE drift: `"soft_restoring"` (`-x / max(‖x‖, 1)`) or `"zero"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Coefficient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Coefficient>,
    #[serde(default)]
    pub jumps: JumpsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsConfig {
    pub c1: f64,
    pub c2: f64,
    pub eta0: f64,
    pub alpha: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        let c = JumpConstants::default();
        ConstantsConfig {
            c1: c.c1,
            c2: c.c2,
            eta0: c.eta0,
            alpha: c.alpha,
        }
    }
}

/// Jump measure. `type` is one of `none`, `cpoisson-gauss`, `cpoisson-point`, `density`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpsConfig {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cov: Option<Coefficient>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom: Option<Vec<f64>>,
    /// Radial family for `type = "density"`: `gaussian`, `uniform_ball`, `uniform_shell`, `tempered_stable`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    /// Small-jump truncation radius for infinite-activity densities.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp_moment_eta0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_moment: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_moment_alpha: Option<f64>,
}

impl Default for JumpsConfig {
    fn default() -> Self {
        JumpsConfig {
            kind: "none".into(),
            rate: None,
            cov: None,
            atom: None,
            density: None,
            mass: None,
            scale: None,
            height: None,
            radius: None,
            inner: None,
            outer: None,
            c: None,
            alpha: None,
            decay: None,
            eps: None,
            exp_moment_eta0: None,
            p_moment: None,
            log_moment_alpha: None,
        }
    }
}

/// `"stationary"` or an explicit initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StartConfig {
    Named(String),
    Point(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Discarded warm-up time; the model's default rule applies when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_start")]
    pub start: StartConfig,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            horizon: default_horizon(),
            dt: default_dt(),
            burn_in: None,
            seed: 0,
            start: default_start(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    #[serde(default = "default_order")]
    pub order: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { order: default_order() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HRuleKind {
    Fixed,
    Theoretical,
    Adaptive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    #[serde(default = "default_h_rule")]
    pub h_rule: HRuleKind,
    /// Bandwidth for `h_rule = "fixed"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_c_h")]
    pub c_h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(default = "default_points")]
    pub points_per_axis: usize,
    /// Location of the pointwise error in risk experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        EstimatorConfig {
            h_rule: default_h_rule(),
            h: None,
            beta: default_beta(),
            c_h: default_c_h(),
            lower: None,
            upper: None,
            points_per_axis: default_points(),
            point: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdaptiveConfig {
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_k")]
    pub k: usize,
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig {
            eta: default_eta(),
            k: default_k(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceKind {
    Gaussian,
    Pilot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_t_list")]
    pub t_list: Vec<f64>,
    #[serde(default = "default_lambda_list")]
    pub lambda_list: Vec<f64>,
    /// Centre of the variance-scaling cubes; the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default = "default_reference")]
    pub reference: ReferenceKind,
    /// Pilot horizon as a multiple of the largest horizon in `t_list`.
    #[serde(default = "default_pilot_factor")]
    pub pilot_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pilot_cache: Option<PathBuf>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            reps: default_reps(),
            t_list: default_t_list(),
            lambda_list: default_lambda_list(),
            center: None,
            reference: default_reference(),
            pilot_factor: default_pilot_factor(),
            pilot_cache: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormulasConfig {
    #[serde(default = "default_x_list")]
    pub x_list: Vec<f64>,
    #[serde(default = "default_h_list")]
    pub h_list: Vec<f64>,
    #[serde(default = "default_u")]
    pub u: f64,
}

impl Default for FormulasConfig {
    fn default() -> Self {
        FormulasConfig {
            x_list: default_x_list(),
            h_list: default_h_list(),
            u: default_u(),
        }
    }
}

fn default_horizon() -> f64 {
    1000.0
}
fn default_dt() -> f64 {
    0.01
}
fn default_start() -> StartConfig {
    StartConfig::Named("stationary".into())
}
fn default_order() -> usize {
    1
}
fn default_h_rule() -> HRuleKind {
    HRuleKind::Theoretical
}
fn default_beta() -> f64 {
    2.0
}
fn default_c_h() -> f64 {
    1.0
}
fn default_points() -> usize {
    33
}
fn default_eta() -> f64 {
    2.0
}
fn default_k() -> usize {
    1
}
fn default_reps() -> usize {
    20
}
fn default_t_list() -> Vec<f64> {
    vec![1e3, 4e3, 1.6e4, 6.4e4]
}
fn default_lambda_list() -> Vec<f64> {
    vec![1e-3, 10f64.powf(-2.5), 1e-2, 10f64.powf(-1.5), 1e-1]
}
fn default_reference() -> ReferenceKind {
    ReferenceKind::Gaussian
}
fn default_pilot_factor() -> f64 {
    50.0
}
fn default_x_list() -> Vec<f64> {
    vec![0.01, 0.1, 0.5, 1.0, 2.0]
}
fn default_h_list() -> Vec<f64> {
    vec![0.125, 0.25, 0.5, 1.0]
}
fn default_u() -> f64 {
    1.0
}

/// Parses, fills model-dependent defaults and validates a TOML document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let de = toml::Deserializer::parse(text).map_err(|e| Error::config("document", e.to_string()))?;
    let mut cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let key = e.path().to_string();
        Error::config(if key == "." { "document".to_string() } else { key }, e.inner().to_string().trim_end())
    })?;
    cfg.resolve()?;
    Ok(cfg)
}

fn positive(v: f64, key: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be a finite number > 0, got {v}")))
    }
}

fn require<T: Copy>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::config(key, "required for this jump type"))
}

impl ExperimentConfig {
    /// Fills every default that depends on the dimension, then validates.
    pub fn resolve(&mut self) -> Result<()> {
        let d = self.model.dim;
        if d == 0 || d > 8 {
            return Err(Error::config("model.dim", "must be in 1..=8"));
        }
        let m = &mut self.model;
        match m.kind {
            ModelKind::Ou => {
                for (set, key) in [
                    (m.drift.is_some(), "model.drift"),
                    (m.sigma.is_some(), "model.sigma"),
                    (m.gamma.is_some(), "model.gamma"),
                    (m.constants.is_some(), "model.constants"),
                ] {
                    if set {
                        return Err(Error::config(key, "only valid for type = \"jumpsde\""));
                    }
                }
                m.b.get_or_insert_with(Coefficient::identity);
                m.q.get_or_insert_with(Coefficient::identity);
            }
            ModelKind::JumpSde => {
                for (set, key) in [(m.b.is_some(), "model.b"), (m.q.is_some(), "model.q")] {
                    if set {
                        return Err(Error::config(key, "only valid for type = \"ou\""));
                    }
                }
                m.drift.get_or_insert_with(|| "soft_restoring".into());
                m.sigma.get_or_insert_with(Coefficient::identity);
                m.gamma.get_or_insert_with(Coefficient::identity);
                m.constants.get_or_insert_with(ConstantsConfig::default);
            }
        }
        let e = &mut self.estimator;
        e.lower.get_or_insert_with(|| vec![-1.0; d]);
        e.upper.get_or_insert_with(|| vec![1.0; d]);
        e.point.get_or_insert_with(|| vec![0.0; d]);
        self.experiment.center.get_or_insert_with(|| vec![0.0; d]);
        self.validate()
    }

    fn validate(&self) -> Result<()> {
        let d = self.model.dim;
        let s = &self.simulation;
        positive(s.horizon, "simulation.horizon")?;
        positive(s.dt, "simulation.dt")?;
        if s.dt > s.horizon {
            return Err(Error::config("simulation.dt", "must not exceed simulation.horizon"));
        }
        if let Some(b) = s.burn_in {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(Error::config("simulation.burn_in", "must be finite and >= 0"));
            }
        }
        self.start()?;
        if !(1..=MAX_KERNEL_ORDER).contains(&self.kernel.order) {
            return Err(Error::config(
                "kernel.order",
                format!("must be in 1..={MAX_KERNEL_ORDER}, got {}", self.kernel.order),
            ));
        }
        let e = &self.estimator;
        match e.h_rule {
            HRuleKind::Fixed => {
                let h = e.h.ok_or_else(|| Error::config("estimator.h", "required when h_rule = \"fixed\""))?;
                positive(h, "estimator.h")?;
            }
            _ if e.h.is_some() => {
                return Err(Error::config("estimator.h", "only valid when h_rule = \"fixed\""));
            }
            _ => {}
        }
        positive(e.beta, "estimator.beta")?;
        positive(e.c_h, "estimator.c_h")?;
        if e.points_per_axis < 2 {
            return Err(Error::config("estimator.points_per_axis", "must be at least 2"));
        }
        for (v, key) in [
            (&e.lower, "estimator.lower"),
            (&e.upper, "estimator.upper"),
            (&e.point, "estimator.point"),
            (&self.experiment.center, "experiment.center"),
        ] {
            let v = v.as_ref().expect("resolved");
            if v.len() != d {
                return Err(Error::config(key, format!("expected {d} coordinates")));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::config(key, "coordinates must be finite"));
            }
        }
        self.eval_grid().map_err(|err| Error::config("estimator.upper", err.to_string()))?;
        if !(self.adaptive.eta > 1.0 && self.adaptive.eta.is_finite()) {
            return Err(Error::config("adaptive.eta", "must be > 1"));
        }
        if self.adaptive.k == 0 {
            return Err(Error::config("adaptive.k", "must be at least 1"));
        }
        let x = &self.experiment;
        if x.reps == 0 {
            return Err(Error::config("experiment.reps", "must be at least 1"));
        }
        if x.t_list.is_empty() {
            return Err(Error::config("experiment.t_list", "must not be empty"));
        }
        for &t in &x.t_list {
            if !(t > s.dt && t.is_finite()) {
                return Err(Error::config("experiment.t_list", format!("horizon {t} must exceed simulation.dt")));
            }
        }
        if x.lambda_list.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
            return Err(Error::config("experiment.lambda_list", "volumes must lie in (0, 1)"));
        }
        positive(x.pilot_factor, "experiment.pilot_factor")?;
        if x.reference == ReferenceKind::Gaussian && self.build_model()?.gaussian_reference().is_none() {
            return Err(Error::config(
                "experiment.reference",
                "the model has no closed-form invariant density; use reference = \"pilot\"",
            ));
        }
        positive(self.formulas.u, "formulas.u")?;
        Ok(())
    }

    pub fn start(&self) -> Result<Start> {
        match &self.simulation.start {
            StartConfig::Named(n) if n == "stationary" => Ok(Start::Stationary),
            StartConfig::Named(n) => Err(Error::config("simulation.start", format!("unknown start \"{n}\""))),
            StartConfig::Point(x) if x.len() == self.model.dim && x.iter().all(|v| v.is_finite()) => {
                Ok(Start::Fixed(x.clone()))
            }
            StartConfig::Point(_) => Err(Error::config(
                "simulation.start",
                format!("expected {} finite coordinates", self.model.dim),
            )),
        }
    }

    pub fn eval_grid(&self) -> Result<EvaluationGrid> {
        let e = &self.estimator;
        EvaluationGrid::new(
            e.lower.clone().expect("resolved"),
            e.upper.clone().expect("resolved"),
            e.points_per_axis,
        )
    }

    pub fn h_rule(&self) -> HRule {
        let e = &self.estimator;
        match e.h_rule {
            HRuleKind::Fixed => HRule::Fixed(e.h.expect("validated")),
            HRuleKind::Theoretical => HRule::Theoretical {
                beta: e.beta,
                c_h: e.c_h,
            },
            HRuleKind::Adaptive => HRule::Adaptive {
                eta: self.adaptive.eta,
                k: self.adaptive.k,
                beta: e.beta,
                c_h: e.c_h,
            },
        }
    }

    pub fn build_model(&self) -> Result<ProcessModel> {
        let m = &self.model;
        let d = m.dim;
        let jumps = build_jumps(&m.jumps, d)?;
        match m.kind {
            ModelKind::Ou => {
                let b = m.b.as_ref().expect("resolved").to_matrix(d, "model.b")?;
                let q = m.q.as_ref().expect("resolved").to_matrix(d, "model.q")?;
                let noise = LevyTriplet::new(vec![0.0; d], q, jumps).map_err(|e| Error::config("model.q", e.to_string()))?;
                let ou = OuModel::new(b, noise).map_err(|e| Error::config("model.b", e.to_string()))?;
                Ok(ProcessModel::Ou(ou))
            }
            ModelKind::JumpSde => {
                let drift = match m.drift.as_deref().expect("resolved") {
                    "soft_restoring" => Drift::SoftRestoring,
                    "zero" => Drift::Zero,
                    other => return Err(Error::config("model.drift", format!("unknown built-in drift \"{other}\""))),
                };
                let sigma = m.sigma.as_ref().expect("resolved").to_matrix(d, "model.sigma")?;
                let gamma = m.gamma.as_ref().expect("resolved").to_matrix(d, "model.gamma")?;
                let c = m.constants.expect("resolved");
                let constants = JumpConstants {
                    c1: c.c1,
                    c2: c.c2,
                    eta0: c.eta0,
                    alpha: c.alpha,
                };
                let sde = JumpSdeModel::new(
                    drift,
                    MatrixCoefficient::Constant(sigma),
                    MatrixCoefficient::Constant(gamma),
                    jumps,
                    constants,
                )
                .map_err(|e| Error::config("model.constants", e.to_string()))?;
                Ok(ProcessModel::JumpSde(sde))
            }
        }
    }

    /// Resolved configuration as a TOML document.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::config("document", e.to_string()))
    }
}

fn build_jumps(j: &JumpsConfig, d: usize) -> Result<JumpMeasureSpec> {
    let flags = MomentFlags {
        exp_moment_eta0: j.exp_moment_eta0,
        p_moment: j.p_moment,
        log_moment_alpha: j.log_moment_alpha,
    };
    let measure = match j.kind.as_str() {
        "none" => JumpMeasure::None,
        "cpoisson-gauss" => JumpMeasure::CompoundPoisson {
            rate: require(j.rate, "model.jumps.rate")?,
            law: JumpLaw::Gaussian {
                cov: j
                    .cov
                    .as_ref()
                    .unwrap_or(&Coefficient::identity())
                    .to_matrix(d, "model.jumps.cov")?,
            },
        },
        "cpoisson-point" => JumpMeasure::CompoundPoisson {
            rate: require(j.rate, "model.jumps.rate")?,
            law: JumpLaw::PointMass {
                atom: j
                    .atom
                    .clone()
                    .ok_or_else(|| Error::config("model.jumps.atom", "required for this jump type"))?,
            },
        },
        "density" => {
            let density = match j.density.as_deref() {
                Some("gaussian") => RadialDensity::Gaussian {
                    mass: require(j.mass, "model.jumps.mass")?,
                    scale: require(j.scale, "model.jumps.scale")?,
                },
                Some("uniform_ball") => RadialDensity::UniformBall {
                    height: require(j.height, "model.jumps.height")?,
                    radius: require(j.radius, "model.jumps.radius")?,
                },
                Some("uniform_shell") => RadialDensity::UniformShell {
                    height: require(j.height, "model.jumps.height")?,
                    inner: require(j.inner, "model.jumps.inner")?,
                    outer: require(j.outer, "model.jumps.outer")?,
                },
                Some("tempered_stable") => RadialDensity::TemperedStable {
                    c: require(j.c, "model.jumps.c")?,
                    alpha: require(j.alpha, "model.jumps.alpha")?,
                    decay: require(j.decay, "model.jumps.decay")?,
                },
                Some(other) => {
                    return Err(Error::config("model.jumps.density", format!("unknown radial family \"{other}\"")))
                }
                None => return Err(Error::config("model.jumps.density", "required for type = \"density\"")),
            };
            JumpMeasure::Density {
                density,
                eps: j.eps.unwrap_or(crate::levy::DEFAULT_SMALL_JUMP_EPS),
            }
        }
        other => return Err(Error::config("model.jumps.type", format!("unknown jump type \"{other}\""))),
    };
    JumpMeasureSpec::new(d, measure, flags).map_err(|e| Error::config("model.jumps", e.to_string()))
}
