use std::fs;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use super::reference::GridFunction;
use super::ProcessModel;
use crate::error::{Error, Result};
use crate::estimator::{estimate_from_points, EvaluationGrid};
use crate::kernel::build_order_kernel;
use crate::models::Start;
use crate::rng::replication_seed;

/// Time units simulated per pilot segment.
const SEGMENT_HORIZON: f64 = 10_000.0;

/// Long-run pilot estimate standing in for an unknown invariant density.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotSpec {
    pub horizon: f64,
    pub dt: f64,
    pub h: f64,
    pub kernel_order: usize,
    pub eval_grid: EvaluationGrid,
    pub seed: u64,
    pub start: Start,
    pub burn_in: Option<f64>,
    /// Directory for cached pilot values; `None` disables caching.
    pub cache_dir: Option<PathBuf>,
}

fn cache_key(model: &ProcessModel, spec: &PilotSpec) -> Option<String> {
    let fp = model.fingerprint()?;
    let mut hasher = Sha256::new();
    hasher.update(fp.as_bytes());
    let mut s = spec.clone();
    s.cache_dir = None;
    hasher.update(format!("{s:?}").as_bytes());
    let digest = hasher.finalize();
    Some(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn read_cache(path: &PathBuf, len: usize) -> Option<Vec<f64>> {
    let bytes = fs::read(path).ok()?;
    if bytes.len() != 8 * len {
        return None;
    }
    Some(
        bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect(),
    )
}

/// Pilot estimate on `spec.eval_grid`, simulated as one Markov path in
/// consecutive segments so memory stays bounded; each segment starts at the
/// previous segment's end state.
pub fn pilot_reference(model: &ProcessModel, spec: &PilotSpec) -> Result<GridFunction> {
    let grid = &spec.eval_grid;
    let cache_file = match (&spec.cache_dir, cache_key(model, spec)) {
        (Some(dir), Some(key)) => Some(dir.join(format!("pilot-{key}.bin"))),
        _ => None,
    };
    if let Some(file) = &cache_file {
        if let Some(values) = read_cache(file, grid.len()) {
            log::info!("pilot reference loaded from {}", file.display());
            return GridFunction::new(grid.clone(), values);
        }
    }
    if !(spec.horizon > 0.0) {
        return Err(Error::validation("pilot horizon must be > 0"));
    }
    let d = model.dim();
    let kernel = build_order_kernel(d, spec.kernel_order)?;
    let segments = (spec.horizon / SEGMENT_HORIZON).ceil().max(1.0) as usize;
    let seg_t = spec.horizon / segments as f64;
    let mut total = vec![0.0; grid.len()];
    let mut count = 0usize;
    let mut start = spec.start.clone();
    let mut burn_in = spec.burn_in;
    for s in 0..segments {
        let path = model.simulate(seg_t, spec.dt, &start, burn_in, replication_seed(spec.seed, s as u64))?;
        let n = path.n_steps();
        let vals = estimate_from_points(path.left_points(), &kernel, spec.h, grid)?;
        for (t, v) in total.iter_mut().zip(vals) {
            *t += v * n as f64;
        }
        count += n;
        start = Start::Fixed(path.last().to_vec());
        burn_in = Some(0.0);
    }
    for t in total.iter_mut() {
        *t /= count as f64;
    }
    if let Some(file) = &cache_file {
        let bytes: Vec<u8> = total.iter().flat_map(|v| v.to_le_bytes()).collect();
        if let Some(dir) = file.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(file, bytes)?;
    }
    GridFunction::new(grid.clone(), total)
}
