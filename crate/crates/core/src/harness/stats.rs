use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Linear-interpolation quantile (type 7) of an unsorted sample.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile_sorted(&v, q)
}

fn quantile_sorted(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

/// Standard deviation of the median over `resamples` bootstrap resamples.
pub fn bootstrap_median_se(values: &[f64], resamples: usize, seed: u64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mut rng = rng_from_seed(seed);
    let n = values.len();
    let mut buf = vec![0.0; n];
    let meds: Vec<f64> = (0..resamples)
        .map(|_| {
            for b in buf.iter_mut() {
                *b = values[rng.random_range(0..n)];
            }
            median(&buf)
        })
        .collect();
    let m = meds.iter().sum::<f64>() / meds.len() as f64;
    (meds.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (meds.len() - 1) as f64).sqrt()
}

pub fn mean_and_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Least-squares line through `(log x, log y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub log_t: Vec<f64>,
    pub log_err: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

/// Fits `log err = intercept + slope · log T`.
pub fn fit_log_rate(t_values: &[f64], errors: &[f64]) -> Result<RateFit> {
    if t_values.len() != errors.len() || t_values.len() < 3 {
        return Err(Error::validation("rate fit needs at least 3 paired points"));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::validation(format!("rate fit needs positive finite errors, got {e}")));
    }
    if let Some(t) = t_values.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::validation(format!("rate fit needs positive abscissae, got {t}")));
    }
    let x: Vec<f64> = t_values.iter().map(|t| t.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::validation("rate fit needs distinct abscissae"));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual_rms = (x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(RateFit {
        log_t: x,
        log_err: y,
        slope,
        intercept,
        residual_rms,
    })
}
