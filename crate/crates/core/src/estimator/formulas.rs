//! Closed-form rate, bandwidth and variance-proxy functions.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// `log_(k) T`, the `k`-fold iterated natural logarithm with `log_(0) T = T`.
///
/// Every intermediate value must stay positive.
pub fn iterated_log(t: f64, k: usize) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::validation(format!("iterated log needs T > 0, got {t}")));
    }
    let mut v = t;
    for depth in 1..=k {
        v = v.ln();
        if !(v > 0.0) {
            return Err(Error::validation(format!(
                "log_({depth}) of {t} is {v}, not positive"
            )));
        }
    }
    Ok(v)
}

/// `ψ_d(x)` on `(0, e)`.
pub fn psi_d(x: f64, d: usize) -> Result<f64> {
    if !(x > 0.0 && x < E) {
        return Err(Error::validation(format!("psi_d needs 0 < x < e, got {x}")));
    }
    Ok(match d {
        0 => return Err(Error::validation("dimension must be >= 1")),
        1 => 1.0,
        2 => (1.0 - x.ln()).sqrt(),
        _ => x.powf(1.0 / d as f64 - 0.5),
    })
}

fn check_h(h: f64) -> Result<()> {
    if h > 0.0 && h <= 1.0 {
        Ok(())
    } else {
        Err(Error::validation(format!("bandwidth must lie in (0, 1], got {h}")))
    }
}

/// Variance proxy
/// `σ(h,T) = log_(k)T (log T)² log(1/h) / (T h^d) + ψ_d(h^d) √(log_(k)T log(1/h) / T)`.
pub fn sigma_proxy(h: f64, t: f64, d: usize, k: usize) -> Result<f64> {
    check_h(h)?;
    let lk = iterated_log(t, k)?;
    let psi = psi_d(h.powi(d as i32), d)?;
    if h == 1.0 {
        return Ok(0.0);
    }
    let lt = t.ln();
    let inv = -h.ln();
    Ok(lk * lt * lt / (t * h.powi(d as i32)) * inv + psi * (lk * inv / t).sqrt())
}

/// `Υ_{h,T}(u) = u (log T)² / (T h^d) + T^{-1/2} ψ_d(h^d) √(max(u, log(1/h)))`.
pub fn upsilon(h: f64, t: f64, u: f64, d: usize) -> Result<f64> {
    check_h(h)?;
    if !(u >= 1.0) {
        return Err(Error::validation(format!("upsilon needs u >= 1, got {u}")));
    }
    if !(t > 1.0) {
        return Err(Error::validation(format!("upsilon needs T > 1, got {t}")));
    }
    let psi = psi_d(h.powi(d as i32), d)?;
    let lt = t.ln();
    Ok(u * lt * lt / (t * h.powi(d as i32)) + psi * u.max(-h.ln()).sqrt() / t.sqrt())
}

fn check_rate_args(beta: f64, t: f64) -> Result<()> {
    if !(t > E && t.is_finite()) {
        return Err(Error::validation(format!("rates need T > e, got {t}")));
    }
    if !(beta > 0.0) {
        return Err(Error::validation(format!("beta must be > 0, got {beta}")));
    }
    Ok(())
}

/// A bandwidth from the asymptotic rule, possibly clipped to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth {
    pub h: f64,
    /// Unclipped value of the rule.
    pub raw: f64,
    pub clipped: bool,
}

/// `c_h · {log²T/√T, log T/T^{1/4}, (log T/T)^{1/(2β+d-2)}}` for `d = 1, 2, ≥3`.
pub fn theoretical_bandwidth(d: usize, beta: f64, t: f64, c_h: f64) -> Result<Bandwidth> {
    check_rate_args(beta, t)?;
    if !(c_h > 0.0) {
        return Err(Error::validation("c_h must be > 0"));
    }
    let lt = t.ln();
    let raw = c_h
        * match d {
            0 => return Err(Error::validation("dimension must be >= 1")),
            1 => lt * lt / t.sqrt(),
            2 => lt / t.powf(0.25),
            _ => (lt / t).powf(1.0 / (2.0 * beta + d as f64 - 2.0)),
        };
    if raw >= 1.0 {
        log::warn!("bandwidth rule gives {raw} >= 1 at T = {t}; clipped to 1");
        Ok(Bandwidth {
            h: 1.0,
            raw,
            clipped: true,
        })
    } else {
        Ok(Bandwidth {
            h: raw,
            raw,
            clipped: false,
        })
    }
}

/// Pointwise rate `Φ_{d,β}(T)`.
pub fn rate_phi(d: usize, beta: f64, t: f64) -> Result<f64> {
    check_rate_args(beta, t)?;
    Ok(match d {
        0 => return Err(Error::validation("dimension must be >= 1")),
        1 => 1.0 / t.sqrt(),
        2 => (t.ln() / t).sqrt(),
        _ => t.powf(-beta / (2.0 * beta + d as f64 - 2.0)),
    })
}

/// Sup-norm rate `Ψ_{d,β}(T)`.
pub fn rate_psi(d: usize, beta: f64, t: f64) -> Result<f64> {
    check_rate_args(beta, t)?;
    let lt = t.ln();
    Ok(match d {
        0 => return Err(Error::validation("dimension must be >= 1")),
        1 => (lt / t).sqrt(),
        2 => lt / t.sqrt(),
        _ => (lt / t).powf(beta / (2.0 * beta + d as f64 - 2.0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn iterated_log_examples() {
        assert_eq!(iterated_log(7.5, 0).unwrap(), 7.5);
        assert!(close(iterated_log(E.powf(E * E), 2).unwrap(), 2.0, 1e-12));
        assert!(iterated_log(E, 2).is_err());
        assert!(iterated_log(0.5, 1).is_err());
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_d(0.3, 1).unwrap(), 1.0);
        assert!(close(psi_d(0.01, 2).unwrap(), (1.0 + 100f64.ln()).sqrt(), 1e-14));
        assert!(close(psi_d(0.01, 2).unwrap(), 2.36753, 1e-5));
        assert!(close(psi_d(1.0 / 64.0, 3).unwrap(), 2.0, 1e-14));
        assert!(psi_d(0.0, 2).is_err());
        assert!(psi_d(E, 2).is_err());
    }

    #[test]
    fn sigma_examples() {
        let t = 10f64.exp();
        assert_eq!(sigma_proxy(1.0, t, 3, 1).unwrap(), 0.0);
        let term1 = 10.0 * 100.0 / (t * 0.125) * 2f64.ln();
        let term2 = 2f64.sqrt() * (10.0 * 2f64.ln() / t).sqrt();
        let s = sigma_proxy(0.5, t, 3, 1).unwrap();
        assert!(close(s, term1 + term2, 1e-14));
        assert!(close(s, 0.27684, 5e-6));
    }

    #[test]
    fn upsilon_examples() {
        let t = 10f64.exp();
        assert!(close(upsilon(0.5, t, 1.0, 3).unwrap(), 0.04585, 5e-6));
        for d in 1..=4 {
            let want = t.ln().powi(2) / t + psi_d(1.0, d).unwrap() / t.sqrt();
            assert!(close(upsilon(1.0, t, 1.0, d).unwrap(), want, 1e-15));
        }
        assert!(upsilon(0.5, t, 0.5, 3).is_err());
    }

    #[test]
    fn bandwidth_examples() {
        let b = theoretical_bandwidth(3, 3.0, 1e4, 1.0).unwrap();
        assert!(close(b.h, 0.3684, 5e-5) && !b.clipped);
        let b = theoretical_bandwidth(2, 2.0, 1e8, 1.0).unwrap();
        assert!(close(b.h, 0.18421, 5e-6));
        let b = theoretical_bandwidth(1, 2.0, 4f64.exp(), 1.0).unwrap();
        assert!(b.clipped && b.h == 1.0);
        assert!(close(b.raw, 16.0 / E / E, 1e-12));
        assert!(close(b.raw, 2.1654, 5e-5));
    }

    #[test]
    fn rate_examples() {
        assert!(close(rate_phi(1, 1.7, 4.0).unwrap(), 0.5, 1e-15));
        assert!(close(rate_phi(3, 2.0, 1e5).unwrap(), 1e-2, 1e-15));
        assert!(close(rate_psi(2, 1.0, 4f64.exp()).unwrap(), 4.0 / E / E, 1e-15));
        assert!(close(rate_psi(2, 1.0, 4f64.exp()).unwrap(), 0.54134, 5e-6));
        assert!(rate_phi(1, 1.0, 2.0).is_err());
    }

    proptest! {
        #[test]
        fn sigma_decreases_when_t_doubles(h in 0.01f64..0.99, lt in std::f64::consts::E..40.0, d in 1usize..5) {
            let t = lt.exp();
            let a = sigma_proxy(h, t, d, 1).unwrap();
            let b = sigma_proxy(h, 2.0 * t, d, 1).unwrap();
            prop_assert!(b < a);
        }

        #[test]
        fn upsilon_linear_in_u_beyond_log(h in 0.05f64..0.95, lt in 3.0f64..30.0, extra in 0.0f64..5.0, gap in 0.1f64..5.0, d in 1usize..5) {
            let t = lt.exp();
            let u1 = (-h.ln()).max(1.0) + extra;
            let u2 = u1 + gap;
            let lhs = upsilon(h, t, u2, d).unwrap() - upsilon(h, t, u1, d).unwrap();
            let psi = psi_d(h.powi(d as i32), d).unwrap();
            let rhs = gap * lt * lt / (t * h.powi(d as i32)) + psi * (u2.sqrt() - u1.sqrt()) / t.sqrt();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }
}
