use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Stationary covariance `Σ` of `dX = -BX dt + dW`, `Cov(W_1) = Q`, i.e. the
/// solution of `BΣ + ΣBᵀ = Q`.
///
/// Computed as `Σ = ∫_0^∞ e^{-sB} Q e^{-sBᵀ} ds`: the integral over `[0, 1]`
/// comes from Van Loan's block exponential and is then extended by doubling
/// `Σ(2t) = Σ(t) + e^{-tB} Σ(t) e^{-tBᵀ}`.
pub fn stationary_gaussian_cov(b: &Matrix, q: &Matrix) -> Result<Matrix> {
    let d = b.nrows();
    if !b.is_square() || q.nrows() != d || q.ncols() != d {
        return Err(Error::validation("B and Q must be square of equal size"));
    }
    linalg::check_psd(q, "Q")?;
    let min_re = linalg::min_real_eigenvalue(b);
    if !(min_re > 1e-10) {
        return Err(Error::validation(format!(
            "B is not stable: smallest eigenvalue real part {min_re}"
        )));
    }
    // exp([[B, Q], [0, -Bᵀ]]) = [[F11, F12], [0, F22]] and ∫_0^1 e^{-sB}Qe^{-sBᵀ}ds = F22ᵀ F12
    let mut block = Matrix::zeros(2 * d, 2 * d);
    block.view_mut((0, 0), (d, d)).copy_from(b);
    block.view_mut((0, d), (d, d)).copy_from(q);
    block.view_mut((d, d), (d, d)).copy_from(&(-b.transpose()));
    let f = linalg::expm(&block);
    let f12 = f.view((0, d), (d, d)).into_owned();
    let f22 = f.view((d, d), (d, d)).into_owned();
    let mut sigma = f22.transpose() * f12;
    let mut phi = linalg::expm(&(-b));
    for _ in 0..80 {
        let next = &sigma + &phi * &sigma * phi.transpose();
        let delta = linalg::max_abs(&(&next - &sigma));
        sigma = next;
        phi = &phi * &phi;
        if delta <= 1e-17 * linalg::max_abs(&sigma).max(f64::MIN_POSITIVE) && linalg::max_abs(&phi) < 1e-17 {
            break;
        }
    }
    // symmetrize away rounding
    let sigma = (&sigma + sigma.transpose()) * 0.5;
    if sigma.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("Lyapunov solve produced non-finite values".into()));
    }
    Ok(sigma)
}
