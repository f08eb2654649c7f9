use super::{lgamma, ln_choose};
use crate::error::{Error, Result};

/// Checks `(alpha, theta)` for a Chinese restaurant process: `alpha` in
/// `[0, 1)`, `theta > -alpha`, and `theta > 0` when `alpha = 0`.
pub fn check_crp_params(alpha: f64, theta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::domain(format!("alpha must lie in [0,1), got {alpha}")));
    }
    if !(theta + alpha > 0.0) || !theta.is_finite() {
        return Err(Error::domain(format!(
            "theta must exceed -alpha (and be positive when alpha = 0), got alpha={alpha}, theta={theta}"
        )));
    }
    Ok(())
}

/// Exact law of the block count `K_n` of a `PD(alpha, theta)` partition of `[n]`.
///
/// Returned vector has length `n + 1`; entry `k` is `P(K_n = k)` (entry 0 is 0).
/// Computed by the forward recursion over (customers seated, tables open):
/// a new table opens with probability `(theta + k alpha) / (theta + m)`.
pub fn exact_kn_pmf(alpha: f64, theta: f64, n: usize) -> Result<Vec<f64>> {
    check_crp_params(alpha, theta)?;
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let mut p = vec![0.0; n + 1];
    p[1] = 1.0;
    for m in 1..n {
        let denom = theta + m as f64;
        // Descending k: p[k] is consumed before p[k] receives mass from k-1.
        for k in (1..=m).rev() {
            let pk = p[k];
            if pk == 0.0 {
                continue;
            }
            let kf = k as f64;
            p[k + 1] += pk * (theta + kf * alpha) / denom;
            p[k] = pk * (m as f64 - kf * alpha) / denom;
        }
    }
    Ok(p)
}

/// Which binomial lower index to use in the `alpha = 1/2, theta = 0`
/// closed form `C(2n-k-1, .) 2^{k+1-2n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnHalfIndex {
    /// Lower index `n - 1`; agrees with [`exact_kn_pmf`].
    NMinusOne,
    /// Lower index `n`, as the formula is often printed. Does not sum to one.
    N,
}

pub fn kn_closed_form_half_variant(n: usize, k: usize, index: KnHalfIndex) -> Result<f64> {
    if n == 0 || k == 0 || k > n {
        return Err(Error::domain(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let top = (2 * n - k - 1) as f64;
    let lower = match index {
        KnHalfIndex::NMinusOne => (n - 1) as f64,
        KnHalfIndex::N => n as f64,
    };
    let ln_c = ln_choose(top, lower);
    if ln_c == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok((ln_c + (k as f64 + 1.0 - 2.0 * n as f64) * std::f64::consts::LN_2).exp())
}

/// `P_{1/2,0}(K_n = k) = C(2n-k-1, n-1) 2^{k+1-2n}`.
pub fn kn_closed_form_half(n: usize, k: usize) -> Result<f64> {
    kn_closed_form_half_variant(n, k, KnHalfIndex::NMinusOne)
}

/// `ln C(n, k)` on integers, shared by kernels.
pub(crate) fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    lgamma(n as f64 + 1.0) - lgamma(k as f64 + 1.0) - lgamma((n - k) as f64 + 1.0)
}
