//! Deterministic numerical kernels.
//!
//! Everything here is a pure function. Gamma ratios are evaluated in log
//! space so block counts in the millions do not overflow.

mod kummer;
mod pmf;
pub mod quad;
mod stable;

pub use kummer::{kummer_u, ln_kummer_u};
pub use pmf::{exact_kn_pmf, kn_closed_form_half, kn_closed_form_half_variant, KnHalfIndex};
pub use stable::{kanter_ln_a, stable_pdf, stable_pdf_half};
pub use pmf::check_crp_params;
pub(crate) use pmf::ln_binomial;
pub(crate) use stable::kanter_ln_a0;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index and tilt `(alpha, theta)` of a polynomially tilted stable law,
/// with `0 < alpha < 1` and `theta > -alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaTheta {
    alpha: f64,
    theta: f64,
}

impl AlphaTheta {
    pub fn new(alpha: f64, theta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
        }
        if !(theta + alpha > 0.0) || !theta.is_finite() {
            return Err(Error::domain(format!(
                "theta must exceed -alpha (theta + alpha > 0), got alpha={alpha}, theta={theta}"
            )));
        }
        Ok(AlphaTheta { alpha, theta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The same index with the tilt shifted by `by` (e.g. `theta + r`).
    pub fn shifted(&self, by: f64) -> Result<Self> {
        AlphaTheta::new(self.alpha, self.theta + by)
    }
}

/// A request for `E[S_{alpha,theta}^{-delta}]`; requires `delta + theta > -alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentQuery {
    pub params: AlphaTheta,
    pub delta: f64,
}

impl MomentQuery {
    pub fn new(alpha: f64, theta: f64, delta: f64) -> Result<Self> {
        let params = AlphaTheta::new(alpha, theta)?;
        if !(delta + theta + alpha > 0.0) {
            return Err(Error::domain(format!(
                "moment order must satisfy delta + theta + alpha > 0, got delta={delta}"
            )));
        }
        Ok(MomentQuery { params, delta })
    }
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    Ok(lgamma(x))
}

/// Unchecked `ln Gamma` for internal use where positivity is already known.
#[inline]
pub(crate) fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln C(n, k)` for real `n >= k >= 0`; `-inf` when `k > n`.
pub(crate) fn ln_choose(n: f64, k: f64) -> f64 {
    if k < 0.0 || k > n {
        return f64::NEG_INFINITY;
    }
    lgamma(n + 1.0) - lgamma(k + 1.0) - lgamma(n - k + 1.0)
}

/// Log of `E[S_{alpha,theta}^{-delta}]`.
pub fn ln_neg_moment(q: MomentQuery) -> f64 {
    let (a, t, d) = (q.params.alpha, q.params.theta, q.delta);
    // Paired so that delta = 0 cancels exactly.
    (lgamma((t + d) / a + 1.0) - lgamma(t / a + 1.0)) + (lgamma(t + 1.0) - lgamma(t + d + 1.0))
}

/// Negative moment `E[S_{alpha,theta}^{-delta}]` of the tilted stable law:
///
/// `Gamma((theta+delta)/alpha + 1) Gamma(theta + 1) / (Gamma(theta+delta+1) Gamma(theta/alpha + 1))`.
pub fn neg_moment(q: MomentQuery) -> f64 {
    ln_neg_moment(q).exp()
}

/// `E[B^s]` for `B ~ Beta(a, b)`, valid for `a + s > 0`.
pub fn beta_moment(a: f64, b: f64, s: f64) -> f64 {
    (lgamma(a + s) + lgamma(a + b) - lgamma(a) - lgamma(a + b + s)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ln_gamma_reference_points() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-15);
        let half = 0.5 * std::f64::consts::PI.ln();
        assert!(rel(ln_gamma(0.5).unwrap(), half) < 1e-13);
        assert!(rel(ln_gamma(10.0).unwrap(), 362_880f64.ln()) < 1e-13);
        // ln Gamma(1e6) via Stirling with three correction terms.
        let x: f64 = 1e6;
        let stirling = (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln()
            + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3));
        assert!(rel(ln_gamma(x).unwrap(), stirling) < 1e-13);
    }

    #[test]
    fn ln_gamma_rejects_non_positive() {
        assert!(matches!(ln_gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(ln_gamma(-1.5), Err(Error::Domain(_))));
        assert!(matches!(ln_gamma(f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn alpha_theta_validation() {
        assert!(AlphaTheta::new(0.5, -0.49).is_ok());
        assert!(AlphaTheta::new(0.5, -0.5).is_err());
        assert!(AlphaTheta::new(0.0, 1.0).is_err());
        assert!(AlphaTheta::new(1.0, 1.0).is_err());
        assert!(MomentQuery::new(0.5, 0.0, -0.5).is_err());
        assert!(MomentQuery::new(0.5, 0.0, -0.49).is_ok());
    }

    #[test]
    fn neg_moment_examples() {
        let m = |a, t, d| neg_moment(MomentQuery::new(a, t, d).unwrap());
        assert!((m(0.5, 0.0, 0.0) - 1.0).abs() < 1e-15);
        assert!(rel(m(0.5, 0.0, 0.5), std::f64::consts::FRAC_2_SQRT_PI) < 1e-13);
        assert!(rel(m(0.5, 0.5, 0.5), 1.772_453_850_905_516) < 1e-13);
        // Gamma(4)Gamma(2)/(Gamma(2.5)Gamma(3)) = 4/sqrt(pi), also 2 E[G_{3/2}^{1/2}].
        assert!(rel(m(0.5, 1.0, 0.5), 2.256_758_334_191_025) < 1e-13);
    }

    #[test]
    fn large_arguments_do_not_overflow() {
        let v = neg_moment(MomentQuery::new(0.3, 1e6, 0.3).unwrap());
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn beta_moment_mean() {
        assert!((beta_moment(2.0, 1.0, 1.0) - 2.0 / 3.0).abs() < 1e-14);
    }

    proptest::proptest! {
        #[test]
        fn zeroth_moment_is_one(alpha in 0.01f64..0.99, shift in 0.001f64..20.0) {
            let theta = shift - alpha;
            let q = MomentQuery::new(alpha, theta, 0.0).unwrap();
            proptest::prop_assert!((neg_moment(q) - 1.0).abs() < 1e-12);
        }
    }
}
