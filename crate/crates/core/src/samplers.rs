//! Random variates for the primitive laws: gamma, beta, positive stable,
//! polynomially tilted stable and generalized Mittag-Leffler.
//!
//! Stable variates use Kanter's representation of the Chambers-Mallows-Stuck
//! transform: with `U ~ Unif(0, pi)` and `E ~ Exp(1)` independent,
//! `S = (A(U) / E)^{(1-alpha)/alpha}` has Laplace transform `exp(-w^alpha)`.
//!
//! Tilting by `t^{-theta}` with `theta > 0` multiplies the joint density of
//! `(U, E)` by `(E / A(U))^{c}`, `c = theta (1-alpha)/alpha`. The two
//! coordinates stay independent: `E ~ Gamma(1 + c)` and `U` has density
//! proportional to `exp(-c phi(U))`, `phi = ln A - ln A(0)`. Because
//! `phi(u) >= alpha u^2 / 2` with equality to second order at 0, a half-normal
//! envelope of scale `(c alpha)^{-1/2}` is tight for large `c` and the
//! rejection step is exact.

use std::f64::consts::PI;

use rand_distr::{Distribution, Exp1, Gamma};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::{kanter_ln_a, kanter_ln_a0, AlphaTheta};

/// Rejection loops give up after this many proposals.
pub const REJECTION_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    a: f64,
    b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::domain(format!("Beta parameters must be positive, got ({a}, {b})")));
        }
        Ok(BetaParams { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

pub fn sample_exp(rng: &mut RngStream) -> f64 {
    Exp1.sample(rng)
}

pub fn sample_gamma(shape: f64, rng: &mut RngStream) -> Result<f64> {
    if !(shape > 0.0) || !shape.is_finite() {
        return Err(Error::domain(format!("gamma shape must be positive, got {shape}")));
    }
    Ok(gamma_unchecked(shape, rng))
}

#[inline]
fn gamma_unchecked(shape: f64, rng: &mut RngStream) -> f64 {
    Gamma::new(shape, 1.0)
        .expect("shape validated by caller")
        .sample(rng)
}

/// `Beta(a, b)` as `X / (X + Y)` with independent gammas.
///
/// The result is clamped into the open unit interval: for small `b` the
/// exact value can be closer to 1 than the spacing of doubles.
pub fn sample_beta(p: BetaParams, rng: &mut RngStream) -> f64 {
    let x = gamma_unchecked(p.a, rng);
    let y = gamma_unchecked(p.b, rng);
    let s = x + y;
    let v = if s > 0.0 { x / s } else { 0.5 };
    v.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    Ok(())
}

/// `ln S` for `S = (A(U)/E)^{(1-alpha)/alpha}`.
fn ln_stable(alpha: f64, rng: &mut RngStream) -> f64 {
    let u = PI * rng.uniform_open();
    let e = sample_exp(rng);
    (1.0 - alpha) / alpha * (kanter_ln_a(alpha, u) - e.ln())
}

/// Positive alpha-stable variate with `E[exp(-w S)] = exp(-w^alpha)`.
pub fn sample_stable(alpha: f64, rng: &mut RngStream) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(ln_stable(alpha, rng).exp())
}

/// Draws `U` on `(0, pi)` with density proportional to `exp(-c phi(U))`.
fn tilted_angle(alpha: f64, c: f64, rng: &mut RngStream) -> Result<f64> {
    let ln_a0 = kanter_ln_a0(alpha);
    let sigma = 1.0 / (c * alpha).sqrt();
    for _ in 0..REJECTION_CAP {
        if sigma > PI {
            let u = PI * rng.uniform_open();
            let phi = kanter_ln_a(alpha, u) - ln_a0;
            if rng.uniform_open() <= (-c * phi).exp() {
                return Ok(u);
            }
        } else {
            let z: f64 = rand_distr::StandardNormal.sample(rng);
            let u = (z * sigma).abs();
            if !(u > 0.0 && u < PI) {
                continue;
            }
            let phi = kanter_ln_a(alpha, u) - ln_a0;
            let excess = phi - 0.5 * alpha * u * u;
            if rng.uniform_open() <= (-c * excess).exp() {
                return Ok(u);
            }
        }
    }
    Err(Error::numeric(
        "sample_tilted_stable",
        format!("rejection cap {REJECTION_CAP} exceeded at alpha={alpha}, c={c}"),
    ))
}

/// `ln S_{alpha,theta}`.
pub(crate) fn ln_tilted_stable(p: AlphaTheta, rng: &mut RngStream) -> Result<f64> {
    let (alpha, theta) = (p.alpha(), p.theta());
    if theta == 0.0 {
        return Ok(ln_stable(alpha, rng));
    }
    if theta < 0.0 {
        // S_theta = S_{theta+1} * B^{-1/alpha}, B ~ Beta((theta+alpha)/alpha, (1-alpha)/alpha).
        let up = ln_tilted_stable(p.shifted(1.0)?, rng)?;
        let b = sample_beta(
            BetaParams::new((theta + alpha) / alpha, (1.0 - alpha) / alpha)?,
            rng,
        );
        return Ok(up - b.ln() / alpha);
    }
    let c = theta * (1.0 - alpha) / alpha;
    let u = tilted_angle(alpha, c, rng)?;
    let e = gamma_unchecked(1.0 + c, rng);
    Ok((1.0 - alpha) / alpha * (kanter_ln_a(alpha, u) - e.ln()))
}

/// Exact draw from the density proportional to `t^{-theta} f_alpha(t)`.
pub fn sample_tilted_stable(p: AlphaTheta, rng: &mut RngStream) -> Result<f64> {
    Ok(ln_tilted_stable(p, rng)?.exp())
}

/// Generalized Mittag-Leffler variate `S_{alpha,theta}^{-alpha}`.
pub fn sample_gml(p: AlphaTheta, rng: &mut RngStream) -> Result<f64> {
    Ok((-p.alpha() * ln_tilted_stable(p, rng)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{neg_moment, MomentQuery};

    fn mean_se(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
        (m, (v / n).sqrt())
    }

    #[test]
    fn gamma_moments() {
        let mut rng = RngStream::new(11, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| sample_gamma(2.0, &mut rng).unwrap()).collect();
        let (m, _) = mean_se(&xs);
        let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0);
        assert!((m - 2.0).abs() < 0.02);
        assert!((var - 2.0).abs() < 0.1);
        assert!(sample_gamma(0.0, &mut rng).is_err());
        assert!(sample_gamma(-1.0, &mut rng).is_err());
    }

    #[test]
    fn beta_mean_and_domain() {
        let mut rng = RngStream::new(12, 0);
        let p = BetaParams::new(2.0, 1.0).unwrap();
        let xs: Vec<f64> = (0..100_000).map(|_| sample_beta(p, &mut rng)).collect();
        assert!((mean_se(&xs).0 - 2.0 / 3.0).abs() < 0.005);
        assert!(xs.iter().all(|&x| x > 0.0 && x < 1.0));
        assert!(BetaParams::new(0.0, 1.0).is_err());
        assert!(BetaParams::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn stable_laplace_transform() {
        let mut rng = RngStream::new(13, 0);
        let n = 100_000;
        let m: f64 = (0..n).map(|_| (-sample_stable(0.5, &mut rng).unwrap()).exp()).sum::<f64>() / n as f64;
        assert!((m - (-1.0f64).exp()).abs() < 0.004);
        let m: f64 = (0..n)
            .map(|_| (-2.0 * sample_stable(0.8, &mut rng).unwrap()).exp())
            .sum::<f64>()
            / n as f64;
        assert!((m - (-(2.0f64).powf(0.8)).exp()).abs() < 0.003);
        assert!(sample_stable(1.0, &mut rng).is_err());
    }

    #[test]
    fn theta_zero_matches_stable_stream() {
        let p = AlphaTheta::new(0.6, 0.0).unwrap();
        let mut a = RngStream::new(5, 9);
        let mut b = RngStream::new(5, 9);
        for _ in 0..1000 {
            assert_eq!(
                sample_tilted_stable(p, &mut a).unwrap().to_bits(),
                sample_stable(0.6, &mut b).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn negative_moments_within_three_se() {
        let grid = [(0.5, 0.0), (0.5, 1.0), (0.3, 2.5), (0.8, 0.4), (0.6, -0.3), (0.9, 5.0), (0.1, 0.05)];
        for (i, &(alpha, theta)) in grid.iter().enumerate() {
            let p = AlphaTheta::new(alpha, theta).unwrap();
            let mut rng = RngStream::new(21, i as u64);
            let ln_s: Vec<f64> = (0..100_000).map(|_| ln_tilted_stable(p, &mut rng).unwrap()).collect();
            for &delta in &[alpha / 2.0, alpha, 2.0 * alpha] {
                let xs: Vec<f64> = ln_s.iter().map(|l| (-delta * l).exp()).collect();
                let (m, se) = mean_se(&xs);
                let exact = neg_moment(MomentQuery::new(alpha, theta, delta).unwrap());
                assert!(
                    (m - exact).abs() < 3.0 * se + 1e-12,
                    "alpha={alpha} theta={theta} delta={delta}: {m} vs {exact} (se {se})"
                );
            }
        }
    }

    #[test]
    fn gml_positive_with_known_mean() {
        let p = AlphaTheta::new(0.5, 0.0).unwrap();
        let mut rng = RngStream::new(31, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| sample_gml(p, &mut rng).unwrap()).collect();
        assert!(xs.iter().all(|&x| x > 0.0));
        assert!((mean_se(&xs).0 - 2.0 / PI.sqrt()).abs() < 0.01);
    }

    #[test]
    fn deterministic_under_fixed_stream() {
        let p = AlphaTheta::new(0.35, 1.7).unwrap();
        let run = || {
            let mut r = RngStream::new(99, 4);
            (0..500).map(|_| sample_tilted_stable(p, &mut r).unwrap().to_bits()).collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
