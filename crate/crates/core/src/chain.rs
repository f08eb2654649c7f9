//! The Mittag-Leffler chain `(S_{alpha,theta+j}^{-alpha})_{j>=0}`, its
//! spacings, the conditioned chain given `T_0 = t`, and the cross-index
//! coagulation identities.
//!
//! Paths are drawn top-down: the level-`r` variable first, then
//! `v[j-1] = v[j] * B_j` with independent
//! `B_j ~ Beta((theta + alpha + j - 1)/alpha, (1 - alpha)/alpha)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::samplers::{sample_beta, sample_exp, sample_gamma, sample_gml, BetaParams, REJECTION_CAP};
use crate::special::{beta_moment, lgamma, neg_moment, stable_pdf, AlphaTheta, MomentQuery};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MLChainPath {
    pub params: AlphaTheta,
    /// `values[j]` realizes `S_{alpha,theta+j}^{-alpha}`, `j = 0..=r`.
    pub values: Vec<f64>,
    /// `betas[j-1]` realizes `B_j = values[j-1] / values[j]`, `j = 1..=r`.
    pub betas: Vec<f64>,
}

impl MLChainPath {
    pub fn r(&self) -> usize {
        self.betas.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingVector {
    pub xi: Vec<f64>,
}

impl SpacingVector {
    pub fn max(&self) -> f64 {
        self.xi.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn chain_beta(alpha: f64, theta: f64, j: usize) -> Result<BetaParams> {
    BetaParams::new((theta + alpha + j as f64 - 1.0) / alpha, (1.0 - alpha) / alpha)
}

pub fn sample_chain(p: AlphaTheta, r: usize, rng: &mut RngStream) -> Result<MLChainPath> {
    let (alpha, theta) = (p.alpha(), p.theta());
    let mut values = vec![0.0; r + 1];
    let mut betas = vec![0.0; r];
    values[r] = sample_gml(p.shifted(r as f64)?, rng)?;
    for j in (1..=r).rev() {
        let b = sample_beta(chain_beta(alpha, theta, j)?, rng);
        betas[j - 1] = b;
        values[j - 1] = values[j] * b;
    }
    Ok(MLChainPath { params: p, values, betas })
}

/// `xi[0] = v[0]`, `xi[j] = v[j] - v[j-1]`.
pub fn spacings(path: &MLChainPath) -> SpacingVector {
    let v = &path.values;
    let mut xi = Vec::with_capacity(v.len());
    xi.push(v[0]);
    xi.extend(v.windows(2).map(|w| w[1] - w[0]));
    SpacingVector { xi }
}

/// `alpha = 1/(2 + beta)`, `theta = 1 - 2 alpha`, for `beta > -1`.
pub fn mori_params(beta: f64) -> Result<AlphaTheta> {
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(Error::domain(format!("beta must exceed -1, got {beta}")));
    }
    let alpha = 1.0 / (2.0 + beta);
    AlphaTheta::new(alpha, 1.0 - 2.0 * alpha)
}

/// Chain whose spacings are the limiting scaled degrees of the
/// `beta`-recursive tree.
pub fn mori_chain(beta: f64, r: usize, rng: &mut RngStream) -> Result<MLChainPath> {
    sample_chain(mori_params(beta)?, r, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionedChain {
    pub alpha: f64,
    pub t: f64,
    /// `tvalues[k] = T_{alpha,k}`, `tvalues[0] = t`; strictly decreasing.
    pub tvalues: Vec<f64>,
    /// `vratios[k-1] = V_k = (T_k / T_{k-1})^alpha`.
    pub vratios: Vec<f64>,
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be positive and finite, got {t}")));
    }
    Ok(())
}

/// `alpha = 1/2` chain given `T_0 = t`: `T_k = 1 / (4 (e_1 + ... + e_k) + 1/t)`.
pub fn sample_conditioned_chain_half(t: f64, r: usize, rng: &mut RngStream) -> Result<ConditionedChain> {
    check_t(t)?;
    let mut tvalues = Vec::with_capacity(r + 1);
    let mut vratios = Vec::with_capacity(r);
    tvalues.push(t);
    let mut acc = 1.0 / t;
    for _ in 0..r {
        acc += 4.0 * sample_exp(rng);
        let tk = 1.0 / acc;
        let prev = *tvalues.last().expect("non-empty");
        vratios.push((tk / prev).sqrt());
        tvalues.push(tk);
    }
    Ok(ConditionedChain { alpha: 0.5, t, tvalues, vratios })
}

/// Density of `V_1` given `T_0 = t`:
/// `alpha (1-v)^{(1-alpha)/alpha - 1} f_alpha(v^{1/alpha} t) / (Gamma((1-alpha)/alpha) t f_alpha(t))`.
pub fn conditioned_v_density(alpha: f64, t: f64, v: f64) -> Result<f64> {
    check_t(t)?;
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::domain(format!("v must lie in (0,1), got {v}")));
    }
    let k = (1.0 - alpha) / alpha;
    let num = stable_pdf(alpha, v.powf(1.0 / alpha) * t)?;
    let den = stable_pdf(alpha, t)?;
    if den == 0.0 {
        return Err(Error::numeric("conditioned_v_density", format!("f_alpha({t}) underflows")));
    }
    Ok((alpha.ln() + (k - 1.0) * (-v).ln_1p() - lgamma(k) - t.ln()).exp() * num / den)
}

/// Rejection sampler for one step `T_0 = t -> T_1 = s` of the conditioned chain.
///
/// Proposal `v ~ Beta(1, (1-alpha)/alpha)`, accepted with probability
/// `f_alpha(v^{1/alpha} t) / M` where `M = 1.1 * max_{s <= t} f_alpha(s)`.
#[derive(Debug, Clone)]
pub struct ConditionedStep {
    alpha: f64,
    t: f64,
    bound: f64,
    envelope: BetaParams,
}

impl ConditionedStep {
    pub fn new(alpha: f64, t: f64) -> Result<Self> {
        AlphaTheta::new(alpha, 0.0)?;
        check_t(t)?;
        let peak = max_density_below(alpha, t)?;
        if !(peak > 0.0) {
            return Err(Error::numeric(
                "conditioned_step",
                format!("f_alpha vanishes on (0, {t}] at alpha={alpha}"),
            ));
        }
        Ok(ConditionedStep {
            alpha,
            t,
            bound: 1.1 * peak,
            envelope: BetaParams::new(1.0, (1.0 - alpha) / alpha)?,
        })
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Returns `(s, v)` with `s = t v^{1/alpha} < t`.
    pub fn sample(&self, rng: &mut RngStream) -> Result<(f64, f64)> {
        for _ in 0..REJECTION_CAP {
            let v = sample_beta(self.envelope, rng);
            let s = self.t * v.powf(1.0 / self.alpha);
            let ratio = if s > 0.0 { stable_pdf(self.alpha, s)? / self.bound } else { 0.0 };
            if ratio > 1.0 {
                return Err(Error::numeric(
                    "conditioned_step",
                    format!("envelope violated: f({s}) / M = {ratio} at alpha={}, t={}", self.alpha, self.t),
                ));
            }
            if rng.uniform_open() <= ratio {
                return Ok((s, v));
            }
        }
        Err(Error::numeric(
            "conditioned_step",
            format!("rejection cap {REJECTION_CAP} exceeded at alpha={}, t={}", self.alpha, self.t),
        ))
    }
}

pub fn sample_conditioned_step_general(alpha: f64, t: f64, rng: &mut RngStream) -> Result<(f64, f64)> {
    ConditionedStep::new(alpha, t)?.sample(rng)
}

/// `max_{0 < s <= t} f_alpha(s)`: log-spaced grid, then golden section on the
/// bracketing cell. The stable density is unimodal.
fn max_density_below(alpha: f64, t: f64) -> Result<f64> {
    let hi = t.ln();
    let lo = hi.min(0.0) - 30.0;
    let n = 160;
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut grid = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let f = stable_pdf(alpha, x.exp())?;
        grid.push(x);
        if f > best.0 {
            best = (f, i);
        }
    }
    let (mut a, mut b) = (grid[best.1.saturating_sub(1)], grid[(best.1 + 1).min(n)]);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |x: f64| stable_pdf(alpha, x.exp());
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(best.0.max(fc).max(fd))
}

fn check_coag(alpha: f64, delta: f64, theta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::domain(format!("delta must lie in (0,1], got {delta}")));
    }
    if !(theta + alpha * delta > 0.0) || !theta.is_finite() {
        return Err(Error::domain(format!(
            "theta must exceed -alpha*delta, got theta={theta}, alpha*delta={}",
            alpha * delta
        )));
    }
    Ok(())
}

/// `S_{delta,theta}^{-delta}`, with `S_{1,.} = 1`.
fn gml_or_one(delta: f64, theta: f64, rng: &mut RngStream) -> Result<f64> {
    if delta == 1.0 {
        Ok(1.0)
    } else {
        sample_gml(AlphaTheta::new(delta, theta)?, rng)
    }
}

/// Independent draws of the two sides of
/// `S_{alpha delta,theta}^{-alpha delta} = S_{alpha,theta}^{-alpha delta} S_{delta,theta/alpha}^{-delta}`.
pub fn coag_identity_pair(alpha: f64, delta: f64, theta: f64, rng: &mut RngStream) -> Result<(f64, f64)> {
    check_coag(alpha, delta, theta)?;
    let ad = alpha * delta;
    let lhs = sample_gml(AlphaTheta::new(ad, theta)?, rng)?;
    let a = sample_gml(AlphaTheta::new(alpha, theta)?, rng)?.powf(delta);
    let b = gml_or_one(delta, theta / alpha, rng)?;
    Ok((lhs, a * b))
}

/// `S_{1/2,theta}^{-1/2} = 2 G_{theta+1/2}^{1/2}`.
pub fn sample_gml_half_exact(theta: f64, rng: &mut RngStream) -> Result<f64> {
    Ok(2.0 * sample_gamma(theta + 0.5, rng)?.sqrt())
}

fn coag_beta_params(alpha: f64, delta: f64, theta: f64) -> Result<(BetaParams, BetaParams)> {
    let ad = alpha * delta;
    Ok((
        BetaParams::new((theta + ad) / alpha, (1.0 - ad) / alpha)?,
        BetaParams::new((theta + ad) / ad, (1.0 - ad) / ad)?,
    ))
}

/// Independent draws of the two sides of
/// `S_{delta,theta/alpha+delta}^{-delta} B^delta_{((theta+ad)/alpha,(1-ad)/alpha)}
///  = S_{delta,(1+theta)/alpha}^{-delta} B_{((theta+ad)/ad,(1-ad)/ad)}`, `ad = alpha delta`.
pub fn coag_beta_identity_pair(alpha: f64, delta: f64, theta: f64, rng: &mut RngStream) -> Result<(f64, f64)> {
    check_coag(alpha, delta, theta)?;
    let (b_left, b_right) = coag_beta_params(alpha, delta, theta)?;
    let lhs = gml_or_one(delta, theta / alpha + delta, rng)? * sample_beta(b_left, rng).powf(delta);
    let rhs = gml_or_one(delta, (1.0 + theta) / alpha, rng)? * sample_beta(b_right, rng);
    Ok((lhs, rhs))
}

/// `(E[lhs^s], E[rhs^s])` for [`coag_beta_identity_pair`], in closed form.
pub fn coag_beta_moments(alpha: f64, delta: f64, theta: f64, s: f64) -> Result<(f64, f64)> {
    check_coag(alpha, delta, theta)?;
    let (b_left, b_right) = coag_beta_params(alpha, delta, theta)?;
    let stable = |th: f64| -> Result<f64> {
        if delta == 1.0 {
            Ok(1.0)
        } else {
            Ok(neg_moment(MomentQuery::new(delta, th, delta * s)?))
        }
    };
    let lhs = stable(theta / alpha + delta)? * beta_moment(b_left.a(), b_left.b(), delta * s);
    let rhs = stable((1.0 + theta) / alpha)? * beta_moment(b_right.a(), b_right.b(), s);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quad::{integrate_pieces, Tolerance};

    fn corr(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
        for (a, b) in x.iter().zip(y) {
            sxy += (a - mx) * (b - my);
            sxx += (a - mx) * (a - mx);
            syy += (b - my) * (b - my);
        }
        sxy / (sxx * syy).sqrt()
    }

    #[test]
    fn spacings_arithmetic() {
        let p = AlphaTheta::new(0.5, 0.0).unwrap();
        let path = MLChainPath { params: p, values: vec![1.0, 3.0, 4.0], betas: vec![1.0 / 3.0, 0.75] };
        let s = spacings(&path);
        assert_eq!(s.xi, vec![1.0, 2.0, 1.0]);
        assert_eq!(s.xi.iter().sum::<f64>(), 4.0);
        assert_eq!(s.max(), 2.0);
    }

    #[test]
    fn mori_parameters() {
        let p = mori_params(0.0).unwrap();
        assert_eq!((p.alpha(), p.theta()), (0.5, 0.0));
        let p = mori_params(2.0).unwrap();
        assert_eq!((p.alpha(), p.theta()), (0.25, 0.5));
        let p = mori_params(-0.5).unwrap();
        assert!((p.alpha() - 2.0 / 3.0).abs() < 1e-15 && (p.theta() + 1.0 / 3.0).abs() < 1e-15);
        assert!(mori_params(-1.0).is_err());
    }

    #[test]
    fn path_invariants_and_marginal_mean() {
        let p = AlphaTheta::new(0.5, 0.0).unwrap();
        let mut rng = RngStream::new(3, 0);
        let n = 100_000;
        let mut sum1 = 0.0;
        for _ in 0..n {
            let path = sample_chain(p, 3, &mut rng).unwrap();
            for j in 1..=3 {
                let b = path.betas[j - 1];
                assert!(b > 0.0 && b < 1.0);
                assert!(path.values[j - 1] < path.values[j]);
                assert_eq!(path.values[j - 1], path.values[j] * b);
            }
            sum1 += path.values[1];
        }
        // E[S_{1/2,1}^{-1/2}] = 4/sqrt(pi).
        let exact = neg_moment(MomentQuery::new(0.5, 1.0, 0.5).unwrap());
        assert!((sum1 / n as f64 - exact).abs() < 0.02, "{}", sum1 / n as f64);
        let zero = sample_chain(p, 0, &mut rng).unwrap();
        assert_eq!(zero.values.len(), 1);
        assert!(zero.betas.is_empty());
    }

    #[test]
    fn ratio_independent_of_top() {
        let p = AlphaTheta::new(0.5, 0.5).unwrap();
        let mut rng = RngStream::new(4, 0);
        let (mut b, mut top) = (Vec::new(), Vec::new());
        for _ in 0..100_000 {
            let path = sample_chain(p, 1, &mut rng).unwrap();
            b.push(path.betas[0]);
            top.push(path.values[1]);
        }
        assert!(corr(&b, &top).abs() < 0.01);
    }

    #[test]
    fn half_chain_shape() {
        let mut rng = RngStream::new(5, 0);
        for _ in 0..1000 {
            let c = sample_conditioned_chain_half(1.0, 5, &mut rng).unwrap();
            assert_eq!(c.tvalues.len(), 6);
            for k in 1..=5 {
                assert!(c.tvalues[k] < c.tvalues[k - 1]);
                let back = c.tvalues[k] * c.vratios[k - 1].powi(-2);
                assert!((back - c.tvalues[k - 1]).abs() < 1e-12 * c.tvalues[k - 1]);
            }
        }
        assert!(sample_conditioned_chain_half(0.0, 1, &mut rng).is_err());
    }

    #[test]
    fn conditioned_density_normalised() {
        for &(alpha, t) in &[(0.7, 1.0), (0.5, 2.0), (0.3, 0.5)] {
            let r = integrate_pieces(
                |v| if v < 1.0 { conditioned_v_density(alpha, t, v).unwrap() } else { 0.0 },
                &[0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 1.0],
                Tolerance::rel(1e-9),
            )
            .unwrap();
            assert!((r.value - 1.0).abs() < 1e-6, "alpha={alpha} t={t}: {}", r.value);
        }
    }

    #[test]
    fn general_step_support_and_mean() {
        let step = ConditionedStep::new(0.5, 1.0).unwrap();
        let mut rng = RngStream::new(6, 0);
        let n = 20_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let (s, v) = step.sample(&mut rng).unwrap();
            assert!(s < 1.0 && v > 0.0 && v < 1.0);
            sum += v;
        }
        // E[V_1 | t=1] = E[(4e+1)^{-1/2}] = sqrt(pi) e^{1/4} erfc(1/2) / 2.
        let exact = 0.5 * std::f64::consts::PI.sqrt() * 0.25f64.exp() * libm::erfc(0.5);
        assert!((sum / n as f64 - exact).abs() < 0.006, "{} vs {exact}", sum / n as f64);
    }

    #[test]
    fn coag_pair_domains_and_degenerate_delta() {
        let mut rng = RngStream::new(7, 0);
        assert!(coag_identity_pair(0.5, 0.0, 0.0, &mut rng).is_err());
        assert!(coag_identity_pair(0.5, 0.5, -0.3, &mut rng).is_err());
        // delta = 1: both sides are S_{alpha,theta}^{-alpha}.
        let mut a = RngStream::new(8, 1);
        let mut b = RngStream::new(8, 1);
        let (l, r) = coag_identity_pair(0.6, 1.0, 0.2, &mut a).unwrap();
        let direct = sample_gml(AlphaTheta::new(0.6, 0.2).unwrap(), &mut b).unwrap();
        assert_eq!(l, direct);
        assert!(r > 0.0);
        // Bolthausen-Sznitman parameters are admissible.
        let (s, t) = (0.3f64, 0.7f64);
        assert!(coag_identity_pair((-s).exp(), (-(t - s)).exp(), 0.0, &mut rng).is_ok());
    }

    #[test]
    fn coag_beta_moments_agree() {
        for &(alpha, delta, theta) in &[(0.5, 0.5, 0.0), (0.8, 0.625, 0.4), (0.3, 0.9, 1.5), (0.6, 1.0, 0.2)] {
            for &s in &[0.5, 1.0, 2.0, -0.1] {
                let (l, r) = coag_beta_moments(alpha, delta, theta, s).unwrap();
                assert!(((l - r) / r).abs() < 1e-10, "({alpha},{delta},{theta}) s={s}: {l} vs {r}");
            }
        }
    }
}
