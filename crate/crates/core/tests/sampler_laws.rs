//! Distributional checks of the variate generators and the chain samplers
//! against exact representations (gamma, exponential, closed-form CDFs).

use mlpa::chain::{
    coag_beta_identity_pair, coag_identity_pair, mori_chain, sample_chain, sample_conditioned_chain_half,
    sample_conditioned_step_general, spacings,
};
use mlpa::harness::{chi2_pmf_test, ks_one_sample, ks_two_sample};
use mlpa::samplers::{sample_beta, sample_gamma, sample_gml, sample_stable, sample_tilted_stable, BetaParams};
use mlpa::special::neg_moment;
use mlpa::{AlphaTheta, MomentQuery, RngStream};
use statrs::distribution::{ContinuousCDF, Gamma};

const N: usize = 100_000;
const LEVEL: f64 = 0.01;

fn draw<F: FnMut(&mut RngStream) -> f64>(seed: u64, stream: u64, n: usize, mut f: F) -> Vec<f64> {
    let mut rng = RngStream::new(seed, stream);
    (0..n).map(|_| f(&mut rng)).collect()
}

fn mean_se(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, _) = mean_se(x);
    let (my, _) = mean_se(y);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

fn gamma_cdf(shape: f64) -> impl Fn(f64) -> f64 {
    let g = Gamma::new(shape, 1.0).unwrap();
    move |x| g.cdf(x)
}

#[test]
fn half_stable_is_reciprocal_gamma() {
    // S_{1/2} = 1/(4 G_{1/2}), so P(S <= s) = P(G_{1/2} >= 1/(4s)).
    let x = draw(11, 0, N, |r| sample_stable(0.5, r).unwrap());
    let g = gamma_cdf(0.5);
    let ks = ks_one_sample(&x, |s| 1.0 - g(0.25 / s)).unwrap();
    assert!(ks.p_value > LEVEL, "{ks:?}");
    let via_gamma = draw(11, 1, N, |r| 0.25 / sample_gamma(0.5, r).unwrap());
    assert!(ks_two_sample(&x, &via_gamma).unwrap().p_value > LEVEL);
}

#[test]
fn stable_laplace_transform_at_two() {
    let x = draw(12, 0, N, |r| (-2.0 * sample_stable(0.8, r).unwrap()).exp());
    let (m, _) = mean_se(&x);
    assert!((m - (-(2f64.powf(0.8))).exp()).abs() < 0.003, "{m}");
}

#[test]
fn beta_laws() {
    let u = draw(13, 0, N, |r| sample_beta(BetaParams::new(1.0, 1.0).unwrap(), r));
    assert!(ks_one_sample(&u, |x| x).unwrap().p_value > LEVEL);
    // The chain's first beta at alpha = 1/2, theta = 0 has both parameters (1-alpha)/alpha.
    let p = BetaParams::new(1.0, 1.0).unwrap();
    let b = draw(13, 1, N, |r| sample_beta(p, r));
    let flipped = draw(13, 2, N, |r| 1.0 - sample_beta(p, r));
    assert!(ks_two_sample(&b, &flipped).unwrap().p_value > LEVEL);
    let q = BetaParams::new(3.0, 3.0).unwrap();
    let b = draw(13, 3, N, |r| sample_beta(q, r));
    assert!(ks_one_sample(&b, |x| x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)).unwrap().p_value > LEVEL);
    let m = draw(13, 4, N, |r| sample_beta(BetaParams::new(2.0, 1.0).unwrap(), r));
    assert!((mean_se(&m).0 - 2.0 / 3.0).abs() < 0.005);
}

#[test]
fn tilted_half_stable_gamma_identity() {
    // S_{1/2,1}^{-1/2} = 2 G_{3/2}^{1/2}.
    let p = AlphaTheta::new(0.5, 1.0).unwrap();
    let x = draw(14, 0, N, |r| sample_tilted_stable(p, r).unwrap().powf(-0.5));
    let g = gamma_cdf(1.5);
    let ks = ks_one_sample(&x, |y| g(y * y / 4.0)).unwrap();
    assert!(ks.p_value > LEVEL, "{ks:?}");
}

#[test]
fn gml_half_gamma_identity_and_mean() {
    let p = AlphaTheta::new(0.5, 0.5).unwrap();
    let x = draw(15, 0, N, |r| sample_gml(p, r).unwrap());
    let ks = ks_one_sample(&x, |y| 1.0 - (-y * y / 4.0).exp()).unwrap();
    assert!(ks.p_value > LEVEL, "{ks:?}");
    let p0 = AlphaTheta::new(0.5, 0.0).unwrap();
    let m = mean_se(&draw(15, 1, N, |r| sample_gml(p0, r).unwrap())).0;
    assert!((m - 2.0 / std::f64::consts::PI.sqrt()).abs() < 0.01, "{m}");
    assert!(x.iter().all(|&v| v > 0.0));
}

#[test]
fn negative_moment_grid_including_negative_theta() {
    for (i, &(alpha, theta)) in [(0.6, -0.3), (0.3, 0.0), (0.5, 1.0), (0.8, 2.5)].iter().enumerate() {
        let p = AlphaTheta::new(alpha, theta).unwrap();
        let s = draw(16, i as u64, N, |r| sample_tilted_stable(p, r).unwrap());
        for delta in [alpha / 2.0, alpha, 2.0 * alpha] {
            let x: Vec<f64> = s.iter().map(|v| v.powf(-delta)).collect();
            let (m, se) = mean_se(&x);
            let want = neg_moment(MomentQuery::new(alpha, theta, delta).unwrap());
            assert!((m - want).abs() < 3.0 * se, "alpha={alpha} theta={theta} delta={delta}: {m} vs {want} (se {se})");
        }
    }
}

#[test]
fn chain_marginal_and_independence() {
    let p = AlphaTheta::new(0.5, 0.0).unwrap();
    let mut rng = RngStream::new(17, 0);
    let v1: Vec<f64> = (0..N).map(|_| sample_chain(p, 1, &mut rng).unwrap().values[1]).collect();
    let (m, se) = mean_se(&v1);
    // v[1] = S_{1/2,1}^{-1/2} = 2 G_{3/2}^{1/2}, so E = 2 Gamma(2) / Gamma(3/2) = 4 / sqrt(pi).
    let want = 4.0 / std::f64::consts::PI.sqrt();
    assert!((m - want).abs() < 3.0 * se, "{m} vs {want}");

    let q = AlphaTheta::new(0.5, 0.5).unwrap();
    let paths: Vec<_> = (0..N).map(|_| sample_chain(q, 3, &mut rng).unwrap()).collect();
    let top: Vec<f64> = paths.iter().map(|p| p.values[3]).collect();
    for j in 0..3 {
        let b: Vec<f64> = paths.iter().map(|p| p.betas[j]).collect();
        assert!(pearson(&b, &top).abs() < 0.01, "beta {j}");
    }
    let ratio: Vec<f64> = paths.iter().map(|p| p.values[0] / p.values[1]).collect();
    let v1: Vec<f64> = paths.iter().map(|p| p.values[1]).collect();
    assert!(pearson(&ratio, &v1).abs() < 0.01);
}

#[test]
fn zero_step_chain_is_a_gml_draw() {
    let p = AlphaTheta::new(0.3, 0.4).unwrap();
    let mut a = RngStream::new(18, 5);
    let mut b = RngStream::new(18, 5);
    for _ in 0..100 {
        let path = sample_chain(p, 0, &mut a).unwrap();
        assert_eq!(path.values.len(), 1);
        assert!(path.betas.is_empty());
        assert_eq!(path.values[0].to_bits(), sample_gml(p, &mut b).unwrap().to_bits());
    }
}

#[test]
fn first_two_spacings_agree_at_beta_zero() {
    let xi0 = draw(19, 0, N, |r| spacings(&mori_chain(0.0, 1, r).unwrap()).xi[0]);
    let xi1 = draw(19, 1, N, |r| spacings(&mori_chain(0.0, 1, r).unwrap()).xi[1]);
    let ks = ks_two_sample(&xi0, &xi1).unwrap();
    assert!(ks.p_value > LEVEL, "{ks:?}");
}

#[test]
fn max_spacing_law_is_reproducible_across_seeds() {
    let a = draw(20, 0, 20_000, |r| spacings(&mori_chain(0.0, 10, r).unwrap()).max());
    let b = draw(21, 0, 20_000, |r| spacings(&mori_chain(0.0, 10, r).unwrap()).max());
    assert!(ks_two_sample(&a, &b).unwrap().p_value > LEVEL);
}

#[test]
fn conditioned_half_chain_first_step() {
    let root = draw(22, 0, N, |r| sample_conditioned_chain_half(1.0, 1, r).unwrap().tvalues[1].powf(-0.5));
    let (m, se) = mean_se(&root);
    // E[sqrt(4e + 1)] = 2 e^{1/4} Gamma(3/2, 1/4), evaluated independently.
    let want = 2.091_282_721_530_094;
    assert!((m - want).abs() < 3.0 * se, "{m} vs {want} (se {se})");

    for &t in &[1.0, 0.3] {
        let v = draw(23, 0, N, |r| sample_conditioned_chain_half(t, 1, r).unwrap().vratios[0]);
        // P(V_1 <= u) = exp(-(u^{-2} - 1) / (4t)), the integral of the closed-form density.
        let cdf = |u: f64| if u <= 0.0 { 0.0 } else { (-(1.0 / (u * u) - 1.0) / (4.0 * t)).exp() };
        let bins = 50;
        let mut counts = vec![0u64; bins];
        for &x in &v {
            counts[((x * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let probs: Vec<f64> = (0..bins).map(|i| cdf((i + 1) as f64 / bins as f64) - cdf(i as f64 / bins as f64)).collect();
        let c = chi2_pmf_test(&counts, &probs).unwrap();
        assert!(c.p_value > LEVEL, "t={t}: {c:?}");
    }
}

#[test]
fn conditioned_half_chain_exponential_increments() {
    let mut rng = RngStream::new(24, 0);
    let mut inc = Vec::with_capacity(N);
    for _ in 0..N / 5 {
        let c = sample_conditioned_chain_half(0.7, 5, &mut rng).unwrap();
        assert!(c.tvalues.windows(2).all(|w| w[1] < w[0]));
        for w in c.tvalues.windows(2) {
            inc.push(0.25 / w[1] - 0.25 / w[0]);
        }
    }
    assert!(ks_one_sample(&inc, |x| 1.0 - (-x).exp()).unwrap().p_value > LEVEL);
}

#[test]
fn general_step_matches_half_construction() {
    let n = 20_000;
    let general = draw(25, 0, n, |r| sample_conditioned_step_general(0.5, 1.0, r).unwrap().0);
    assert!(general.iter().all(|&s| s < 1.0));
    let exact = draw(25, 1, n, |r| sample_conditioned_chain_half(1.0, 1, r).unwrap().tvalues[1]);
    let ks = ks_two_sample(&general, &exact).unwrap();
    assert!(ks.p_value > LEVEL, "{ks:?}");
}

#[test]
fn coagulation_identity_with_exact_half_side() {
    // alpha delta = 1/2: the left side is 2 G_{theta + 1/2}^{1/2}.
    let pairs: Vec<(f64, f64)> = {
        let mut rng = RngStream::new(26, 0);
        (0..N).map(|_| coag_identity_pair(0.8, 0.625, 0.4, &mut rng).unwrap()).collect()
    };
    let rhs: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let g = gamma_cdf(0.9);
    assert!(ks_one_sample(&rhs, |y| g(y * y / 4.0)).unwrap().p_value > LEVEL);
    let lhs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    assert!(ks_one_sample(&lhs, |y| g(y * y / 4.0)).unwrap().p_value > LEVEL);
}

#[test]
fn coagulation_bolthausen_sznitman_parameters() {
    let (s, t): (f64, f64) = (0.3, 0.7);
    let (alpha, delta) = ((-s).exp(), (-(t - s)).exp());
    let mut rng = RngStream::new(27, 0);
    let pairs: Vec<(f64, f64)> = (0..N).map(|_| coag_identity_pair(alpha, delta, 0.0, &mut rng).unwrap()).collect();
    let (l, r): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let ks = ks_two_sample(&l, &r).unwrap();
    assert!(ks.p_value > LEVEL, "{ks:?}");
}

#[test]
fn coagulation_beta_identity() {
    let mut rng = RngStream::new(28, 0);
    let pairs: Vec<(f64, f64)> = (0..N).map(|_| coag_beta_identity_pair(0.5, 0.5, 0.0, &mut rng).unwrap()).collect();
    let (l, r): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let ks = ks_two_sample(&l, &r).unwrap();
    assert!(ks.p_value > LEVEL, "{ks:?}");
}
