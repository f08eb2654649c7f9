//! Deterministic kernels against independent oracles: the stable power series,
//! the Kummer integral representation and hand-evaluated constants.

use std::f64::consts::PI;

use mlpa::special::quad::{integrate_pieces, integrate_to_infinity, Tolerance};
use mlpa::special::{
    exact_kn_pmf, kn_closed_form_half, kn_closed_form_half_variant, kummer_u, ln_gamma, neg_moment, stable_pdf,
    KnHalfIndex,
};
use mlpa::MomentQuery;

/// `(1/pi) sum_k (-1)^{k+1} Gamma(alpha k + 1)/k! sin(pi alpha k) x_k`, where
/// `x_k` is `t^{-alpha k - 1}` for the density and `t^{-alpha k}/(alpha k)`
/// for the tail mass `P(S > t)`.
fn stable_series(alpha: f64, t: f64, tail: bool) -> f64 {
    let mut sum = 0.0;
    for k in 1..2000 {
        let kf = k as f64;
        let mut ln_mag = libm::lgamma(alpha * kf + 1.0) - libm::lgamma(kf + 1.0) - alpha * kf * t.ln();
        if tail {
            ln_mag -= (alpha * kf).ln();
        } else {
            ln_mag -= t.ln();
        }
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let term = sign * (PI * alpha * kf).sin() * ln_mag.exp();
        sum += term;
        if ln_mag < -45.0 && k > 20 {
            break;
        }
    }
    sum / PI
}

#[test]
fn stable_pdf_matches_power_series() {
    let series = stable_series(0.9, 1.0, false);
    let direct = stable_pdf(0.9, 1.0).unwrap();
    assert!((direct - series).abs() < 1e-6, "{direct} vs {series}");
    for &(alpha, t) in &[(0.3, 2.0), (0.5, 3.0), (0.7, 1.5), (0.9, 2.5)] {
        let s = stable_series(alpha, t, false);
        let d = stable_pdf(alpha, t).unwrap();
        assert!((d - s).abs() < 1e-6, "alpha={alpha} t={t}: {d} vs {s}");
    }
}

#[test]
fn stable_pdf_integrates_to_one() {
    let cut = 20.0;
    for &alpha in &[0.3, 0.5, 0.7, 0.9] {
        let body = integrate_pieces(
            |t| if t > 0.0 { stable_pdf(alpha, t).unwrap() } else { 0.0 },
            &[0.0, 1e-3, 0.01, 0.1, 0.5, 1.0, 3.0, 8.0, cut],
            Tolerance::rel(1e-10).with_abs(1e-13),
        )
        .unwrap()
        .value;
        let tail = stable_series(alpha, cut, true);
        assert!((body + tail - 1.0).abs() < 1e-6, "alpha={alpha}: {body} + {tail}");
    }
}

#[test]
fn stable_half_closed_form() {
    let expected = 4.0 * (-1.0f64).exp() / PI.sqrt();
    assert!((stable_pdf(0.5, 0.25).unwrap() - expected).abs() < 1e-12);
    assert!((expected - 0.830_214_994_841_189_5).abs() < 1e-15);
    assert!(stable_pdf(0.5, 1e8).unwrap() < 1e-12);
}

#[test]
fn kummer_integral_representation() {
    for &(a, b, z) in &[(1.0, 0.5, 2.0), (2.5, 1.5, 0.3), (0.3, 1.5, 0.7), (2.0, 0.5, 0.3)] {
        let integral = integrate_to_infinity(
            |t| (-z * t).exp() * t.powf(a - 1.0) * (1.0 + t).powf(b - a - 1.0),
            0.0,
            Tolerance::rel(1e-12),
        )
        .unwrap()
        .value
            / libm::tgamma(a);
        let u = kummer_u(a, b, z).unwrap();
        assert!((u / integral - 1.0).abs() < 1e-9, "U({a},{b},{z}) = {u} vs {integral}");
    }
}

#[test]
fn kummer_recurrence_and_trivial_values() {
    let (a, b, z): (f64, f64, f64) = (2.0, 0.5, 0.3);
    let lhs = kummer_u(a, b, z).unwrap();
    let rhs = z.powf(1.0 - b) * kummer_u(1.0 + a - b, 2.0 - b, z).unwrap();
    assert!((lhs - rhs).abs() < 1e-8);
    assert_eq!(kummer_u(0.0, 0.5, 1.0).unwrap(), 1.0);
    // Gamma(s, z) = z^s e^{-z} U(1, 1 + s, z), so 2 e^{1/4} Gamma(3/2, 1/4) = 2 (1/4)^{3/2} U(1, 5/2, 1/4).
    let via_u = 2.0 * 0.25f64.powf(1.5) * kummer_u(1.0, 2.5, 0.25).unwrap();
    assert!((via_u - 2.091_282_721_530_094).abs() < 1e-10, "{via_u}");
}

#[test]
fn ln_gamma_examples() {
    assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
    assert!((ln_gamma(0.5).unwrap() - 0.572_364_942_9).abs() < 1e-10);
    assert!((ln_gamma(10.0).unwrap() - 362_880f64.ln()).abs() < 1e-12);
    assert!(ln_gamma(0.0).is_err());
}

#[test]
fn neg_moment_examples() {
    let m = |a, t, d| neg_moment(MomentQuery::new(a, t, d).unwrap());
    assert_eq!(m(0.5, 0.0, 0.0), 1.0);
    assert!((m(0.5, 0.0, 0.5) - 2.0 / PI.sqrt()).abs() < 1e-12);
    assert!((m(0.5, 0.5, 0.5) - PI.sqrt()).abs() < 1e-12);
    // Gamma identity S^{-1/2}_{1/2,1} = 2 G_{3/2}^{1/2}: E = 2 Gamma(2)/Gamma(3/2) = 4/sqrt(pi).
    assert!((m(0.5, 1.0, 0.5) - 4.0 / PI.sqrt()).abs() < 1e-12);
}

#[test]
fn block_count_pmf_examples() {
    let p2 = exact_kn_pmf(0.5, 0.0, 2).unwrap();
    assert!((p2[1] - 0.5).abs() < 1e-15 && (p2[2] - 0.5).abs() < 1e-15);
    let p3 = exact_kn_pmf(0.5, 0.0, 3).unwrap();
    for (k, want) in [(1, 0.375), (2, 0.375), (3, 0.25)] {
        assert!((p3[k] - want).abs() < 1e-15);
    }
    for &(a, t) in &[(0.0, 1.0), (0.3, -0.2), (0.9, 5.0)] {
        assert_eq!(exact_kn_pmf(a, t, 1).unwrap()[1], 1.0);
    }
    assert!((kn_closed_form_half(3, 3).unwrap() - 0.25).abs() < 1e-15);
    assert!((kn_closed_form_half(3, 1).unwrap() - 0.375).abs() < 1e-15);
    assert!((kn_closed_form_half(1, 1).unwrap() - 1.0).abs() < 1e-15);
    // The lower-index-n variant disagrees with enumeration.
    assert!((kn_closed_form_half_variant(3, 1, KnHalfIndex::N).unwrap() - 0.375).abs() > 0.1);
}
