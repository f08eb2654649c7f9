//! Density of the positive stable law with Laplace transform `exp(-w^alpha)`.
//!
//! Uses Zolotarev's single-integral form built on Kanter's function
//!
//! `A(u) = sin(alpha u)^{alpha/(1-alpha)} sin((1-alpha) u) / sin(u)^{1/(1-alpha)}`,
//!
//! `f(x) = c / (pi x) * int_0^pi z(u) exp(-z(u)) du`, `z(u) = A(u) x^{-c}`,
//! `c = alpha / (1 - alpha)`.

use std::f64::consts::{FRAC_PI_2, PI};

use super::quad::{integrate_pieces, Tolerance};
use crate::error::{Error, Result};

fn ln_a_with_sin(alpha: f64, u: f64, sin_u: f64) -> f64 {
    let beta = 1.0 - alpha;
    (alpha / beta) * (alpha * u).sin().ln() + (beta * u).sin().ln() - sin_u.ln() / beta
}

/// `ln A(u)` for `u` in `(0, pi)`.
pub fn kanter_ln_a(alpha: f64, u: f64) -> f64 {
    let sin_u = if u > FRAC_PI_2 { (PI - u).sin() } else { u.sin() };
    ln_a_with_sin(alpha, u, sin_u)
}

/// `ln A(0+) = (alpha/(1-alpha)) ln alpha + ln(1-alpha)`.
pub(crate) fn kanter_ln_a0(alpha: f64) -> f64 {
    (alpha / (1.0 - alpha)) * alpha.ln() + (1.0 - alpha).ln()
}

/// Closed form for `alpha = 1/2`: `t^{-3/2} exp(-1/(4t)) / (2 sqrt(pi))`.
pub fn stable_pdf_half(t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("stable density needs t > 0, got {t}")));
    }
    Ok((-1.5 * t.ln() - 0.25 / t).exp() / (2.0 * PI.sqrt()))
}

/// Positive stable density `f_alpha(t)`, relative accuracy about `1e-10`.
pub fn stable_pdf(alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if !(t > 0.0) {
        return Err(Error::domain(format!("stable density needs t > 0, got {t}")));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    let c = alpha / (1.0 - alpha);
    let ln_t = t.ln();
    let ln_a0 = kanter_ln_a0(alpha);
    let ln_z0 = ln_a0 - c * ln_t;
    let z0 = ln_z0.exp();
    // z e^{-(z - z0)} <= z0 once z >= z0 >= 1, so f <= c z0 e^{-z0} / t.
    if z0 > 1.0 && c.ln() - ln_t + ln_z0 - z0 < -760.0 {
        return Ok(0.0);
    }

    // z(u) - z0 = z0 * expm1(ln A(u) - ln A(0)); the factor exp(-z0) is
    // pulled outside the integral.
    let scaled = |ln_a: f64| -> f64 {
        let dz = z0 * (ln_a - ln_a0).exp_m1();
        let z = z0 + dz;
        let v = z * (-dz).exp();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };

    // Left half in u, right half in y = pi - u so both ends keep precision.
    let mut left = vec![0.0, FRAC_PI_2];
    if z0 > 1.0 {
        // ln A(u) - ln A(0) >= alpha u^2 / 2, so the peak at 0 has width ~ sigma.
        let sigma = 1.0 / (z0 * alpha).sqrt();
        let mut p = 0.25 * sigma;
        while p < FRAC_PI_2 {
            left.push(p);
            p *= 2.0;
        }
    }
    let mut right = vec![0.0, FRAC_PI_2];
    let ln_z_mid = ln_a_with_sin(alpha, FRAC_PI_2, 1.0) - c * ln_t;
    if ln_z_mid < 0.0 {
        // z crosses 1 at y = eps in (0, pi/2); the mass sits at that scale.
        let ln_z_of_y = |y: f64| ln_a_with_sin(alpha, PI - y, y.sin()) - c * ln_t;
        let (mut lo, mut hi) = (0.0f64, FRAC_PI_2);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if ln_z_of_y(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let eps = 0.5 * (lo + hi);
        let mut p = eps / 16.0;
        while p < FRAC_PI_2 {
            right.push(p);
            p *= 2.0;
        }
    } else if ln_z0 < 0.0 {
        // Crossing inside the left half: add it as a breakpoint.
        let (mut lo, mut hi) = (0.0f64, FRAC_PI_2);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if kanter_ln_a(alpha, mid) - c * ln_t < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        left.push(0.5 * (lo + hi));
    }
    left.sort_by(f64::total_cmp);
    right.sort_by(f64::total_cmp);

    let tol = Tolerance::rel(1e-12);
    let l = integrate_pieces(|u| scaled(kanter_ln_a(alpha, u)), &left, tol)
        .map_err(|e| Error::numeric("stable_pdf", format!("alpha={alpha}, t={t}: {e}")))?;
    let r = integrate_pieces(
        |y| scaled(ln_a_with_sin(alpha, PI - y, y.sin())),
        &right,
        tol,
    )
    .map_err(|e| Error::numeric("stable_pdf", format!("alpha={alpha}, t={t}: {e}")))?;
    let integral = l.value + r.value;
    if !(integral >= 0.0) {
        return Err(Error::numeric(
            "stable_pdf",
            format!("negative integral {integral} at alpha={alpha}, t={t}"),
        ));
    }
    if integral == 0.0 {
        return Ok(0.0);
    }
    Ok((c.ln() - PI.ln() - ln_t - z0 + integral.ln()).exp())
}
