//! Confluent hypergeometric function of the second kind, `U(a, b, z)`.
//!
//! For `a > 0` the Laplace integral
//!
//! `U(a,b,z) = Gamma(a)^{-1} int_0^inf exp(-z t) t^{a-1} (1+t)^{b-a-1} dt`
//!
//! is evaluated with adaptive quadrature in log scale (the peak of the
//! integrand is factored out, so `a` in the hundreds is fine). For `a < 0`
//! the three-term recurrence in `a` is run downwards, which is the stable
//! direction for `U`.

use super::lgamma;
use super::quad::{integrate_pieces, Tolerance};
use crate::error::{Error, Result};

const TOL: f64 = 1e-12;

fn check_z(z: f64) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("kummer_u requires z > 0, got {z}")));
    }
    Ok(())
}

/// `ln U(a, b, z)` for `a > 0`.
fn ln_u_laplace(a: f64, b: f64, z: f64) -> Result<f64> {
    let ln_kernel = |t: f64| (a - 1.0) * t.ln() + (b - a - 1.0) * t.ln_1p() - z * t;
    let tol = Tolerance::rel(TOL);
    let wrap = |e: Error| Error::numeric("kummer_u", format!("a={a}, b={b}, z={z}: {e}"));

    let (ln_peak, body, tail) = if a > 1.0 {
        let p = b - 2.0 - z;
        let t_star = (p + (p * p + 4.0 * z * (a - 1.0)).sqrt()) / (2.0 * z);
        let curv = (a - 1.0) / (t_star * t_star) + (b - a - 1.0) / ((1.0 + t_star) * (1.0 + t_star));
        let sigma = if curv > 0.0 { 1.0 / curv.sqrt() } else { t_star.max(1.0) };
        let ln_peak = ln_kernel(t_star);
        let end = t_star + 40.0 * sigma;
        let mut pts = vec![0.0, t_star, end];
        let mut d = 0.5 * sigma;
        while d < 40.0 * sigma {
            if t_star - d > 0.0 {
                pts.push(t_star - d);
            }
            pts.push(t_star + d);
            d *= 2.0;
        }
        pts.sort_by(f64::total_cmp);
        let body = integrate_pieces(|t| (ln_kernel(t) - ln_peak).exp(), &pts, tol).map_err(wrap)?;
        let tail = exp_tail(a, b, z, end, ln_peak).map_err(wrap)?;
        (ln_peak, body.value, tail)
    } else {
        // t = w^{1/a} on [0, 1] removes the t^{a-1} singularity.
        let h = |t: f64| ((b - a - 1.0) * t.ln_1p() - z * t).exp();
        let mut pts = vec![0.0, 1.0];
        let mut t = 0.25 / z;
        while t < 1.0 {
            pts.push(t.powf(a));
            t *= 2.0;
        }
        pts.sort_by(f64::total_cmp);
        let body = integrate_pieces(|w| h(w.powf(1.0 / a)), &pts, tol).map_err(wrap)?;
        let tail = exp_tail(a, b, z, 1.0, 0.0).map_err(wrap)?;
        (0.0, body.value / a, tail)
    };
    let total = body + tail;
    if !(total > 0.0) {
        return Err(Error::numeric(
            "kummer_u",
            format!("non-positive integral {total} at a={a}, b={b}, z={z}"),
        ));
    }
    Ok(ln_peak + total.ln() - lgamma(a))
}

/// `int_start^inf exp(ln_kernel(t) - shift) dt` through `t = start - ln(1-s)/z`,
/// which absorbs the exponential decay exactly.
fn exp_tail(a: f64, b: f64, z: f64, start: f64, shift: f64) -> Result<f64> {
    let base = -z * start - shift;
    let r = integrate_pieces(
        |s: f64| {
            let t = start - (-s).ln_1p() / z;
            let v = ((a - 1.0) * t.ln() + (b - a - 1.0) * t.ln_1p() + base).exp() / z;
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        &[0.0, 0.5, 0.9, 0.99, 1.0],
        Tolerance::rel(TOL).with_abs(0.0),
    )?;
    Ok(r.value)
}

/// `U(a, b, z)` for real `a`, `b` and `z > 0`.
pub fn kummer_u(a: f64, b: f64, z: f64) -> Result<f64> {
    check_z(z)?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("kummer_u requires finite a and b"));
    }
    if a == 0.0 {
        return Ok(1.0);
    }
    if a > 0.0 {
        return Ok(ln_u_laplace(a, b, z)?.exp());
    }
    // Downward recurrence:
    // U(a-1) = -(b - 2a - z) U(a) - a (a - b + 1) U(a+1).
    let steps = (-a).ceil();
    let start = a + steps;
    let (mut upper, mut cur) = if start == 0.0 {
        (ln_u_laplace(1.0, b, z)?.exp(), 1.0)
    } else {
        (
            ln_u_laplace(start + 1.0, b, z)?.exp(),
            ln_u_laplace(start, b, z)?.exp(),
        )
    };
    let mut x = start;
    for _ in 0..steps as usize {
        let next = -(b - 2.0 * x - z) * cur - x * (x - b + 1.0) * upper;
        upper = cur;
        cur = next;
        x -= 1.0;
    }
    Ok(cur)
}

/// `ln U(a, b, z)`; errors if the value is not positive (possible for `a < 0`).
pub fn ln_kummer_u(a: f64, b: f64, z: f64) -> Result<f64> {
    check_z(z)?;
    if a == 0.0 {
        return Ok(0.0);
    }
    if a > 0.0 {
        return ln_u_laplace(a, b, z);
    }
    let v = kummer_u(a, b, z)?;
    if v > 0.0 {
        Ok(v.ln())
    } else {
        Err(Error::domain(format!(
            "U({a}, {b}, {z}) = {v} is not positive; no logarithm"
        )))
    }
}
