//! Goodness-of-fit statistics: Kolmogorov-Smirnov (one and two sample) and
//! Pearson chi-square against an exact pmf with tail pooling.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Smallest sample accepted by the KS routines.
pub const KS_MIN_SIZE: usize = 100;

/// Cells are pooled until their expected count reaches this value.
pub const CHI2_MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Chi2Result {
    pub statistic: f64,
    pub p_value: f64,
    pub dof: usize,
    /// Cells left after pooling.
    pub cells: usize,
}

/// Kolmogorov survival function `P(K > lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda.is_nan() {
        return f64::NAN;
    }
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        // Jacobi dual: P(K <= l) = sqrt(2 pi)/l sum_{k odd} exp(-k^2 pi^2 / (8 l^2)).
        let q = (-std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda)).exp();
        let mut cdf = 0.0;
        let mut k = 1.0f64;
        loop {
            let term = q.powf(k * k);
            cdf += term;
            if term < 1e-17 * cdf.max(f64::MIN_POSITIVE) || k > 200.0 {
                break;
            }
            k += 2.0;
        }
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-18 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic p-value with Stephens' small-sample correction; `en` is the
/// effective sample size.
fn ks_p_value(d: f64, en: f64) -> f64 {
    let s = en.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

fn sorted_finite(x: &[f64], what: &str) -> Result<Vec<f64>> {
    if x.len() < KS_MIN_SIZE {
        return Err(Error::domain(format!(
            "{what} has {} points; KS needs at least {KS_MIN_SIZE}",
            x.len()
        )));
    }
    if x.iter().any(|v| v.is_nan()) {
        return Err(Error::domain(format!("{what} contains NaN")));
    }
    let mut v = x.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    Ok(v)
}

/// Two-sample KS: `sup |F_x - F_y|` and its asymptotic Kolmogorov p-value.
pub fn ks_two_sample(x: &[f64], y: &[f64]) -> Result<KsResult> {
    let a = sorted_finite(x, "first sample")?;
    let b = sorted_finite(y, "second sample")?;
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        // Step past every copy of the smaller value in both samples so ties
        // never open a spurious gap.
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(KsResult { statistic: d, p_value: ks_p_value(d, n * m / (n + m)) })
}

/// One-sample KS against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(x: &[f64], cdf: F) -> Result<KsResult> {
    let a = sorted_finite(x, "sample")?;
    let n = a.len() as f64;
    let mut d = 0.0f64;
    for (i, &v) in a.iter().enumerate() {
        let f = cdf(v);
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::domain(format!("cdf returned {f} at {v}")));
        }
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(KsResult { statistic: d, p_value: ks_p_value(d, n) })
}

/// Pearson chi-square of `observed` counts against the pmf `expected`.
///
/// Cells are indexed together; a shorter array is padded with zeros. If the
/// pmf sums to less than one, the missing mass becomes a final remainder
/// cell. Cells are merged left to right until each pooled cell expects at
/// least [`CHI2_MIN_EXPECTED`] counts; an underfilled tail joins its left
/// neighbour. One pooled cell gives statistic 0 with 0 degrees of freedom.
pub fn chi2_pmf_test(observed: &[u64], expected: &[f64]) -> Result<Chi2Result> {
    if let Some(p) = expected.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::domain(format!("pmf entries must be finite and non-negative, got {p}")));
    }
    let total: u64 = observed.iter().sum();
    let mass: f64 = expected.iter().sum();
    if total == 0 || !(mass > 0.0) {
        return Err(Error::domain("chi-square needs observed counts and pmf mass"));
    }
    if mass > 1.0 + 1e-9 {
        return Err(Error::domain(format!("pmf sums to {mass} > 1")));
    }
    let len = observed.len().max(expected.len());
    let nt = total as f64;
    let mut cells: Vec<(f64, f64)> = (0..len)
        .map(|i| {
            let o = observed.get(i).copied().unwrap_or(0) as f64;
            let e = expected.get(i).copied().unwrap_or(0.0) * nt;
            (o, e)
        })
        .collect();
    let rest = 1.0 - mass;
    if rest > 1e-12 {
        cells.push((0.0, rest * nt));
    }

    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (o, e) in cells {
        acc.0 += o;
        acc.1 += e;
        if acc.1 >= CHI2_MIN_EXPECTED {
            pooled.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 > 0.0 || acc.1 > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => pooled.push(acc),
        }
    }
    let k = pooled.len();
    if k == 1 {
        return Ok(Chi2Result { statistic: 0.0, p_value: 1.0, dof: 0, cells: 1 });
    }
    let statistic: f64 = pooled
        .iter()
        .map(|&(o, e)| {
            if e > 0.0 {
                (o - e) * (o - e) / e
            } else if o > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .sum();
    let dof = k - 1;
    Ok(Chi2Result { statistic, p_value: chi2_sf(statistic, dof), dof, cells: k })
}

/// Sum of independent chi-square statistics, referred to the summed dof.
pub fn chi2_combine(parts: &[Chi2Result]) -> Chi2Result {
    let statistic: f64 = parts.iter().map(|p| p.statistic).sum();
    let dof: usize = parts.iter().map(|p| p.dof).sum();
    let cells: usize = parts.iter().map(|p| p.cells).sum();
    let p_value = if dof == 0 { 1.0 } else { chi2_sf(statistic, dof) };
    Chi2Result { statistic, p_value, dof, cells }
}

pub fn chi2_sf(x: f64, dof: usize) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    ChiSquared::new(dof as f64).expect("dof >= 1").sf(x)
}
