//! Chinese restaurant partitions, the nested coagulation scheme, merger
//! kernels and the Gibbs quantities `W_{n,b}`, `Sigma_{alpha,n}`, `Y_{alpha,n}`.
//!
//! Seating uses a single uniform per customer. With `m` customers at `K`
//! tables, the weight `theta + m` splits into `theta + K alpha` (new table),
//! `m - K` "excess" tokens (one per customer beyond the first at each table)
//! and `K (1 - alpha)` spread evenly over tables. So
//! `N_i - alpha = (N_i - 1) + (1 - alpha)` is hit exactly and the counts-only
//! path consumes the stream identically to the full one.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::chain::chain_beta;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::samplers::{sample_beta, sample_gamma, sample_tilted_stable, BetaParams, REJECTION_CAP};
use crate::special::{exact_kn_pmf, kummer_u, lgamma, ln_binomial, ln_kummer_u, AlphaTheta};

pub use crate::special::check_crp_params;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionState {
    pub n: usize,
    /// Blocks of `{1..n}`, each sorted ascending.
    pub blocks: Vec<Vec<usize>>,
}

impl PartitionState {
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// True when the blocks are non-empty, disjoint and cover `{1..n}`.
    pub fn is_valid(&self) -> bool {
        let mut seen = vec![false; self.n + 1];
        let mut count = 0;
        for b in &self.blocks {
            if b.is_empty() {
                return false;
            }
            for &i in b {
                if i == 0 || i > self.n || seen[i] {
                    return false;
                }
                seen[i] = true;
                count += 1;
            }
        }
        count == self.n
    }

    /// True when every block of `self` is a union of blocks of `finer`.
    pub fn is_coarsening_of(&self, finer: &PartitionState) -> bool {
        if self.n != finer.n {
            return false;
        }
        let mut label = vec![usize::MAX; self.n + 1];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                label[x] = i;
            }
        }
        finer
            .blocks
            .iter()
            .all(|b| b.iter().all(|&x| label[x] == label[b[0]]))
    }
}

/// Seats customers `2..=n`, reporting `(customer, table)`; `table == K` opens a table.
fn seat<F: FnMut(usize, usize)>(alpha: f64, theta: f64, n: usize, rng: &mut RngStream, mut on_seat: F) -> usize {
    let mut k = 1usize;
    // owners[t] = table of the t-th excess token.
    let mut owners: Vec<usize> = Vec::new();
    on_seat(1, 0);
    for m in 1..n {
        let mf = m as f64;
        let kf = k as f64;
        let u = rng.uniform_open() * (theta + mf);
        let new_w = theta + kf * alpha;
        let table = if u < new_w {
            k += 1;
            k - 1
        } else {
            let w = u - new_w;
            let excess = (m - k) as f64;
            let t = if w < excess {
                owners[(w as usize).min(m - k - 1)]
            } else {
                (((w - excess) / (1.0 - alpha)) as usize).min(k - 1)
            };
            owners.push(t);
            t
        };
        on_seat(m + 1, table);
    }
    k
}

/// `PD(alpha, theta)` partition of `{1..n}` by sequential seating.
pub fn sample_crp(alpha: f64, theta: f64, n: usize, rng: &mut RngStream) -> Result<PartitionState> {
    check_crp_params(alpha, theta)?;
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    seat(alpha, theta, n, rng, |c, t| {
        if t == blocks.len() {
            blocks.push(vec![c]);
        } else {
            blocks[t].push(c);
        }
    });
    Ok(PartitionState { n, blocks })
}

/// Block count of [`sample_crp`] on the same stream, without storing blocks.
pub fn sample_crp_count(alpha: f64, theta: f64, n: usize, rng: &mut RngStream) -> Result<usize> {
    check_crp_params(alpha, theta)?;
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let mut k = 1usize;
    for m in 1..n {
        let u = rng.uniform_open() * (theta + m as f64);
        if u < theta + k as f64 * alpha {
            k += 1;
        }
    }
    Ok(k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedRecord {
    pub alpha: f64,
    pub theta: f64,
    pub r: usize,
    /// `partitions[j]` is the level-`j` partition, `PD(alpha, theta + j)`.
    pub partitions: Vec<PartitionState>,
    /// `betas[j-1] = B_j`.
    pub betas: Vec<f64>,
    /// `merged_sizes[j] = |A'_{1,j}|`, the number of level-`(j+1)` blocks selected.
    pub merged_sizes: Vec<usize>,
    pub xi_n: Vec<usize>,
}

impl NestedRecord {
    pub fn ks(&self) -> Vec<usize> {
        self.partitions.iter().map(PartitionState::k).collect()
    }
}

/// Block counts of a nested run; same draws as [`nested_scheme`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedCounts {
    pub ks: Vec<usize>,
    pub betas: Vec<f64>,
    pub merged_sizes: Vec<usize>,
    pub xi_n: Vec<usize>,
}

fn check_nested(alpha: f64, theta: f64, r: usize, n: usize) -> Result<()> {
    check_crp_params(alpha, theta)?;
    if r == 0 {
        return Err(Error::domain("nested scheme needs r >= 1"));
    }
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    Ok(())
}

/// `B_j`: random for `alpha > 0`, the constant `(theta+j-1)/(theta+j)` at `alpha = 0`.
fn draw_b(alpha: f64, theta: f64, j: usize, rng: &mut RngStream) -> Result<f64> {
    if alpha == 0.0 {
        Ok((theta + j as f64 - 1.0) / (theta + j as f64))
    } else {
        Ok(sample_beta(chain_beta(alpha, theta, j)?, rng))
    }
}

fn xi_from(ks: &[usize], merged0: usize) -> Vec<usize> {
    let mut xi = Vec::with_capacity(ks.len());
    xi.push(if merged0 >= 2 { ks[0] } else { 0 });
    xi.extend(ks.windows(2).map(|w| w[1] - w[0]));
    xi
}

fn nested_full(
    alpha: f64,
    theta: f64,
    r: usize,
    n: usize,
    fixed: Option<&[f64]>,
    rng: &mut RngStream,
) -> Result<NestedRecord> {
    let top = sample_crp(alpha, theta + r as f64, n, rng)?;
    let mut partitions = vec![top];
    let mut betas = vec![0.0; r];
    let mut merged_sizes = vec![0; r];
    for j in (1..=r).rev() {
        let b = match fixed {
            Some(bs) => bs[j - 1],
            None => draw_b(alpha, theta, j, rng)?,
        };
        betas[j - 1] = b;
        let finer = partitions.last().expect("non-empty");
        let mut chosen: Vec<usize> = Vec::new();
        let mut rest: Vec<Vec<usize>> = Vec::new();
        let mut selected = 0;
        for block in &finer.blocks {
            if rng.uniform_open() < 1.0 - b {
                selected += 1;
                chosen.extend_from_slice(block);
            } else {
                rest.push(block.clone());
            }
        }
        merged_sizes[j - 1] = selected;
        let coarser = if selected >= 2 {
            chosen.sort_unstable();
            let mut blocks = Vec::with_capacity(rest.len() + 1);
            blocks.push(chosen);
            blocks.extend(rest);
            PartitionState { n, blocks }
        } else {
            finer.clone()
        };
        partitions.push(coarser);
    }
    partitions.reverse();
    let ks: Vec<usize> = partitions.iter().map(PartitionState::k).collect();
    let xi_n = xi_from(&ks, merged_sizes[0]);
    Ok(NestedRecord { alpha, theta, r, partitions, betas, merged_sizes, xi_n })
}

fn nested_counts_core(
    alpha: f64,
    theta: f64,
    r: usize,
    n: usize,
    fixed: Option<&[f64]>,
    rng: &mut RngStream,
) -> Result<NestedCounts> {
    let mut ks = vec![0; r + 1];
    ks[r] = sample_crp_count(alpha, theta + r as f64, n, rng)?;
    let mut betas = vec![0.0; r];
    let mut merged_sizes = vec![0; r];
    for j in (1..=r).rev() {
        let b = match fixed {
            Some(bs) => bs[j - 1],
            None => draw_b(alpha, theta, j, rng)?,
        };
        betas[j - 1] = b;
        let mut selected = 0;
        for _ in 0..ks[j] {
            if rng.uniform_open() < 1.0 - b {
                selected += 1;
            }
        }
        merged_sizes[j - 1] = selected;
        ks[j - 1] = if selected >= 2 { ks[j] - selected + 1 } else { ks[j] };
    }
    let xi_n = xi_from(&ks, merged_sizes[0]);
    Ok(NestedCounts { ks, betas, merged_sizes, xi_n })
}

fn check_fixed(betas: &[f64], r: usize) -> Result<()> {
    if betas.len() != r {
        return Err(Error::domain(format!("expected {r} betas, got {}", betas.len())));
    }
    if let Some(b) = betas.iter().find(|b| !(**b >= 0.0 && **b <= 1.0)) {
        return Err(Error::domain(format!("betas must lie in [0,1], got {b}")));
    }
    Ok(())
}

/// Nested `PD(alpha, theta)` partitions of `{1..n}` at levels `0..=r`.
///
/// Level `r` is a `PD(alpha, theta + r)` seating. Going from level `j` to
/// `j - 1`, each block independently joins `A'` with probability `1 - B_j`;
/// `A'` is merged into one block, listed first, when it holds two or more blocks.
pub fn nested_scheme(alpha: f64, theta: f64, r: usize, n: usize, rng: &mut RngStream) -> Result<NestedRecord> {
    check_nested(alpha, theta, r, n)?;
    nested_full(alpha, theta, r, n, None, rng)
}

/// [`nested_scheme`] with `B_1..B_r` supplied instead of drawn.
pub fn nested_scheme_with_betas(
    alpha: f64,
    theta: f64,
    n: usize,
    betas: &[f64],
    rng: &mut RngStream,
) -> Result<NestedRecord> {
    check_nested(alpha, theta, betas.len(), n)?;
    check_fixed(betas, betas.len())?;
    nested_full(alpha, theta, betas.len(), n, Some(betas), rng)
}

pub fn nested_counts(alpha: f64, theta: f64, r: usize, n: usize, rng: &mut RngStream) -> Result<NestedCounts> {
    check_nested(alpha, theta, r, n)?;
    nested_counts_core(alpha, theta, r, n, None, rng)
}

pub fn nested_counts_with_betas(
    alpha: f64,
    theta: f64,
    n: usize,
    betas: &[f64],
    rng: &mut RngStream,
) -> Result<NestedCounts> {
    check_nested(alpha, theta, betas.len(), n)?;
    check_fixed(betas, betas.len())?;
    nested_counts_core(alpha, theta, betas.len(), n, Some(betas), rng)
}

#[derive(Serialize)]
struct LevelLine<'a> {
    replicate: usize,
    level: usize,
    blocks: &'a [Vec<usize>],
    #[serde(rename = "K")]
    k: usize,
    xi: &'a [usize],
}

/// One JSON line per level: `{"replicate","level","blocks","K","xi"}`.
pub fn write_nested_jsonl<W: Write>(out: &mut W, replicate: usize, rec: &NestedRecord) -> Result<()> {
    for (level, p) in rec.partitions.iter().enumerate() {
        let line = LevelLine { replicate, level, blocks: &p.blocks, k: p.k(), xi: &rec.xi_n };
        serde_json::to_writer(&mut *out, &line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergerKernelQuery {
    pub alpha: f64,
    pub theta: f64,
    pub b: usize,
    pub ell: usize,
}

impl MergerKernelQuery {
    pub fn new(alpha: f64, theta: f64, b: usize, ell: usize) -> Result<Self> {
        check_crp_params(alpha, theta)?;
        if b == 0 {
            return Err(Error::domain("block count b must be at least 1"));
        }
        if ell > b {
            return Err(Error::domain(format!("need 0 <= ell <= b, got ell={ell}, b={b}")));
        }
        Ok(MergerKernelQuery { alpha, theta, b, ell })
    }
}

/// `ln p_{alpha,theta}(ell | b)`, the `Bin(b, 1 - B_1)` mixture.
fn ln_merger(alpha: f64, theta: f64, b: usize, ell: usize) -> f64 {
    let (bf, lf) = (b as f64, ell as f64);
    if alpha == 0.0 {
        let p = 1.0 / (theta + 1.0);
        return ln_binomial(b, ell) + lf * p.ln() + (bf - lf) * (-p).ln_1p();
    }
    let a1 = (1.0 + theta) / alpha;
    let a2 = (theta + alpha) / alpha;
    ln_binomial(b, ell) + lgamma(a1) + lgamma(a2 + bf - lf) + lgamma(1.0 / alpha + lf - 1.0)
        - lgamma(a2)
        - lgamma((1.0 - alpha) / alpha)
        - lgamma(a1 + bf)
}

/// `p_{alpha,theta}(ell | b) = C(b,ell) Gamma((1+theta)/alpha) Gamma((theta+alpha)/alpha + b - ell)
/// Gamma(1/alpha + ell - 1) / (Gamma((theta+alpha)/alpha) Gamma((1-alpha)/alpha) Gamma((1+theta)/alpha + b))`;
/// `Binomial(b, 1/(theta+1))` at `alpha = 0`.
pub fn merger_pmf(q: MergerKernelQuery) -> f64 {
    ln_merger(q.alpha, q.theta, q.b, q.ell).exp()
}

/// `lambda(ell | b) = p(ell | b) / sum_{m >= 2} p(m | b)` on `2..=b`.
pub fn conditioned_merger_pmf(q: MergerKernelQuery) -> Result<f64> {
    if q.b < 2 || q.ell < 2 {
        return Err(Error::domain(format!(
            "conditioned kernel lives on 2 <= ell <= b, got ell={}, b={}",
            q.ell, q.b
        )));
    }
    let denom: f64 = (2..=q.b).map(|m| ln_merger(q.alpha, q.theta, q.b, m).exp()).sum();
    Ok(ln_merger(q.alpha, q.theta, q.b, q.ell).exp() / denom)
}

fn check_split(b: usize, ell: usize) -> Result<()> {
    if b < 2 || ell == 0 || ell >= b {
        return Err(Error::domain(format!("splitting kernel needs 1 <= ell <= b-1, got ell={ell}, b={b}")));
    }
    Ok(())
}

/// `p_{alpha,1-2alpha}(ell | b)` renormalised on `1..=b-1`. `alpha = 0` gives the
/// `PD(0,1)` kernel, i.e. Aldous' `beta = infinity` case.
pub fn beta_splitting_pmf(alpha: f64, b: usize, ell: usize) -> Result<f64> {
    check_split(b, ell)?;
    let theta = if alpha == 0.0 { 1.0 } else { 1.0 - 2.0 * alpha };
    check_crp_params(alpha, theta)?;
    let denom: f64 = (1..b).map(|m| ln_merger(alpha, theta, b, m).exp()).sum();
    Ok(ln_merger(alpha, theta, b, ell).exp() / denom)
}

/// Aldous' beta-splitting kernel on `1..=b-1`:
/// `q_b(ell) ∝ Gamma(beta+1+ell) Gamma(beta+1+b-ell) / (ell! (b-ell)!)`;
/// `beta = +inf` gives `C(b, ell) / (2^b - 2)`.
pub fn aldous_splitting_pmf(beta: f64, b: usize, ell: usize) -> Result<f64> {
    check_split(b, ell)?;
    if !(beta > -1.0) {
        return Err(Error::domain(format!("beta must exceed -1, got {beta}")));
    }
    let ln_w = |m: usize| -> f64 {
        if beta.is_infinite() {
            ln_binomial(b, m)
        } else {
            lgamma(beta + 1.0 + m as f64) + lgamma(beta + 1.0 + (b - m) as f64)
                - lgamma(m as f64 + 1.0)
                - lgamma((b - m) as f64 + 1.0)
        }
    };
    let shift = ln_w(b / 2);
    let denom: f64 = (1..b).map(|m| (ln_w(m) - shift).exp()).sum();
    Ok((ln_w(ell) - shift).exp() / denom)
}

fn check_nb(n: usize, b: usize) -> Result<()> {
    if b == 0 || b > n {
        return Err(Error::domain(format!("need 1 <= b <= n, got n={n}, b={b}")));
    }
    Ok(())
}

/// `W_{n,b} = Gamma(n) Gamma(theta+1) Gamma((theta+b alpha)/alpha) /
/// (Gamma(theta+n) Gamma(b) Gamma((theta+alpha)/alpha))`.
pub fn w_nb(alpha: f64, theta: f64, n: usize, b: usize) -> Result<f64> {
    let p = AlphaTheta::new(alpha, theta)?;
    check_nb(n, b)?;
    let (a, t, nf, bf) = (p.alpha(), p.theta(), n as f64, b as f64);
    Ok((lgamma(nf) + lgamma(t + 1.0) + lgamma((t + bf * a) / a)
        - lgamma(t + nf)
        - lgamma(bf)
        - lgamma((t + a) / a))
        .exp())
}

fn check_sigma(alpha: f64, a: f64, n: usize, b: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0,1), got {alpha}")));
    }
    check_nb(n, b)?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("Sigma argument must be positive, got {a}")));
    }
    let theta = a - b as f64 * alpha;
    if !(theta + alpha > 0.0) {
        return Err(Error::domain(format!(
            "a - b alpha must exceed -alpha, got a={a}, b={b}, alpha={alpha}"
        )));
    }
    Ok(theta)
}

/// `Sigma_{alpha,n}(a) = S_{alpha,a} / B_{a, n - b alpha}`, `a = theta + b alpha`.
pub fn sample_sigma(alpha: f64, a: f64, n: usize, b: usize, rng: &mut RngStream) -> Result<f64> {
    check_sigma(alpha, a, n, b)?;
    let s = sample_tilted_stable(AlphaTheta::new(alpha, a)?, rng)?;
    let beta = sample_beta(BetaParams::new(a, n as f64 - b as f64 * alpha)?, rng);
    Ok(s / beta)
}

/// The second representation `S_{alpha,n+theta} B^{-1/alpha}_{(theta/alpha + b, n/alpha - b)}`.
pub fn sample_sigma_alt(alpha: f64, a: f64, n: usize, b: usize, rng: &mut RngStream) -> Result<f64> {
    let theta = check_sigma(alpha, a, n, b)?;
    let s = sample_tilted_stable(AlphaTheta::new(alpha, n as f64 + theta)?, rng)?;
    let beta = sample_beta(BetaParams::new(a / alpha, n as f64 / alpha - b as f64)?, rng);
    Ok(s * beta.powf(-1.0 / alpha))
}

/// `Y_{alpha,n}(b) = B^{-1/alpha}_{(1,(1-alpha)/alpha)} Sigma_{alpha,n}(1 + b alpha)`.
pub fn sample_y(alpha: f64, n: usize, b: usize, rng: &mut RngStream) -> Result<f64> {
    let sigma = sample_sigma(alpha, 1.0 + b as f64 * alpha, n, b, rng)?;
    let u = sample_beta(BetaParams::new(1.0, (1.0 - alpha) / alpha)?, rng);
    Ok(sigma * u.powf(-1.0 / alpha))
}

/// Gamma/beta forms of `Sigma^{-1}_{1/2,n}(1 + b/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfSigmaForm {
    /// `4 G_{(b+3)/2} B_{((2+b)/2, (2n-b)/2)}`.
    GammaBeta,
    /// `4 G_{n+3/2} B^2_{(2+b, 2n-b)}`.
    GammaBetaSquared,
}

pub fn sample_sigma_inv_half(n: usize, b: usize, form: HalfSigmaForm, rng: &mut RngStream) -> Result<f64> {
    check_nb(n, b)?;
    let (nf, bf) = (n as f64, b as f64);
    Ok(match form {
        HalfSigmaForm::GammaBeta => {
            4.0 * sample_gamma((bf + 3.0) / 2.0, rng)?
                * sample_beta(BetaParams::new((2.0 + bf) / 2.0, (2.0 * nf - bf) / 2.0)?, rng)
        }
        HalfSigmaForm::GammaBetaSquared => {
            let beta = sample_beta(BetaParams::new(2.0 + bf, 2.0 * nf - bf)?, rng);
            4.0 * sample_gamma(nf + 1.5, rng)? * beta * beta
        }
    })
}

/// `Y^{-1}_{1/2,n}(b) = B_{(1/2,1)} Sigma^{-1}_{1/2,n}(1 + b/2)` with the gamma/beta form.
pub fn sample_y_inv_half(n: usize, b: usize, rng: &mut RngStream) -> Result<f64> {
    let s = sample_sigma_inv_half(n, b, HalfSigmaForm::GammaBeta, rng)?;
    Ok(sample_beta(BetaParams::new(0.5, 1.0)?, rng) * s)
}

/// Monte Carlo `W_{n,b} = E[h(Sigma_{alpha,n}(b alpha))]` for a general mixing
/// weight `h`; returns `(estimate, standard error)`.
pub fn w_nb_monte_carlo<H: Fn(f64) -> f64>(
    alpha: f64,
    n: usize,
    b: usize,
    h: H,
    reps: usize,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    if reps < 2 {
        return Err(Error::domain("need at least two Monte Carlo replicates"));
    }
    let a = b as f64 * alpha;
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..reps {
        let x = h(sample_sigma(alpha, a, n, b, rng)?);
        sum += x;
        sq += x * x;
    }
    let r = reps as f64;
    let mean = sum / r;
    let var = ((sq - r * mean * mean) / (r - 1.0)).max(0.0);
    Ok((mean, (var / r).sqrt()))
}

/// Which closed form of the `(K_{n,1} = k, V_1 = v) | T_{1/2,0} = t` density to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointHalfForm {
    /// `P(K_n=k) Gamma(n) / (2 Gamma(k)) t^{-(k+1)/2} v^{-(k+2)} exp((1 - v^{-2})/(4t))
    /// U(n - k/2 - 1/2, 1/2, 1/(4 t v^2))`; a probability density on `{1..n} x (0,1)`.
    Normalized,
    /// `P(K_n=k) Gamma(n) / (2 Gamma(k)) t^{-(k+1)/2} U(n - k/2 - 1/2, 1/2, 1/(4 t v^2))`, the
    /// form as usually printed; it omits the `v` power and exponential factors.
    Printed,
}

/// Joint density of `(K_{n,1}, V_1)` given `T_{1/2,0} = t` under `PD(1/2, 0)`.
pub fn joint_k_v_given_t_half(n: usize, k: usize, v: f64, t: f64) -> Result<f64> {
    joint_k_v_given_t_half_form(n, k, v, t, JointHalfForm::Normalized)
}

pub fn joint_k_v_given_t_half_form(n: usize, k: usize, v: f64, t: f64, form: JointHalfForm) -> Result<f64> {
    check_nb(n, k)?;
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::domain(format!("v must lie in (0,1), got {v}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    let pk = exact_kn_pmf(0.5, 0.0, n)?[k];
    let (nf, kf) = (n as f64, k as f64);
    let a = nf - kf / 2.0 - 0.5;
    let z = 1.0 / (4.0 * t * v * v);
    let ln_u = if a > 0.0 {
        ln_kummer_u(a, 0.5, z)?
    } else {
        // a = 0 only when k = 2n - 1, i.e. n = k = 1.
        kummer_u(a, 0.5, z)?.ln()
    };
    let mut ln = pk.ln() + lgamma(nf) - lgamma(kf) - std::f64::consts::LN_2 - 0.5 * (kf + 1.0) * t.ln() + ln_u;
    if form == JointHalfForm::Normalized {
        ln += -(kf + 2.0) * v.ln() + (1.0 - 1.0 / (v * v)) / (4.0 * t);
    }
    Ok(ln.exp())
}

/// One draw of `(K_{n,1}, V_1)` given `T_{1/2,0} = t` by simulation: seat a
/// `PD(1/2, 1)` partition, draw `T_1 | K = k` as `Sigma_{1/2,n}(1 + k/2)`, and
/// accept with probability `sqrt(T_1 / t) 1{T_1 < t}` (the `Beta(1,1)` ratio density).
pub fn sample_joint_k_v_half(n: usize, t: f64, rng: &mut RngStream) -> Result<(usize, f64)> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    for _ in 0..REJECTION_CAP {
        let k = sample_crp_count(0.5, 1.0, n, rng)?;
        let s = 1.0 / sample_sigma_inv_half(n, k, HalfSigmaForm::GammaBeta, rng)?;
        if s < t {
            let v = (s / t).sqrt();
            if rng.uniform_open() <= v {
                return Ok((k, v));
            }
        }
    }
    Err(Error::numeric("sample_joint_k_v_half", format!("rejection cap exceeded at n={n}, t={t}")))
}
