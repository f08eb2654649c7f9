//! The acceptance suite.
//!
//! Every Monte Carlo sample is drawn from a stream keyed by
//! `(run seed, criterion, part, chunk)`, so results do not depend on the
//! thread count or scheduling. Significance checks run once per seed in
//! `seed, seed+1, ..` and pass when the share of runs with `p > level`
//! reaches `pass_rate`. Tolerance checks (moments, exact identities) run once.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::report::{CheckKind, Rule, SuiteReport, VerifyReport};
use super::stats::{chi2_combine, chi2_pmf_test, ks_one_sample, ks_two_sample, KS_MIN_SIZE};
use crate::chain::{mori_chain, sample_conditioned_chain_half, spacings, conditioned_v_density, ConditionedStep};
use crate::crp::{
    joint_k_v_given_t_half, joint_k_v_given_t_half_form, merger_pmf, nested_counts, sample_joint_k_v_half,
    sample_sigma, sample_sigma_alt, w_nb, JointHalfForm, MergerKernelQuery,
};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::samplers::{sample_beta, sample_gamma, sample_gml, BetaParams};
use crate::special::quad::{integrate, integrate_pieces, Tolerance};
use crate::special::{exact_kn_pmf, kn_closed_form_half_variant, AlphaTheta, KnHalfIndex};
use crate::tree::{grow_tree, scaled_degrees};

pub const SUITE_NAMES: &[&str] = &["default"];

/// Below this many draws per sample a significance check is underpowered.
pub const POWER_FLOOR: u64 = 1000;

/// Below this many trees the degree-moment check is underpowered.
pub const MOMENT_FLOOR: u64 = 500;

/// Draws per stream for cheap variates.
const CHUNK: usize = 4096;

/// Edges per tree in the degree checks.
const TREE_N: usize = 20_000;

const CRITERIA: u32 = 13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub suite: String,
    pub seed: u64,
    /// Runs per significance check.
    pub seeds: usize,
    pub level: f64,
    pub pass_rate: f64,
    /// Overrides every Monte Carlo sample count when set.
    pub samples: Option<usize>,
    pub calibration_trials: usize,
    /// Restricts the run to these criteria; all when `None`.
    pub criteria: Option<Vec<u32>>,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig {
            suite: "default".into(),
            seed,
            seeds: 20,
            level: 0.01,
            pass_rate: 0.95,
            samples: None,
            calibration_trials: 100,
            criteria: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !SUITE_NAMES.contains(&self.suite.as_str()) {
            return Err(Error::domain(format!("unknown suite {:?}; known: {SUITE_NAMES:?}", self.suite)));
        }
        if self.seeds == 0 || self.calibration_trials == 0 {
            return Err(Error::domain("seeds and calibration_trials must be at least 1"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::domain(format!("level must lie in (0,1), got {}", self.level)));
        }
        if !(self.pass_rate > 0.0 && self.pass_rate <= 1.0) {
            return Err(Error::domain(format!("pass_rate must lie in (0,1], got {}", self.pass_rate)));
        }
        if let Some(n) = self.samples {
            if n < KS_MIN_SIZE {
                return Err(Error::domain(format!("samples must be at least {KS_MIN_SIZE}, got {n}")));
            }
        }
        if let Some(bad) = self.criteria.iter().flatten().find(|c| !(1..=CRITERIA).contains(*c)) {
            return Err(Error::domain(format!("criteria are numbered 1..={CRITERIA}, got {bad}")));
        }
        Ok(())
    }

    fn n(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    fn run_seeds(&self, count: usize) -> Vec<u64> {
        (0..count as u64).map(|i| self.seed.wrapping_add(i)).collect()
    }

    fn selected(&self, c: u32) -> bool {
        self.criteria.as_ref().is_none_or(|v| v.contains(&c))
    }
}

/// Stream id for chunk `chunk` of part `part` of criterion `crit`.
pub fn stream_id(crit: u32, part: u32, chunk: u64) -> u64 {
    ((crit as u64) << 56) | ((part as u64) << 40) | chunk
}

/// `count` draws of `f`, in `chunk`-sized runs each on its own stream.
fn draws<T, F>(seed: u64, crit: u32, part: u32, count: usize, chunk: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream) -> Result<T> + Sync,
{
    let chunks = count.div_ceil(chunk);
    let parts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(seed, stream_id(crit, part, c as u64));
            let len = chunk.min(count - c * chunk);
            (0..len).map(|_| f(&mut rng)).collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(parts.into_iter().flatten().collect())
}

/// Runs `f` once per seed; `f` returns the p-value and per-run details.
#[allow(clippy::too_many_arguments)]
fn seeded<F>(cfg: &SuiteConfig, crit: u32, name: &str, kind: CheckKind, sizes: Vec<u64>, f: F) -> VerifyReport
where
    F: Fn(u64) -> Result<(f64, Value)> + Sync,
{
    let seeds = cfg.run_seeds(cfg.seeds);
    let runs: Result<Vec<(f64, Value)>> = seeds.par_iter().map(|&s| f(s)).collect();
    let runs = match runs {
        Ok(r) => r,
        Err(e) => return VerifyReport::errored(crit, name, kind, &e),
    };
    let p_values: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let passed = p_values.iter().filter(|&&p| p > cfg.level).count();
    let rate = passed as f64 / p_values.len() as f64;
    let per_run: Vec<Value> = runs.into_iter().map(|r| r.1).collect();
    VerifyReport::new(
        crit,
        name,
        kind,
        rate,
        cfg.pass_rate,
        Rule::AtLeast,
        sizes,
        seeds,
        json!({ "level": cfg.level, "p_values": p_values, "runs": per_run, "statistic": "share of runs with p > level" }),
    )
    .with_power_floor(POWER_FLOOR)
}

fn ks_details(d: f64) -> Value {
    json!({ "D": d })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn std_err(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0) / n).sqrt()
}

fn rel_err(x: f64, target: f64) -> f64 {
    (x / target - 1.0).abs()
}

/// Probabilities of the bins `[edges[i], edges[i+1])` under `density`.
fn bin_probs<F: Fn(f64) -> Result<f64>>(density: F, edges: &[f64]) -> Result<Vec<f64>> {
    edges
        .windows(2)
        .map(|w| {
            let mut err = None;
            let r = integrate(
                |v| match density(v) {
                    Ok(x) => x,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                },
                w[0],
                w[1],
                Tolerance::rel(1e-10).with_abs(1e-14),
            )?;
            match err {
                Some(e) => Err(e),
                None => Ok(r.value),
            }
        })
        .collect()
}

fn histogram(xs: &[f64], bins: usize) -> Vec<u64> {
    let mut h = vec![0u64; bins];
    for &x in xs {
        h[((x * bins as f64) as usize).min(bins - 1)] += 1;
    }
    h
}

fn scaled_root_pair(rng: &mut RngStream) -> Result<(f64, f64)> {
    let t = grow_tree(0.0, TREE_N, rng)?;
    let s = scaled_degrees(&t, 1)?;
    Ok((s[0], s[1]))
}

fn c01(cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let trees = cfg.n(2000);
    let d0: Vec<f64> = draws(cfg.seed, 1, 0, trees, 8, |r| Ok(scaled_root_pair(r)?.0))?;
    let sq: Vec<f64> = d0.iter().map(|x| x * x).collect();
    let (m1, m2) = (mean(&d0), mean(&sq));
    let target1 = 2.0 / PI.sqrt();
    let sizes = vec![trees as u64];
    let seeds = vec![cfg.seed];
    Ok(vec![
        VerifyReport::new(
            1,
            "mori_root_degree_mean",
            CheckKind::Moment,
            rel_err(m1, target1),
            0.03,
            Rule::AtMost,
            sizes.clone(),
            seeds.clone(),
            json!({ "beta": 0.0, "n": TREE_N, "mean": m1, "se": std_err(&d0), "target": target1, "statistic": "relative error" }),
        )
        .with_power_floor(MOMENT_FLOOR),
        VerifyReport::new(
            1,
            "mori_root_degree_second_moment",
            CheckKind::Moment,
            rel_err(m2, 2.0),
            0.06,
            Rule::AtMost,
            sizes,
            seeds,
            json!({ "beta": 0.0, "n": TREE_N, "second_moment": m2, "se": std_err(&sq), "target": 2.0, "statistic": "relative error" }),
        )
        .with_power_floor(MOMENT_FLOOR),
    ])
}

fn c02(cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let (nt, nc) = (cfg.n(2000), cfg.n(10_000));
    Ok(vec![seeded(cfg, 2, "tree_degree_1_vs_chain_spacing_1", CheckKind::Ks, vec![nt as u64, nc as u64], |s| {
        let trees: Vec<f64> = draws(s, 2, 0, nt, 8, |r| Ok(scaled_root_pair(r)?.1))?;
        let chain: Vec<f64> = draws(s, 2, 1, nc, CHUNK, |r| Ok(spacings(&mori_chain(0.0, 1, r)?).xi[1]))?;
        let k = ks_two_sample(&trees, &chain)?;
        Ok((k.p_value, ks_details(k.statistic)))
    })])
}

fn c03(cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let n = cfg.n(100_000);
    let lo = AlphaTheta::new(0.5, 0.5)?;
    let hi = AlphaTheta::new(0.5, 1.5)?;
    let b = BetaParams::new(2.0, 1.0)?;
    Ok(vec![seeded(cfg, 3, "gml_beta_recursion", CheckKind::Ks, vec![n as u64, n as u64], |s| {
        let direct = draws(s, 3, 0, n, CHUNK, |r| sample_gml(lo, r))?;
        let product = draws(s, 3, 1, n, CHUNK, |r| Ok(sample_gml(hi, r)? * sample_beta(b, r)))?;
        let k = ks_two_sample(&direct, &product)?;
        Ok((k.p_value, ks_details(k.statistic)))
    })])
}

fn c04(cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let reps = cfg.n(100_000);
    let pmf = exact_kn_pmf(0.5, 1.0, 50)?;
    Ok(vec![seeded(cfg, 4, "nested_level1_block_count", CheckKind::Chi2, vec![reps as u64], |s| {
        let ks = draws(s, 4, 0, reps, CHUNK, |r| Ok(nested_counts(0.5, 0.0, 2, 50, r)?.ks[1]))?;
        let mut obs = vec![0u64; pmf.len()];
        for k in ks {
            obs[k] += 1;
        }
        let c = chi2_pmf_test(&obs, &pmf)?;
        Ok((c.p_value, json!({ "chi2": c.statistic, "dof": c.dof })))
    })])
}

fn c05(cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let reps = cfg.n(100_000);
    let bs = 3..=8usize;
    let mut kernels = Vec::new();
    let mut max_dev = 0.0f64;
    for b in bs.clone() {
        let row = (0..=b)
            .map(|l| MergerKernelQuery::new(0.5, 0.0, b, l).map(merger_pmf))
            .collect::<Result<Vec<f64>>>()?;
        for p in &row {
            max_dev = max_dev.max((p - 1.0 / (b as f64 + 1.0)).abs());
        }
        kernels.push(row);
    }
    let report = seeded(cfg, 5, "merger_kernel_uniform", CheckKind::Chi2, vec![reps as u64], |s| {
        let pairs = draws(s, 5, 0, reps, CHUNK, |r| {
            let c = nested_counts(0.5, 0.0, 2, 50, r)?;
            Ok((c.ks[1], c.merged_sizes[0]))
        })?;
        let mut parts = Vec::new();
        for (i, b) in bs.clone().enumerate() {
            let mut obs = vec![0u64; b + 1];
            for &(k, l) in &pairs {
                if k == b {
                    obs[l] += 1;
                }
            }
            parts.push(chi2_pmf_test(&obs, &kernels[i])?);
        }
        let c = chi2_combine(&parts);
        Ok((c.p_value, json!({ "chi2": c.statistic, "dof": c.dof })))
    });
    let mut report = report;
    if let Value::Object(m) = &mut report.details {
        m.insert("max_abs_kernel_minus_uniform".into(), json!(max_dev));
    }
    Ok(vec![report])
}

fn c06(_cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let (mut err_n1, mut err_n) = (0.0f64, 0.0f64);
    for n in 1..=50 {
        let dp = exact_kn_pmf(0.5, 0.0, n)?;
        for (k, &p) in dp.iter().enumerate().skip(1) {
            err_n1 = err_n1.max((p - kn_closed_form_half_variant(n, k, KnHalfIndex::NMinusOne)?).abs());
            err_n = err_n.max((p - kn_closed_form_half_variant(n, k, KnHalfIndex::N)?).abs());
        }
    }
    Ok(vec![VerifyReport::new(
        6,
        "kn_closed_form_half",
        CheckKind::Exact,
        err_n1,
        1e-12,
        Rule::AtMost,
        vec![],
        vec![],
        json!({
            "max_abs_error_lower_index_n_minus_1": err_n1,
            "max_abs_error_lower_index_n": err_n,
            "resolution": "C(2n-k-1, n-1) 2^{k+1-2n} matches the seating DP; lower index n does not",
        }),
    )])
}

fn c07(cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let n = cfg.n(100_000);
    let bins = 50;
    let edges: Vec<f64> = (0..=bins).map(|i| i as f64 / bins as f64).collect();
    let probs = bin_probs(
        |v| if v > 0.0 && v < 1.0 { conditioned_v_density(0.5, 1.0, v) } else { Ok(0.0) },
        &edges,
    )?;
    let raw_mass: f64 = probs.iter().sum();
    let probs: Vec<f64> = probs.iter().map(|p| p / raw_mass).collect();
    let inc = seeded(cfg, 7, "conditioned_half_increment_exp1", CheckKind::Ks, vec![n as u64], |s| {
        let e = draws(s, 7, 0, n, CHUNK, |r| {
            let c = sample_conditioned_chain_half(1.0, 1, r)?;
            Ok(1.0 / (4.0 * c.tvalues[1]) - 0.25)
        })?;
        let k = ks_one_sample(&e, |x| if x > 0.0 { -(-x).exp_m1() } else { 0.0 })?;
        Ok((k.p_value, ks_details(k.statistic)))
    });
    let mut hist = seeded(cfg, 7, "conditioned_half_v1_histogram", CheckKind::Chi2, vec![n as u64], |s| {
        let v = draws(s, 7, 1, n, CHUNK, |r| Ok(sample_conditioned_chain_half(1.0, 1, r)?.vratios[0]))?;
        let c = chi2_pmf_test(&histogram(&v, bins), &probs)?;
        Ok((c.p_value, json!({ "chi2": c.statistic, "dof": c.dof })))
    });
    if let Value::Object(m) = &mut hist.details {
        m.insert("density_mass_before_renormalising".into(), json!(raw_mass));
    }
    Ok(vec![inc, hist])
}

fn c08(cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let n = cfg.n(10_000);
    let mut out = Vec::new();
    for (i, &t) in [0.5, 1.0, 2.0].iter().enumerate() {
        let step = ConditionedStep::new(0.5, t)?;
        let part = 2 * i as u32;
        out.push(seeded(cfg, 8, &format!("conditioned_step_rejection_vs_exact_t{t}"), CheckKind::Ks, vec![n as u64, n as u64], |s| {
            let rej = draws(s, 8, part, n, CHUNK, |r| Ok(step.sample(r)?.1))?;
            let exact = draws(s, 8, part + 1, n, CHUNK, |r| Ok(sample_conditioned_chain_half(t, 1, r)?.vratios[0]))?;
            let k = ks_two_sample(&rej, &exact)?;
            Ok((k.p_value, ks_details(k.statistic)))
        }));
    }
    Ok(out)
}

fn c09(cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let n = cfg.n(100_000);
    let outer = AlphaTheta::new(0.8, 0.4)?;
    let inner = AlphaTheta::new(0.625, 0.5)?;
    Ok(vec![seeded(cfg, 9, "cross_index_coagulation", CheckKind::Ks, vec![n as u64, n as u64], |s| {
        let lhs = draws(s, 9, 0, n, CHUNK, |r| Ok(2.0 * sample_gamma(0.9, r)?.sqrt()))?;
        let rhs = draws(s, 9, 1, n, CHUNK, |r| Ok(sample_gml(outer, r)?.powf(0.625) * sample_gml(inner, r)?))?;
        let k = ks_two_sample(&lhs, &rhs)?;
        Ok((k.p_value, ks_details(k.statistic)))
    })])
}

fn c10(cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let reps = cfg.n(100);
    let n = 100_000usize;
    let ln_n = (n as f64).ln();
    let runs = draws(cfg.seed, 10, 0, reps, 1, |r| nested_counts(0.0, 2.0, 2, n, r))?;
    let k: Vec<f64> = runs.iter().map(|c| c.ks[0] as f64 / ln_n).collect();
    let mut out = vec![VerifyReport::new(
        10,
        "dirichlet_block_count_over_log_n",
        CheckKind::Moment,
        rel_err(mean(&k), 2.0),
        0.15,
        Rule::AtMost,
        vec![reps as u64],
        vec![cfg.seed],
        json!({ "theta": 2.0, "n": n, "mean": mean(&k), "se": std_err(&k), "target": 2.0, "statistic": "relative error" }),
    )];
    for j in 1..=2 {
        let xi: Vec<f64> = runs.iter().map(|c| c.xi_n[j] as f64 / ln_n).collect();
        out.push(VerifyReport::new(
            10,
            format!("dirichlet_spacing_{j}_over_log_n"),
            CheckKind::Moment,
            rel_err(mean(&xi), 1.0),
            0.20,
            Rule::AtMost,
            vec![reps as u64],
            vec![cfg.seed],
            json!({ "theta": 2.0, "n": n, "mean": mean(&xi), "se": std_err(&xi), "target": 1.0, "statistic": "relative error" }),
        ));
    }
    Ok(out)
}

fn c11(cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let mut worst = 0.0f64;
    for &theta in &[0.5, 1.0, 2.0] {
        for n in 1..=20 {
            let pk = exact_kn_pmf(0.5, 0.0, n)?;
            let mut s = 0.0;
            for (b, p) in pk.iter().enumerate().skip(1) {
                s += p * w_nb(0.5, theta, n, b)?;
            }
            worst = worst.max((s - 1.0).abs());
        }
    }
    let exact = VerifyReport::new(
        11,
        "gibbs_weight_normalisation",
        CheckKind::Exact,
        worst,
        1e-10,
        Rule::AtMost,
        vec![],
        vec![],
        json!({ "alpha": 0.5, "thetas": [0.5, 1.0, 2.0], "n_max": 20, "statistic": "max |sum_b P(K_n=b) W_{n,b} - 1|" }),
    );
    let n = cfg.n(100_000);
    let (alpha, a, nn, b) = (0.5, 2.5, 10, 3);
    let ks = seeded(cfg, 11, "sigma_double_representation", CheckKind::Ks, vec![n as u64, n as u64], |s| {
        let x = draws(s, 11, 0, n, CHUNK, |r| sample_sigma(alpha, a, nn, b, r))?;
        let y = draws(s, 11, 1, n, CHUNK, |r| sample_sigma_alt(alpha, a, nn, b, r))?;
        let k = ks_two_sample(&x, &y)?;
        Ok((k.p_value, ks_details(k.statistic)))
    });
    Ok(vec![exact, ks])
}

fn joint_mass(form: JointHalfForm) -> Result<f64> {
    let mut total = 0.0;
    for k in 1..=5 {
        let mut err = None;
        let r = integrate_pieces(
            |v| {
                if !(v > 0.0 && v < 1.0) {
                    return 0.0;
                }
                joint_k_v_given_t_half_form(5, k, v, 1.0, form).unwrap_or_else(|e| {
                    err.get_or_insert(e);
                    0.0
                })
            },
            &[0.0, 0.1, 0.3, 0.6, 1.0],
            Tolerance::rel(1e-10),
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        total += r.value;
    }
    Ok(total)
}

fn c12(cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let mass = joint_mass(JointHalfForm::Normalized)?;
    let printed = joint_mass(JointHalfForm::Printed)?;
    let norm = VerifyReport::new(
        12,
        "joint_k_v_normalisation",
        CheckKind::Exact,
        (mass - 1.0).abs(),
        1e-4,
        Rule::AtMost,
        vec![],
        vec![],
        json!({ "n": 5, "t": 1.0, "mass": mass, "mass_without_v_factors": printed }),
    );
    let (nk, bins) = (5usize, 10usize);
    let edges: Vec<f64> = (0..=bins).map(|i| i as f64 / bins as f64).collect();
    let mut probs = Vec::with_capacity(nk * bins);
    for k in 1..=nk {
        probs.extend(bin_probs(
            |v| if v > 0.0 && v < 1.0 { joint_k_v_given_t_half(5, k, v, 1.0) } else { Ok(0.0) },
            &edges,
        )?);
    }
    let raw: f64 = probs.iter().sum();
    let probs: Vec<f64> = probs.iter().map(|p| p / raw).collect();
    let n = cfg.n(100_000);
    let sim = seeded(cfg, 12, "joint_k_v_simulation", CheckKind::Chi2, vec![n as u64], |s| {
        let kv = draws(s, 12, 0, n, CHUNK, |r| sample_joint_k_v_half(5, 1.0, r))?;
        let mut obs = vec![0u64; nk * bins];
        for (k, v) in kv {
            obs[(k - 1) * bins + ((v * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let c = chi2_pmf_test(&obs, &probs)?;
        Ok((c.p_value, json!({ "chi2": c.statistic, "dof": c.dof })))
    });
    Ok(vec![norm, sim])
}

fn c13(cfg: &SuiteConfig) -> Result<Vec<VerifyReport>> {
    let trials = cfg.calibration_trials;
    let seeds = cfg.run_seeds(trials);
    let n_ks = cfg.n(10_000);
    let n_chi = cfg.n(100_000);
    let pmf = exact_kn_pmf(0.5, 1.0, 50)?;
    let cdf: Vec<f64> = pmf.iter().scan(0.0, |a, p| { *a += p; Some(*a) }).collect();
    let rate = |ps: Vec<f64>| ps.iter().filter(|&&p| p <= cfg.level).count() as f64 / ps.len() as f64;
    let mk = |name: &str, kind, r: f64, sizes: Vec<u64>| {
        VerifyReport::new(13, name, kind, r, 0.03, Rule::AtMost, sizes, seeds.clone(), json!({ "level": cfg.level, "trials": trials, "statistic": "rejection rate under the null" }))
            .with_power_floor(POWER_FLOOR)
    };

    let ks2 = seeds
        .par_iter()
        .map(|&s| {
            let x = draws(s, 13, 0, n_ks, CHUNK, |r| Ok(r.uniform_open()))?;
            let y = draws(s, 13, 1, n_ks, CHUNK, |r| Ok(r.uniform_open()))?;
            Ok(ks_two_sample(&x, &y)?.p_value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let ks1 = seeds
        .par_iter()
        .map(|&s| {
            let x = draws(s, 13, 2, n_ks, CHUNK, |r| Ok(r.uniform_open()))?;
            Ok(ks_one_sample(&x, |v| v.clamp(0.0, 1.0))?.p_value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let chi = seeds
        .par_iter()
        .map(|&s| {
            let ks = draws(s, 13, 3, n_chi, CHUNK, |r| {
                let u = r.uniform_open() * cdf[cdf.len() - 1];
                Ok(cdf.partition_point(|&c| c <= u))
            })?;
            let mut obs = vec![0u64; pmf.len()];
            for k in ks {
                obs[k.min(pmf.len() - 1)] += 1;
            }
            Ok(chi2_pmf_test(&obs, &pmf)?.p_value)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![
        mk("calibration_ks_two_sample", CheckKind::Ks, rate(ks2), vec![n_ks as u64, n_ks as u64]),
        mk("calibration_ks_one_sample", CheckKind::Ks, rate(ks1), vec![n_ks as u64]),
        mk("calibration_chi2", CheckKind::Chi2, rate(chi), vec![n_chi as u64]),
    ])
}

type CheckFn = fn(&SuiteConfig) -> Result<Vec<VerifyReport>>;

const REGISTRY: [(u32, &str, CheckFn); CRITERIA as usize] = [
    (1, "mori_degree_limit", c01),
    (2, "joint_law_match", c02),
    (3, "beta_recursion", c03),
    (4, "nested_marginals", c04),
    (5, "merger_kernel", c05),
    (6, "kn_closed_form", c06),
    (7, "conditioned_half_construction", c07),
    (8, "general_conditioned_step", c08),
    (9, "cross_index_coagulation", c09),
    (10, "dirichlet_boundary", c10),
    (11, "gibbs_normalisation", c11),
    (12, "joint_formula", c12),
    (13, "calibration", c13),
];

/// Short name of criterion `c`.
pub fn criterion_name(c: u32) -> Option<&'static str> {
    REGISTRY.iter().find(|r| r.0 == c).map(|r| r.1)
}

/// Runs every selected check. Failing or erroring checks are recorded, not fatal.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let groups: Vec<Vec<VerifyReport>> = REGISTRY
        .par_iter()
        .filter(|(c, _, _)| cfg.selected(*c))
        .map(|&(c, name, f)| match f(cfg) {
            Ok(r) => r,
            Err(e) => vec![VerifyReport::errored(c, name, CheckKind::Exact, &e)],
        })
        .collect();
    Ok(SuiteReport {
        suite: cfg.suite.clone(),
        checks: groups.into_iter().flatten().collect(),
        config: serde_json::to_value(cfg)?,
    })
}
