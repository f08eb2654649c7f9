//! Preferential attachment trees against the Mittag-Leffler chain limits.

use mlpa::chain::{mori_chain, spacings};
use mlpa::harness::ks_two_sample;
use mlpa::tree::{argmax_beyond, grow_tree, max_scaled_degree, scaled_degrees};
use mlpa::RngStream;

const TREES: usize = 2000;

fn trees<F: FnMut(&mlpa::tree::TreeState) -> T, T>(seed: u64, n: usize, count: usize, mut f: F) -> Vec<T> {
    let mut rng = RngStream::new(seed, 0);
    (0..count)
        .map(|_| {
            let t = grow_tree(0.0, n, &mut rng).unwrap();
            assert_eq!(t.degrees.iter().map(|&d| d as usize).sum::<usize>(), 2 * n);
            assert!(t.degrees.iter().all(|&d| d >= 1));
            f(&t)
        })
        .collect()
}

fn chain_spacings(seed: u64, r: usize, count: usize) -> Vec<Vec<f64>> {
    let mut rng = RngStream::new(seed, 1);
    (0..count).map(|_| spacings(&mori_chain(0.0, r, &mut rng).unwrap()).xi).collect()
}

fn mean_var(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    (m, x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0))
}

#[test]
fn second_vertex_degree_matches_spacing() {
    let d1 = trees(41, 20_000, TREES, |t| scaled_degrees(t, 1).unwrap()[1]);
    let xi1: Vec<f64> = chain_spacings(41, 1, TREES).into_iter().map(|x| x[1]).collect();
    let ks = ks_two_sample(&d1, &xi1).unwrap();
    assert!(ks.p_value > 0.01, "{ks:?}");
}

#[test]
fn root_degree_mean() {
    let d0 = trees(42, 20_000, TREES, |t| scaled_degrees(t, 0).unwrap()[0]);
    let m = mean_var(&d0).0;
    let want = 2.0 / std::f64::consts::PI.sqrt();
    assert!((m / want - 1.0).abs() < 0.03, "{m} vs {want}");
}

#[test]
fn truncated_max_degree_matches_max_spacing() {
    let r_cap = 50;
    let stats = trees(43, 10_000, TREES, |t| (max_scaled_degree(t, r_cap), argmax_beyond(t, r_cap)));
    let tree_max: Vec<f64> = stats.iter().map(|s| s.0).collect();
    let beyond = stats.iter().filter(|s| s.1).count() as f64 / TREES as f64;
    let chain_max: Vec<f64> = chain_spacings(43, r_cap - 1, TREES)
        .into_iter()
        .map(|x| x.into_iter().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let ks = ks_two_sample(&tree_max, &chain_max).unwrap();
    eprintln!("P(argmax > {r_cap}) ~ {beyond:.4}, KS {ks:?}");
    assert!(ks.p_value > 0.05, "{ks:?}");
    assert!(beyond < 0.05, "{beyond}");
    assert!(tree_max.iter().all(|&m| m > 0.0));
}

#[test]
fn joint_moment_of_first_two_degrees() {
    let prod = trees(44, 20_000, TREES, |t| {
        let s = scaled_degrees(t, 1).unwrap();
        s[0] * s[1]
    });
    let chain: Vec<f64> = chain_spacings(44, 1, 100_000).into_iter().map(|x| x[0] * x[1]).collect();
    let (mt, vt) = mean_var(&prod);
    let (mc, vc) = mean_var(&chain);
    let se = (vt / prod.len() as f64 + vc / chain.len() as f64).sqrt();
    assert!((mt - mc).abs() < 3.0 * se, "{mt} vs {mc} (se {se})");
}

#[test]
fn first_two_degrees_exchangeable() {
    let d0 = trees(45, 20_000, TREES, |t| scaled_degrees(t, 0).unwrap()[0]);
    let d1 = trees(46, 20_000, TREES, |t| scaled_degrees(t, 1).unwrap()[1]);
    let ks = ks_two_sample(&d0, &d1).unwrap();
    assert!(ks.p_value > 0.01, "{ks:?}");
}
