//! `beta`-recursive trees: vertex `n+1` attaches to `i` with probability
//! `(d_n(i) + beta) / (2n + beta (n+1))`.
//!
//! The weight `d + beta` is split as `(d - 1) + (1 + beta)`: one "excess"
//! token per degree unit beyond the first, plus `1 + beta > 0` per vertex.
//! Both parts are non-negative for every `beta > -1`, so a single uniform
//! picks either a uniform excess token or a uniform vertex in O(1).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeState {
    pub beta: f64,
    /// Edge count; vertices are `0..=n`.
    pub n: usize,
    pub degrees: Vec<u32>,
    /// `parent[i]` for `i >= 1`; `parent[0]` is unused and set to 0.
    pub parent: Vec<u32>,
}

impl TreeState {
    /// `n^{-1/(2+beta)}`.
    pub fn scale(&self) -> f64 {
        (self.n as f64).powf(-1.0 / (2.0 + self.beta))
    }
}

pub fn grow_tree(beta: f64, n: usize, rng: &mut RngStream) -> Result<TreeState> {
    if !(beta > -1.0) || !beta.is_finite() {
        return Err(Error::domain(format!("beta must exceed -1, got {beta}")));
    }
    if n == 0 {
        return Err(Error::domain("a tree needs at least one edge"));
    }
    if n >= u32::MAX as usize {
        return Err(Error::domain(format!("n = {n} exceeds the vertex index range")));
    }
    let mut degrees = vec![0u32; n + 1];
    let mut parent = vec![0u32; n + 1];
    let mut excess: Vec<u32> = Vec::with_capacity(n);
    degrees[0] = 1;
    degrees[1] = 1;
    let w = 1.0 + beta;
    for m in 1..n {
        // m edges, vertices 0..=m, m - 1 excess tokens.
        let tokens = (m - 1) as f64;
        let u = rng.uniform_open() * (tokens + w * (m + 1) as f64);
        let target = if u < tokens {
            excess[(u as usize).min(m - 2)]
        } else {
            (((u - tokens) / w) as usize).min(m) as u32
        };
        degrees[target as usize] += 1;
        excess.push(target);
        degrees[m + 1] = 1;
        parent[m + 1] = target;
    }
    Ok(TreeState { beta, n, degrees, parent })
}

/// `n^{-1/(2+beta)} (d_n(0), ..., d_n(r))`.
pub fn scaled_degrees(tree: &TreeState, r: usize) -> Result<Vec<f64>> {
    if r > tree.n {
        return Err(Error::domain(format!("r = {r} exceeds n = {}", tree.n)));
    }
    let c = tree.scale();
    Ok(tree.degrees[..=r].iter().map(|&d| c * d as f64).collect())
}

/// `n^{-1/(2+beta)} max_{i <= r_cap} d_n(i)`.
pub fn max_scaled_degree(tree: &TreeState, r_cap: usize) -> f64 {
    let top = r_cap.min(tree.n);
    let m = tree.degrees[..=top].iter().copied().max().unwrap_or(0);
    tree.scale() * m as f64
}

/// True when the overall maximum degree is not attained at any vertex `<= r_cap`.
pub fn argmax_beyond(tree: &TreeState, r_cap: usize) -> bool {
    let top = r_cap.min(tree.n);
    let head = tree.degrees[..=top].iter().copied().max().unwrap_or(0);
    tree.degrees[top + 1..].iter().any(|&d| d > head)
}

/// CSV `vertex,parent,degree`; the root's parent column is empty.
pub fn write_tree_csv<W: Write>(out: W, tree: &TreeState) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["vertex", "parent", "degree"]).map_err(csv_err)?;
    for (i, &d) in tree.degrees.iter().enumerate() {
        let p = if i == 0 { String::new() } else { tree.parent[i].to_string() };
        w.write_record([i.to_string(), p, d.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}
