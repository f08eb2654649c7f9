//! Simulation and verification toolkit for generalized Mittag-Leffler limits.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`]: log-gamma ratios, negative moments of tilted stable laws,
//!   the positive stable density, Kummer's `U` and exact block-count pmfs.
//! * [`rng`] and [`samplers`]: reproducible counter-based streams and exact
//!   variate generators (gamma, beta, stable, polynomially tilted stable,
//!   generalized Mittag-Leffler).
//! * [`chain`]: the Poisson-Dirichlet beta-recursion chain, its spacings, the
//!   conditioned chain and the cross-index coagulation identities.
//! * [`crp`]: Chinese restaurant partitions, the nested merger scheme, merger
//!   kernels and the Gibbs-partition quantities.
//! * [`tree`]: beta-recursive (linear preferential attachment) trees.
//! * [`harness`]: KS / chi-square machinery and the verification suite.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain;
pub mod crp;
pub mod error;
pub mod harness;
pub mod rng;
pub mod samplers;
pub mod special;
pub mod tree;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use special::{AlphaTheta, MomentQuery};
