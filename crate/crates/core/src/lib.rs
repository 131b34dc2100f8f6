//! Solvers for budgeted domination on uncertain graphs.
//!
//! A vertex set `S` of size `k` dominates vertex `v` with probability
//! `1 - prod_{u in S} (1 - p(uv))` (with `p(vv) = 1`), and the goal is to
//! maximise the expected dominated weight.

pub mod apex;
pub mod baselines;
pub mod combin;
pub mod coverage;
pub mod error;
pub mod formats;
pub mod gen;
pub mod graph;
pub mod reductions;
pub mod report;
pub mod scalar;
pub mod tree_dp;
pub mod tree_spm;
pub mod twdp;

pub use baselines::{brute_force_kspm, brute_force_ksum, brute_force_pbds, greedy_pbds, KspmInstance};
pub use coverage::{coverage, coverage_prob, expected_coverage, monte_carlo_coverage, McEstimate};
pub use error::{Error, Result};
pub use graph::{RootedTree, UncertainGraph};
pub use report::{Guarantee, SolutionReport};
pub use scalar::{Rational, Scalar};
