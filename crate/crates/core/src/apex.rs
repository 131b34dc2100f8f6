//! Prefix-restricted treewidth driver for uniform-probability instances on
//! sparse (planar-like) graphs.

use std::time::Instant;

use crate::coverage::{coverage, expected_coverage};
use crate::error::Result;
use crate::graph::UncertainGraph;
use crate::report::{Guarantee, SolutionReport};
use crate::scalar::Scalar;
use crate::twdp::{heuristic_tree_decomposition, solve_unipbds_treewidth, uniform_p};

/// Vertices by `C(V, {v})` descending, ties by id.
pub fn order_by_singleton_coverage<T: Scalar>(g: &UncertainGraph<T>) -> Vec<usize> {
    let all: Vec<usize> = (0..g.n()).collect();
    let vals: Vec<T> = (0..g.n()).map(|v| expected_coverage(g, &all, &[v]).expect("valid vertex")).collect();
    let mut order = all;
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    order
}

/// Whether every vertex is within `r` hops of `set`.
pub fn check_r_domination<T: Scalar>(g: &UncertainGraph<T>, set: &[usize], r: usize) -> bool {
    g.bfs_distances(set).iter().all(|&d| d <= r)
}

/// Closed neighbourhood of the first `j` vertices of `order`, sorted.
pub fn closed_prefix<T: Scalar>(g: &UncertainGraph<T>, order: &[usize], j: usize) -> Vec<usize> {
    let mut mark = vec![false; g.n()];
    for &v in &order[..j] {
        mark[v] = true;
        for u in g.neighbor_ids(v) {
            mark[u] = true;
        }
    }
    (0..g.n()).filter(|&v| mark[v]).collect()
}

/// Default width threshold `ceil(3 sqrt(k))`.
pub fn default_width_threshold(k: usize) -> usize {
    (3.0 * (k as f64).sqrt()).ceil() as usize
}

/// Picks the longest prefix of the singleton-coverage order whose closed
/// neighbourhood has heuristic width at most `width_threshold`, solves
/// exactly there and reports coverage on the whole graph. Sets smaller than
/// `min(k, n)` are padded in order.
pub fn solve_apex<T: Scalar>(g: &UncertainGraph<T>, p: Option<&T>, k: usize, width_threshold: Option<usize>) -> Result<SolutionReport<T>> {
    let start = Instant::now();
    let p = uniform_p(g, p)?;
    let n = g.n();
    let target = k.min(n);
    let threshold = width_threshold.unwrap_or_else(|| default_width_threshold(k));
    let sigma = order_by_singleton_coverage(g);

    let mut selected: Option<(usize, usize)> = None;
    let mut last: Option<(Vec<usize>, usize)> = None;
    for j in 1..=n {
        let verts = closed_prefix(g, &sigma, j);
        let width = match &last {
            Some((prev, w)) if *prev == verts => *w,
            _ => {
                let sub = g.induced_subgraph(&verts)?;
                heuristic_tree_decomposition(&sub).width()
            }
        };
        if width <= threshold {
            selected = Some((j, width));
        }
        last = Some((verts, width));
    }
    let fallback = selected.is_none();
    let prefix = match selected {
        Some((j, _)) => j,
        None => ((k as f64).sqrt().ceil() as usize).clamp(1, n.max(1)),
    };

    let mut set = Vec::new();
    let mut sub_n = 0;
    let mut sub_width = 0;
    if n > 0 {
        let verts = closed_prefix(g, &sigma, prefix);
        let sub = g.induced_subgraph(&verts)?;
        let r = solve_unipbds_treewidth(&sub, Some(&p), target, None)?;
        sub_n = verts.len();
        sub_width = r.param("width").and_then(|w| w.parse().ok()).unwrap_or(0);
        set = r.set.iter().map(|&i| verts[i]).collect();
    }
    let mut padded = 0;
    for &v in &sigma {
        if set.len() >= target {
            break;
        }
        if !set.contains(&v) {
            set.push(v);
            padded += 1;
        }
    }
    let value = coverage(g, &set)?;
    Ok(SolutionReport::new("apex", k, set, value)
        .with_guarantee(Guarantee::Heuristic)
        .with_param("width_threshold", threshold)
        .with_param("prefix", prefix)
        .with_param("fallback", fallback)
        .with_param("subgraph_n", sub_n)
        .with_param("subgraph_width", sub_width)
        .with_param("padded", padded)
        .with_time(start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::brute_force_pbds;
    use crate::gen::grid;

    fn path(n: usize) -> UncertainGraph<f64> {
        UncertainGraph::from_edges(vec![1.0; n], (0..n - 1).map(|i| (i, i + 1, 0.5))).unwrap()
    }

    #[test]
    fn singleton_order() {
        let star = UncertainGraph::from_edges(vec![1.0; 4], [(1, 0, 0.5), (1, 2, 0.5), (1, 3, 0.5)]).unwrap();
        assert_eq!(order_by_singleton_coverage(&star), vec![1, 0, 2, 3]);
        let iso = UncertainGraph::<f64>::with_unit_weights(4);
        assert_eq!(order_by_singleton_coverage(&iso), vec![0, 1, 2, 3]);
        let scaled = star.map_scalar(|x| *x);
        let scaled = UncertainGraph::from_edges(scaled.weights().iter().map(|w| 2.0 * w).collect(), scaled.edges().iter().cloned()).unwrap();
        assert_eq!(order_by_singleton_coverage(&scaled), vec![1, 0, 2, 3]);
    }

    #[test]
    fn r_domination() {
        let g = path(5);
        assert!(check_r_domination(&g, &[2], 2));
        assert!(!check_r_domination(&g, &[2], 1));
        assert!(check_r_domination(&g, &[0, 1, 2, 3, 4], 0));
    }

    #[test]
    fn grid_and_fallback() {
        let g = grid(4, 4, 0.5);
        let r = solve_apex(&g, None, 2, Some(4)).unwrap();
        assert_eq!(r.param("prefix"), Some("16"));
        assert!((r.value - brute_force_pbds(&g, 2).value).abs() < 1e-9);
        let f = solve_apex(&g, None, 2, Some(0)).unwrap();
        assert_eq!(f.param("fallback"), Some("true"));
        assert_eq!(f.set.len(), 2);
        f.verify(&g).unwrap();
    }
}
