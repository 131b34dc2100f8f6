//! Exact solver for uniform-probability instances of bounded treewidth.

pub mod decomposition;
pub mod dp;
pub mod nice;

use std::time::Instant;

pub use decomposition::{heuristic_tree_decomposition, parse_pace, validate_decomposition, write_pace, TreeDecomposition};
pub use dp::{dp_step, state_weight, Back, DpContext, DpState, NodeTable, TwDp};
pub use nice::{make_nice, NiceNode, NiceTreeDecomposition, NodeKind, NODE_BOUND_FACTOR};

use crate::coverage::coverage;
use crate::error::{Error, Result};
use crate::graph::UncertainGraph;
use crate::report::{Guarantee, SolutionReport};
use crate::scalar::Scalar;

/// The common edge probability, checked against `p` when given. Graphs
/// without edges use `p` or zero.
pub fn uniform_p<T: Scalar>(g: &UncertainGraph<T>, p: Option<&T>) -> Result<T> {
    match g.uniform_probability() {
        Err((u, v)) => Err(Error::Input(format!(
            "edge ({u},{v}) has probability {} but ({},{}) has {}; the treewidth solver needs one uniform probability",
            g.edge_prob(u, v).expect("edge exists"),
            g.edges()[0].0,
            g.edges()[0].1,
            g.edges()[0].2
        ))),
        Ok(Some(q)) => {
            if let Some(p) = p {
                if *p != q {
                    let (u, v, _) = g.edges()[0];
                    return Err(Error::Input(format!("edge ({u},{v}) has probability {q}, expected {p}")));
                }
            }
            Ok(q)
        }
        Ok(None) => Ok(p.cloned().unwrap_or_else(T::zero)),
    }
}

/// Exact optimum over sets of size `min(k, n)`. Uses `td` when given
/// (validated first), otherwise the min-fill heuristic.
pub fn solve_unipbds_treewidth<T: Scalar>(g: &UncertainGraph<T>, p: Option<&T>, k: usize, td: Option<&TreeDecomposition>) -> Result<SolutionReport<T>> {
    let start = Instant::now();
    let p = uniform_p(g, p)?;
    let k = k.min(g.n());
    let td = match td {
        Some(td) => td.clone(),
        None => heuristic_tree_decomposition(g),
    };
    let nice = make_nice(g, &td)?;
    let width = nice.width();
    let nodes = nice.len();
    let dp = TwDp::run(g, p, k, nice)?;
    let (_, set) = dp.root_solution().ok_or_else(|| Error::Structural("root state is unreachable".into()))?;
    let states: usize = dp.tables.iter().map(|t| t.len()).sum();
    let value = coverage(g, &set)?;
    Ok(SolutionReport::new("twdp", k, set, value)
        .with_guarantee(Guarantee::Exact)
        .with_param("width", width)
        .with_param("nice_nodes", nodes)
        .with_param("states", states)
        .with_time(start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::brute_force_pbds;
    use crate::gen::{integer_range, random_partial_ktree, DyadicRange};
    use crate::scalar::{rat, Rational};

    #[test]
    fn path_example() {
        let g = UncertainGraph::from_edges(vec![1.0; 3], [(0, 1, 0.5), (1, 2, 0.5)]).unwrap();
        let r = solve_unipbds_treewidth(&g, None, 1, None).unwrap();
        assert_eq!((r.set, r.value), (vec![1], 2.0));
        let r0 = solve_unipbds_treewidth(&g, None, 0, None).unwrap();
        assert_eq!((r0.set, r0.value), (vec![], 0.0));
    }

    #[test]
    fn rejects_non_uniform() {
        let g = UncertainGraph::from_edges(vec![1.0; 3], [(0, 1, 0.5), (1, 2, 0.25)]).unwrap();
        let err = solve_unipbds_treewidth(&g, None, 1, None).unwrap_err();
        assert!(err.to_string().contains("(1,2)"), "{err}");
    }

    #[test]
    fn state_weights() {
        let s = DpState { b: 0, gamma: vec![0, 1], alpha: vec![0, 0], beta: vec![2, 0] };
        assert_eq!(state_weight(&s, &[3, 5], 3, &0.5, &4.0), 1.0);
        assert_eq!(state_weight(&s, &[3, 5], 5, &0.5, &4.0), 4.0);
        assert_eq!(state_weight(&s, &[3, 5], 9, &0.5, &4.0), 4.0);
    }

    #[test]
    fn introduce_example() {
        // u = 0, v = 1; bag {u}, then introduce v in the solution
        let g = UncertainGraph::from_edges(vec![rat(1, 1); 2], [(0, 1, rat(1, 2))]).unwrap();
        let td = TreeDecomposition::new(vec![vec![0, 1]], vec![]);
        let nice = make_nice(&g, &td).unwrap();
        let dp = TwDp::run(&g, rat(1, 2), 1, nice).unwrap();
        let node = dp.nice.nodes.iter().position(|x| x.kind == NodeKind::Introduce(1)).unwrap();
        let s = DpState { b: 1, gamma: vec![0, 1], alpha: vec![1, 0], beta: vec![0, 0] };
        let idx = dp.tables[node].find(&s).unwrap();
        assert_eq!(*dp.tables[node].value(idx), rat(3, 2));
    }

    #[test]
    fn matches_brute_force() {
        for seed in 0..30u64 {
            let p = [rat(1, 4), rat(1, 2), rat(3, 4)][seed as usize % 3].clone();
            let n = 4 + (seed as usize % 7);
            let g = random_partial_ktree(n, 1 + seed as usize % 3, 0.7, seed, &DyadicRange::constant(p.clone()), &integer_range(1, 4)).unwrap();
            for k in 0..=3 {
                let r = solve_unipbds_treewidth::<Rational>(&g, None, k, None).unwrap();
                let b = brute_force_pbds(&g, k);
                assert_eq!(r.value, b.value, "seed {seed} k {k}");
                assert_eq!(r.set.len(), k.min(n));
            }
        }
    }
}
