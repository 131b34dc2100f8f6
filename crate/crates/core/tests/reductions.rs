use num_bigint::BigInt;
use probdom::combin::Combinations;
use probdom::reductions::{i_gadget, reduce_kspm_to_tree, reduce_ksum_to_kspm, reduce_mcc_to_unipbds, KsumInstance, McColoredGraph};
use probdom::scalar::{rat, Rational};
use probdom::twdp::validate_decomposition;
use probdom::{brute_force_kspm, brute_force_ksum, brute_force_pbds, coverage, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Non-decreasing sequences over `vals` of length `len`.
fn multisets(vals: &[i64], len: usize) -> Vec<Vec<i64>> {
    fn rec(vals: &[i64], start: usize, len: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for i in start..vals.len() {
            cur.push(vals[i]);
            rec(vals, i, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(vals, 0, len, &mut Vec::new(), &mut out);
    out
}

#[test]
fn ksum_to_kspm_decisions_and_precision() {
    let zero = <Rational as Scalar>::zero();
    for len in 3..=5 {
        for xs in multisets(&[-2, -1, 0, 1, 2], len) {
            let inst = KsumInstance::new(xs.clone(), 3).unwrap();
            let red = reduce_ksum_to_kspm(&inst).unwrap();
            let q = Rational::new(BigInt::from(1), BigInt::from(2).pow(red.q));
            for (i, &x) in xs.iter().enumerate() {
                assert!(red.instance.pairs[i].1 >= rat(1, 2));
                assert!(red.y_upper[i].clone() - &red.instance.pairs[i].1 <= q, "element {x}");
            }
            for set in Combinations::new(xs.len(), 3) {
                let gap = red.precision_gap_bound(&set);
                assert!(gap >= zero && gap <= red.lambda, "{xs:?} {set:?}");
            }
            let yes = brute_force_ksum(&xs, 3).is_some();
            let (best, _) = brute_force_kspm(&red.instance).unwrap();
            assert_eq!(yes, best >= zero, "{xs:?}");
        }
    }
}

#[test]
fn tree_reduction_preserves_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let n = rng.gen_range(2..=5);
        let k = rng.gen_range(1..=n.min(3));
        let pairs = (0..n).map(|_| (rat(rng.gen_range(1..=8), 4), rat(rng.gen_range(1..=8), 4))).collect();
        let inst = probdom::KspmInstance::new(pairs, k, Some(rat(0, 1))).unwrap();
        let red = reduce_kspm_to_tree(&inst).unwrap();
        assert!(red.graph.is_tree());
        assert!(red.graph.edges().iter().all(|e| e.2 >= rat(0, 1) && e.2 <= rat(1, 1)));
        for set in Combinations::new(n, k) {
            assert_eq!(coverage(&red.graph, &red.map_certificate(&set)).unwrap(), red.expected_value(&inst, &set));
        }
    }
}

#[test]
fn mcc_construction_properties() {
    let p = rat(1, 2);
    let src = McColoredGraph::new(2, vec![0, 0, 1, 1], [(0, 2)]).unwrap();
    let red = reduce_mcc_to_unipbds(&src, &p, None).unwrap();
    let (k, n, m, f) = (2, red.n, red.m, red.f);
    let gadgets = k * n + m;
    let per_gadget_v = 2 * n + 2 + (n + 1) * f;
    let blocks_v = k * (n + 1) + (m + 1);
    assert_eq!(red.graph.n(), gadgets * per_gadget_v + blocks_v + 4);
    let per_gadget_e = 2 * f * (n + 1) + 2 * n + 2 * n;
    let conn_e = k * n * (k - 1) * (n + 1) + m * 2 * (n + 1);
    assert_eq!(red.graph.m(), gadgets * per_gadget_e + conn_e);

    let s = red.canonical_clique_solution(&[0, 2]).unwrap();
    assert_eq!(coverage(&red.graph, &s).unwrap(), red.t_prime);
    // each connector pair is hit n+1 times in total
    let q = <Rational as Scalar>::one() - &p;
    for c in &red.connectors {
        let pair = probdom::expected_coverage(&red.graph, &[c.r, c.s], &s).unwrap();
        assert_eq!(pair, rat(2, 1) * (<Rational as Scalar>::one() - q.powi(n as u32 + 1)));
    }
    // flipping any single gadget's selection loses coverage
    let blocks = red.vertex_blocks.iter().chain(red.edge_blocks.iter().map(|(_, _, b)| b));
    for blk in blocks {
        for gd in &blk.gadgets {
            let picked_a = gd.a.iter().all(|v| s.contains(v));
            let mut t: Vec<usize> = s.iter().copied().filter(|v| !gd.selection(picked_a).contains(v)).collect();
            t.extend(gd.selection(!picked_a));
            assert_eq!(t.len(), s.len());
            assert!(coverage(&red.graph, &t).unwrap() < red.t_prime);
        }
    }
    let w = validate_decomposition(&red.graph, &red.build_gadget_path_decomposition()).unwrap();
    assert!(w <= 4 * k * (k - 1) / 2 + 6);
    let (g, td) = i_gadget(4, 3, &p).unwrap();
    assert!(validate_decomposition(&g, &td).unwrap() <= 4);
}

#[test]
fn mcc_k3_decomposition_and_solution() {
    // triangle 0-3-6 across three classes plus distractor edges
    let src = McColoredGraph::new(3, vec![0, 0, 0, 1, 1, 1, 2, 2, 2], [(0, 3), (3, 6), (0, 6), (1, 4), (2, 7)]).unwrap();
    let p = rat(1, 3);
    let red = reduce_mcc_to_unipbds(&src, &p, None).unwrap();
    let s = red.canonical_clique_solution(&[0, 3, 6]).unwrap();
    assert_eq!(s.len(), red.k_prime);
    assert_eq!(coverage(&red.graph, &s).unwrap(), red.t_prime);
    let w = validate_decomposition(&red.graph, &red.build_gadget_path_decomposition()).unwrap();
    assert!(w <= 4 * 3 + 6);
    assert!(red.canonical_clique_solution(&[1, 4, 7]).is_err());
}

#[test]
fn product_lower_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..1000 {
        let k = rng.gen_range(1..=6);
        let ds: Vec<Rational> = (0..k).map(|_| rat(rng.gen_range(0..=64), 64)).collect();
        let prod = ds.iter().fold(<Rational as Scalar>::one(), |acc, d| acc * (<Rational as Scalar>::one() - d));
        let sum = ds.iter().fold(<Rational as Scalar>::zero(), |acc, d| acc + d);
        assert!(prod >= <Rational as Scalar>::one() - sum);
    }
}

#[test]
fn tree_chain_small_exhaustive() {
    // the full chain on a few instances; the acceptance suite covers all of them
    for xs in [vec![-1, 0, 1], vec![-2, 1, 1, 2], vec![2, 2, 1]] {
        let yes = brute_force_ksum(&xs, 3).is_some();
        let red = reduce_ksum_to_kspm(&KsumInstance::new(xs.clone(), 3).unwrap()).unwrap();
        let tree = reduce_kspm_to_tree(&red.instance).unwrap();
        let opt = brute_force_pbds(&tree.graph, 3);
        assert_eq!(yes, opt.value >= tree.threshold, "{xs:?}");
    }
}
