use probdom::combin::Combinations;
use probdom::gen::{integer_range, random_graph, random_partial_ktree, random_tree, DyadicRange};
use probdom::reductions::{reduce_kspm_to_tree, reduce_mcc_to_unipbds, McColoredGraph};
use probdom::scalar::{approx_eq, rat, rational_to_f64, Rational};
use probdom::tree_dp::{Mode, TreeDp};
use probdom::tree_spm::{enumerate_splits, pair_max, transform_pairmax_to_2spm};
use probdom::twdp::solve_unipbds_treewidth;
use probdom::{brute_force_pbds, coverage, KspmInstance, Scalar, UncertainGraph};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(11), failure_persistence: None, ..Config::default() }
}

fn graph(n: usize, seed: u64) -> UncertainGraph<Rational> {
    random_graph(n, 0.5, seed, &DyadicRange::unit(3), &integer_range(0, 4)).unwrap()
}

fn subset(n: usize, mask: u32) -> Vec<usize> {
    (0..n).filter(|v| mask >> v & 1 == 1).collect()
}

fn one() -> Rational {
    <Rational as Scalar>::one()
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn coverage_is_monotone_and_submodular(n in 2usize..10, seed in any::<u64>(), ts in any::<u32>(), ss in any::<u32>(), v in 0usize..10) {
        let g = graph(n, seed);
        let v = v % n;
        let t = subset(n, ts);
        let s: Vec<usize> = subset(n, ts & ss);
        let add = |set: &[usize]| {
            let mut x = set.to_vec();
            if !x.contains(&v) {
                x.push(v);
            }
            coverage(&g, &x).unwrap()
        };
        let (cs, ct) = (coverage(&g, &s).unwrap(), coverage(&g, &t).unwrap());
        prop_assert!(cs <= ct);
        prop_assert!(add(&t) >= ct);
        prop_assert!(add(&s) - &cs >= add(&t) - &ct);
    }

    #[test]
    fn backends_agree(n in 1usize..12, seed in any::<u64>(), mask in any::<u32>()) {
        let g = graph(n, seed);
        let s = subset(n, mask);
        let exact = rational_to_f64(&coverage(&g, &s).unwrap());
        let float = coverage(&g.to_f64(), &s).unwrap();
        prop_assert!(approx_eq(exact, float, 1e-12));
    }

    #[test]
    fn tree_fronts_are_antichains_and_rounding_only_lowers(n in 1usize..16, k in 1usize..5, seed in any::<u64>(), e in 1i64..20) {
        let g = random_tree(n, seed, &DyadicRange::unit(3), &integer_range(1, 6)).unwrap();
        let tree = g.as_rooted_tree(0).unwrap();
        let exact = TreeDp::run(&tree, k, Mode::Exact).unwrap();
        let rounded = TreeDp::run(&tree, k, Mode::Rounded(rat(e, 10))).unwrap();
        for v in 0..n {
            for (par, curr) in [(0u8, 0u8), (1, 0), (0, 1)] {
                for b in 0..=k {
                    for dp in [&exact, &rounded] {
                        if let Some(f) = dp.final_front(v, par, curr, b) {
                            prop_assert!(f.is_antichain());
                        }
                    }
                    if let Some(r) = rounded.table(v).get(par, curr, b) {
                        prop_assert!(r <= exact.table(v).get(par, curr, b).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn pair_max_matches_enumeration(a in prop::collection::vec((-20i64..20, 0i64..20), 1..7), b in prop::collection::vec((-20i64..20, 0i64..20), 1..7)) {
        let conv = |l: &[(i64, i64)]| -> Vec<(Rational, Rational)> { l.iter().map(|&(x, y)| (rat(x, 4), rat(y, 4))).collect() };
        let (a, b) = (conv(&a), conv(&b));
        let direct = a.iter().flat_map(|(x, y)| b.iter().map(move |(u, v)| x.clone() + u - y.clone() * v)).max().unwrap();
        let (best, (i, j)) = pair_max(&a, &b).unwrap().unwrap();
        prop_assert_eq!(&best, &direct);
        prop_assert_eq!(a[i].0.clone() + &b[j].0 - a[i].1.clone() * &b[j].1, direct);
    }

    #[test]
    fn transform_keeps_cross_values(a in prop::collection::vec((0i64..20, 1i64..20), 1..6), b in prop::collection::vec((0i64..20, 1i64..20), 1..6)) {
        let conv = |l: &[(i64, i64)]| -> Vec<(Rational, Rational)> { l.iter().map(|&(x, y)| (rat(x, 3), rat(y, 3))).collect() };
        let (a, b) = (conv(&a), conv(&b));
        let t = transform_pairmax_to_2spm(&a, &b).unwrap();
        for i in 0..a.len() {
            for j in 0..b.len() {
                prop_assert_eq!(t.pair_value(i, a.len() + j), a[i].0.clone() + &b[j].0 - a[i].1.clone() * &b[j].1);
            }
        }
        let (_, (i, j)) = t.solve().unwrap();
        prop_assert!(i < t.split && j >= t.split);
    }

    #[test]
    fn some_split_is_valid(n in 2usize..13, seed in any::<u64>(), mask in any::<u32>(), k in 1usize..5) {
        let g = random_tree(n, seed, &DyadicRange::constant(rat(1, 2)), &integer_range(1, 1)).unwrap();
        let tree = g.as_rooted_tree(0).unwrap();
        let mut s = subset(n, mask);
        s.truncate(k);
        let k = s.len();
        let inside = |part: &[usize]| part.iter().filter(|v| s.contains(v)).count();
        prop_assert!(enumerate_splits(&tree, k).iter().any(|sp| 2 * inside(&sp.u0) <= k && 2 * inside(&sp.u1) <= k && 2 * inside(&sp.u2) <= k));
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn twdp_agrees_with_brute_on_both_backends(n in 3usize..10, w in 1usize..4, k in 0usize..4, seed in any::<u64>(), pn in 1i64..9) {
        let p = rat(pn, 8);
        let g = random_partial_ktree(n, w, 0.8, seed, &DyadicRange::constant(p.clone()), &integer_range(0, 3)).unwrap();
        let opt = brute_force_pbds(&g, k).value;
        let r = solve_unipbds_treewidth(&g, Some(&p), k, None).unwrap();
        prop_assert_eq!(&r.value, &opt);
        r.verify(&g).unwrap();
        let rf = solve_unipbds_treewidth(&g.to_f64(), Some(&p.to_f64()), k, None).unwrap();
        prop_assert!(approx_eq(rf.value, rational_to_f64(&opt), 1e-9));
    }

    #[test]
    fn tree_reduction_is_sound(pairs in prop::collection::vec((1i64..16, 1i64..16), 1..6), kk in 1usize..4) {
        let k = kk.min(pairs.len());
        let inst = KspmInstance::new(pairs.iter().map(|&(x, y)| (rat(x, 4), rat(y, 4))).collect(), k, Some(rat(0, 1))).unwrap();
        let red = reduce_kspm_to_tree(&inst).unwrap();
        prop_assert!(red.graph.is_tree());
        prop_assert!(red.graph.edges().iter().all(|e| e.2 >= rat(0, 1) && e.2 <= one()));
        for set in Combinations::new(inst.len(), k) {
            prop_assert_eq!(coverage(&red.graph, &red.map_certificate(&set)).unwrap(), red.expected_value(&inst, &set));
        }
    }

    #[test]
    fn mcc_probabilities_in_range(k in 2usize..4, n in 1usize..3, pn in 1i64..4, edges in prop::collection::vec((0usize..9, 0usize..9), 0..4)) {
        let total = k * n;
        let mut es: Vec<(usize, usize)> = edges.into_iter().map(|(u, v)| (u % total, v % total)).filter(|(u, v)| u / n != v / n).map(|(u, v)| (u.min(v), u.max(v))).collect();
        es.sort_unstable();
        es.dedup();
        let src = McColoredGraph::new(k, (0..total).map(|v| v / n).collect(), es).unwrap();
        let red = reduce_mcc_to_unipbds(&src, &rat(pn, 4), None).unwrap();
        prop_assert!(red.graph.edges().iter().all(|e| e.2 == rat(pn, 4)));
        prop_assert!(red.graph.weights().iter().all(|w| *w >= rat(0, 1)));
    }
}
