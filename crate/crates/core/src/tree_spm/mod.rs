//! Exact PBDS on trees with arbitrary probabilities, via splits and 2-SPM.
//!
//! For a split vertex `v` the components of `T - v` are grouped into three
//! parts (those before, at and after the `q`-th neighbour). If `v` is not
//! chosen, only the survival products of `v`'s chosen neighbours couple the
//! parts, and the coupling of the two outer parts is a cross-list pair
//! maximisation that reduces to 2-SPM.

pub mod color_coding;
pub mod two_spm;

use std::time::Instant;

use crate::baselines::improves;
use crate::combin::subsets_of;
use crate::coverage::{coverage, expected_coverage};
use crate::error::Result;
use crate::graph::{RootedTree, UncertainGraph};
use crate::report::{Guarantee, SolutionReport};
use crate::scalar::Scalar;

pub use color_coding::solve_kspm_colorcoding;
pub use two_spm::{pair_max, solve_2spm_brute, solve_2spm_by, transform_pairmax_to_2spm, Transformed2Spm};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub v: usize,
    /// 1-based index of `z` among `v`'s neighbours (id order).
    pub q: usize,
    pub z: usize,
    pub u0: Vec<usize>,
    pub u1: Vec<usize>,
    pub u2: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadruple {
    pub d: u8,
    pub c0: usize,
    pub c1: usize,
    pub c2: usize,
}

fn component<T: Scalar>(g: &UncertainGraph<T>, start: usize, blocked: usize) -> Vec<usize> {
    let mut seen = vec![false; g.n()];
    seen[blocked] = true;
    seen[start] = true;
    let mut stack = vec![start];
    let mut out = Vec::new();
    while let Some(x) = stack.pop() {
        out.push(x);
        for y in g.neighbor_ids(x) {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Every `(v, q)` with `v` over all vertices and `q` over `v`'s neighbours.
pub fn enumerate_splits<T: Scalar>(tree: &RootedTree<'_, T>, k: usize) -> Vec<Split> {
    let _ = k;
    let g = tree.graph();
    let mut out = Vec::new();
    for v in 0..g.n() {
        let comps: Vec<(usize, Vec<usize>)> = g.neighbor_ids(v).map(|u| (u, component(g, u, v))).collect();
        for q in 1..=comps.len() {
            let mut u1: Vec<usize> = comps[..q - 1].iter().flat_map(|c| c.1.iter().copied()).collect();
            let mut u2: Vec<usize> = comps[q..].iter().flat_map(|c| c.1.iter().copied()).collect();
            u1.sort_unstable();
            u2.sort_unstable();
            out.push(Split { v, q, z: comps[q - 1].0, u0: comps[q - 1].1.clone(), u1, u2 });
        }
    }
    out
}

/// `Gamma`: all `(d, c0, c1, c2)` with parts in `[0, ceil(k/2)]` summing to
/// `k`, and `d = 1` only when `c0 >= 1`.
pub fn gamma_set(k: usize) -> Vec<Quadruple> {
    let h = k.div_ceil(2);
    let mut out = Vec::new();
    for d in 0..=1u8 {
        for c0 in 0..=h {
            for c1 in 0..=h {
                if c0 + c1 > k || k - c0 - c1 > h {
                    continue;
                }
                if d == 1 && c0 == 0 {
                    continue;
                }
                out.push(Quadruple { d, c0, c1, c2: k - c0 - c1 });
            }
        }
    }
    out
}

/// A list entry `(a, b)` with the subset that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PairEntry<T> {
    pub a: T,
    pub b: T,
    pub set: Vec<usize>,
}

/// Raw entries `(C(U, S), prod over S-neighbours of v of (1 - p))` for every
/// size-`c` subset `S` of `part`.
fn raw_side<T: Scalar>(g: &UncertainGraph<T>, v: usize, part: &[usize], c: usize) -> Vec<PairEntry<T>> {
    if c > part.len() {
        return Vec::new();
    }
    subsets_of(part, c)
        .map(|s| {
            let a = expected_coverage(g, part, &s).expect("valid ids");
            let mut b = T::one();
            for &x in &s {
                if let Some(p) = g.edge_prob(v, x) {
                    b *= &(T::one() - p);
                }
            }
            PairEntry { a, b, set: s }
        })
        .collect()
}

/// Drops entries that another entry beats in both coordinates (larger `a`,
/// smaller `b`). Keeps the earliest on exact ties.
fn prune_side<T: Scalar>(entries: Vec<PairEntry<T>>) -> Vec<PairEntry<T>> {
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&i, &j| {
        let (x, y) = (&entries[i], &entries[j]);
        x.b.total_cmp(&y.b).then_with(|| y.a.total_cmp(&x.a)).then_with(|| i.cmp(&j))
    });
    let mut keep = Vec::new();
    let mut best_a: Option<&T> = None;
    for &i in &order {
        if best_a.map_or(true, |a| entries[i].a > *a) {
            best_a = Some(&entries[i].a);
            keep.push(i);
        }
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<PairEntry<T>>> = entries.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().expect("kept once")).collect()
}

fn best_of<T: Scalar>(items: impl Iterator<Item = (T, Vec<usize>)>) -> Option<(T, Vec<usize>)> {
    let mut best: Option<(T, Vec<usize>)> = None;
    for (v, s) in items {
        if best.as_ref().map_or(true, |(b, _)| improves(&v, b)) {
            best = Some((v, s));
        }
    }
    best
}

fn z_value<T: Scalar>(g: &UncertainGraph<T>, split: &Split, d: u8, c0: usize) -> Option<(T, Vec<usize>)> {
    if c0 > split.u0.len() {
        return None;
    }
    best_of(
        subsets_of(&split.u0, c0)
            .filter(|s| s.contains(&split.z) == (d == 1))
            .map(|s| (expected_coverage(g, &split.u0, &s).expect("valid ids"), s)),
    )
}

/// Lists for one quadruple. `divisor` is `w_v (1 - d p(v,z))`; when it is
/// zero the first coordinates are left unnormalised.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaLists<T> {
    pub l1: Vec<PairEntry<T>>,
    pub l2: Vec<PairEntry<T>>,
    pub z: Option<(T, Vec<usize>)>,
    pub divisor: T,
}

pub fn build_gamma_lists<T: Scalar>(tree: &RootedTree<'_, T>, split: &Split, gamma: Quadruple) -> GammaLists<T> {
    let g = tree.graph();
    let divisor = divisor(g, split, gamma.d);
    let normalise = |l: Vec<PairEntry<T>>| -> Vec<PairEntry<T>> {
        if divisor.is_zero_value() {
            l
        } else {
            l.into_iter().map(|e| PairEntry { a: e.a / &divisor, ..e }).collect()
        }
    };
    GammaLists {
        l1: normalise(raw_side(g, split.v, &split.u1, gamma.c1)),
        l2: normalise(raw_side(g, split.v, &split.u2, gamma.c2)),
        z: z_value(g, split, gamma.d, gamma.c0),
        divisor,
    }
}

fn divisor<T: Scalar>(g: &UncertainGraph<T>, split: &Split, d: u8) -> T {
    let p = g.edge_prob(split.v, split.z).expect("z is a neighbour").clone();
    let miss = if d == 1 { T::one() - p } else { T::one() };
    g.weight(split.v).clone() * miss
}

trait ZeroTest {
    fn is_zero_value(&self) -> bool;
}

impl<T: Scalar> ZeroTest for T {
    fn is_zero_value(&self) -> bool {
        self.total_cmp(&T::zero()).is_eq()
    }
}

/// Best value and set over every candidate the split admits.
fn solve_split<T: Scalar>(g: &UncertainGraph<T>, split: &Split, k: usize) -> Result<Option<(T, Vec<usize>)>> {
    let h = k.div_ceil(2);
    let v = split.v;
    let wv = g.weight(v).clone();
    let parts = [&split.u0, &split.u1, &split.u2];
    let mut best: Option<(T, Vec<usize>)> = None;
    let mut offer = |val: T, set: Vec<usize>| {
        if best.as_ref().map_or(true, |(b, _)| improves(&val, b)) {
            best = Some((val, set));
        }
    };

    // v chosen: the three parts are independent
    if k >= 1 {
        let with_v: Vec<Vec<Option<(T, Vec<usize>)>>> = parts
            .iter()
            .map(|part| {
                (0..=h)
                    .map(|c| {
                        if c > part.len() {
                            return None;
                        }
                        best_of(subsets_of(part, c).map(|s| {
                            let mut full = s.clone();
                            full.push(v);
                            (expected_coverage(g, part, &full).expect("valid ids"), s)
                        }))
                    })
                    .collect()
            })
            .collect();
        for c0 in 0..=h {
            for c1 in 0..=h {
                if c0 + c1 > k - 1 || k - 1 - c0 - c1 > h {
                    continue;
                }
                let c2 = k - 1 - c0 - c1;
                if let (Some(x0), Some(x1), Some(x2)) = (&with_v[0][c0], &with_v[1][c1], &with_v[2][c2]) {
                    let val = wv.clone() + &x0.0 + &x1.0 + &x2.0;
                    let mut set = vec![v];
                    set.extend(x0.1.iter().chain(&x1.1).chain(&x2.1));
                    offer(val, set);
                }
            }
        }
    }

    // v not chosen
    let side1: Vec<Vec<PairEntry<T>>> = (0..=h).map(|c| prune_side(raw_side(g, v, &split.u1, c))).collect();
    let side2: Vec<Vec<PairEntry<T>>> = (0..=h).map(|c| prune_side(raw_side(g, v, &split.u2, c))).collect();
    let mut z_cache: Vec<Vec<Option<Option<(T, Vec<usize>)>>>> = vec![vec![None; h + 1]; 2];
    for gamma in gamma_set(k) {
        let l1 = &side1[gamma.c1];
        let l2 = &side2[gamma.c2];
        if l1.is_empty() || l2.is_empty() {
            continue;
        }
        let z = z_cache[gamma.d as usize][gamma.c0].get_or_insert_with(|| z_value(g, split, gamma.d, gamma.c0)).clone();
        let Some((zv, zs)) = z else { continue };
        let div = divisor(g, split, gamma.d);
        let (val, i, j) = if div.is_zero_value() {
            let pick = |l: &[PairEntry<T>]| {
                let mut bi = 0;
                for (i, e) in l.iter().enumerate() {
                    if improves(&e.a, &l[bi].a) {
                        bi = i;
                    }
                }
                bi
            };
            let (i, j) = (pick(l1), pick(l2));
            (wv.clone() + &zv + &l1[i].a + &l2[j].a, i, j)
        } else {
            let a: Vec<(T, T)> = l1.iter().map(|e| (e.a.clone() / &div, e.b.clone())).collect();
            let abar: Vec<(T, T)> = l2.iter().map(|e| (e.a.clone() / &div, e.b.clone())).collect();
            let (pm, (i, j)) = pair_max(&a, &abar)?.expect("lists are non-empty");
            (wv.clone() + &zv + div * pm, i, j)
        };
        let mut set = zs;
        set.extend(l1[i].set.iter().chain(&l2[j].set));
        offer(val, set);
    }
    Ok(best)
}

/// Exact optimum on any tree, trying every split.
pub fn solve_tree_exact_general<T: Scalar>(tree: &RootedTree<'_, T>, k: usize) -> Result<SolutionReport<T>> {
    let start = Instant::now();
    let g = tree.graph();
    let k = k.min(g.n());
    let set = if k == 0 {
        Vec::new()
    } else if g.n() == 1 {
        vec![0]
    } else {
        let mut best: Option<(T, Vec<usize>)> = None;
        for split in enumerate_splits(tree, k) {
            if let Some((val, set)) = solve_split(g, &split, k)? {
                if best.as_ref().map_or(true, |(b, _)| improves(&val, b)) {
                    best = Some((val, set));
                }
            }
        }
        best.expect("some split admits every set").1
    };
    let value = coverage(g, &set)?;
    Ok(SolutionReport::new("tree-exact-spm", k, set, value).with_guarantee(Guarantee::Exact).with_time(start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn path(n: usize) -> UncertainGraph<Rational> {
        UncertainGraph::from_edges(vec![rat(1, 1); n], (1..n).map(|i| (i - 1, i, rat(1, 2)))).unwrap()
    }

    #[test]
    fn split_counts() {
        let g = UncertainGraph::from_edges(vec![rat(1, 1); 4], (1..4).map(|l| (0, l, rat(1, 2)))).unwrap();
        let t = g.as_rooted_tree(0).unwrap();
        let splits = enumerate_splits(&t, 2);
        assert_eq!(splits.iter().filter(|s| s.v == 0).count(), 3);
        assert_eq!(splits.len(), 6);
    }

    #[test]
    fn path5_split_lemma() {
        let g = path(5);
        let t = g.as_rooted_tree(0).unwrap();
        let splits = enumerate_splits(&t, 2);
        let s = splits.iter().find(|s| s.v == 2 && s.q == 1).unwrap();
        assert_eq!((s.u1.clone(), s.u0.clone(), s.u2.clone()), (vec![], vec![0, 1], vec![3, 4]));
    }

    #[test]
    fn gamma_lists_example() {
        let g = path(3);
        let t = g.as_rooted_tree(1).unwrap();
        let split = Split { v: 1, q: 2, z: 2, u0: vec![2], u1: vec![0], u2: vec![] };
        let l = build_gamma_lists(&t, &split, Quadruple { d: 0, c0: 0, c1: 1, c2: 0 });
        assert_eq!(l.l1, vec![PairEntry { a: rat(1, 1), b: rat(1, 2), set: vec![0] }]);
        assert_eq!(l.l2, vec![PairEntry { a: rat(0, 1), b: rat(1, 1), set: vec![] }]);
        let l = build_gamma_lists(&t, &split, Quadruple { d: 1, c0: 1, c1: 0, c2: 0 });
        assert_eq!(l.z.unwrap().0, rat(1, 1));
        assert_eq!(l.l1[0].a, rat(0, 1));
        assert_eq!(l.l1[0].b, rat(1, 1));
    }

    #[test]
    fn exact_general_small() {
        let g = path(3);
        let t = g.as_rooted_tree(0).unwrap();
        let r = solve_tree_exact_general(&t, 1).unwrap();
        assert_eq!((r.set, r.value), (vec![1], rat(2, 1)));
        let all = solve_tree_exact_general(&t, 3).unwrap();
        assert_eq!(all.value, rat(3, 1));
        assert!(solve_tree_exact_general(&t, 0).unwrap().set.is_empty());
    }
}
