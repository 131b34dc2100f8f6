//! Exhaustive oracles and the greedy baseline.

use std::time::Instant;

use crate::combin::Combinations;
use crate::coverage::coverage;
use crate::error::{Error, Result};
use crate::graph::UncertainGraph;
use crate::report::{Guarantee, SolutionReport};
use crate::scalar::Scalar;

/// `true` if `cand` beats `best`; float backends need a relative margin so
/// that rounding noise does not break the smallest-set tie rule.
pub(crate) fn improves<T: Scalar>(cand: &T, best: &T) -> bool {
    if T::EXACT {
        cand > best
    } else {
        let (c, b) = (cand.to_f64(), best.to_f64());
        c > b + 1e-12 * 1f64.max(b.abs())
    }
}

/// Incremental coverage state used by the exhaustive and greedy searches.
struct CoverState<'a, T> {
    g: &'a UncertainGraph<T>,
    // adjacency with 1 - p precomputed
    adj: Vec<Vec<(usize, T, T)>>,
    miss: Vec<T>,
    in_set: Vec<bool>,
    value: T,
}

impl<'a, T: Scalar> CoverState<'a, T> {
    fn new(g: &'a UncertainGraph<T>) -> Self {
        let adj = (0..g.n())
            .map(|v| g.neighbors(v).map(|(u, p)| (u, p.clone(), T::one() - p)).collect())
            .collect();
        CoverState { g, adj, miss: vec![T::one(); g.n()], in_set: vec![false; g.n()], value: T::zero() }
    }

    fn gain(&self, v: usize) -> T {
        let mut gain = self.miss[v].clone() * self.g.weight(v);
        for (u, p, _) in &self.adj[v] {
            if !self.in_set[*u] {
                gain += &(self.miss[*u].clone() * p * self.g.weight(*u));
            }
        }
        gain
    }

    /// Adds `v` and returns the data needed to undo it.
    fn add(&mut self, v: usize) -> (T, T, Vec<T>) {
        let old_value = self.value.clone();
        let gain = self.gain(v);
        self.value += &gain;
        let old_miss_v = std::mem::replace(&mut self.miss[v], T::zero());
        let mut saved = Vec::with_capacity(self.adj[v].len());
        for (u, _, q) in &self.adj[v] {
            saved.push(self.miss[*u].clone());
            if !self.in_set[*u] {
                self.miss[*u] *= q;
            }
        }
        self.in_set[v] = true;
        (old_value, old_miss_v, saved)
    }

    fn undo(&mut self, v: usize, (old_value, old_miss_v, saved): (T, T, Vec<T>)) {
        self.in_set[v] = false;
        self.value = old_value;
        self.miss[v] = old_miss_v;
        for ((u, _, _), m) in self.adj[v].iter().zip(saved) {
            self.miss[*u] = m;
        }
    }
}

struct Brute<'a, T> {
    state: CoverState<'a, T>,
    target: usize,
    chosen: Vec<usize>,
    best: Option<(T, Vec<usize>)>,
}

impl<'a, T: Scalar> Brute<'a, T> {
    fn search(&mut self, start: usize) {
        let n = self.state.g.n();
        let depth = self.chosen.len();
        if depth == self.target {
            let better = match &self.best {
                None => true,
                Some((b, _)) => improves(&self.state.value, b),
            };
            if better {
                self.best = Some((self.state.value.clone(), self.chosen.clone()));
            }
            return;
        }
        let remaining = self.target - depth;
        if let Some((best, _)) = &self.best {
            // submodular bound: the r largest singleton gains
            let mut gains: Vec<T> = (start..n).map(|v| self.state.gain(v)).collect();
            gains.sort_by(|a, b| b.total_cmp(a));
            let mut bound = self.state.value.clone();
            for g in gains.iter().take(remaining) {
                bound += g;
            }
            if !improves(&bound, best) {
                return;
            }
        }
        for v in start..=n - remaining {
            let undo = self.state.add(v);
            self.chosen.push(v);
            self.search(v + 1);
            self.chosen.pop();
            self.state.undo(v, undo);
        }
    }
}

/// Exhaustive optimum over all sets of size `min(k, n)`; returns the
/// lexicographically smallest optimal set.
pub fn brute_force_pbds<T: Scalar>(g: &UncertainGraph<T>, k: usize) -> SolutionReport<T> {
    let start = Instant::now();
    let target = k.min(g.n());
    let mut brute = Brute { state: CoverState::new(g), target, chosen: Vec::new(), best: None };
    brute.search(0);
    let (_, set) = brute.best.expect("at least one subset exists");
    let value = coverage(g, &set).expect("ids are valid");
    SolutionReport::new("brute", k, set, value).with_guarantee(Guarantee::Exact).with_time(start.elapsed())
}

/// Plain enumeration without pruning; kept as an independent cross-check.
pub fn brute_force_pbds_plain<T: Scalar>(g: &UncertainGraph<T>, k: usize) -> (T, Vec<usize>) {
    let mut best: Option<(T, Vec<usize>)> = None;
    for set in Combinations::new(g.n(), k.min(g.n())) {
        let v = coverage(g, &set).expect("ids are valid");
        if best.as_ref().map_or(true, |(b, _)| improves(&v, b)) {
            best = Some((v, set));
        }
    }
    best.expect("at least one subset exists")
}

/// `k` rounds of maximum marginal gain, ties to the smallest id.
pub fn greedy_pbds<T: Scalar>(g: &UncertainGraph<T>, k: usize) -> SolutionReport<T> {
    let start = Instant::now();
    let mut state = CoverState::new(g);
    let mut set = Vec::new();
    for _ in 0..k.min(g.n()) {
        let mut best: Option<(usize, T)> = None;
        for v in 0..g.n() {
            if state.in_set[v] {
                continue;
            }
            let gain = state.gain(v);
            if best.as_ref().map_or(true, |(_, b)| gain > *b) {
                best = Some((v, gain));
            }
        }
        let (v, _) = best.expect("a vertex remains");
        state.add(v);
        set.push(v);
    }
    let value = coverage(g, &set).expect("ids are valid");
    SolutionReport::new("greedy", k, set, value).with_guarantee(Guarantee::Greedy).with_time(start.elapsed())
}

/// Some `k`-subset of indices whose values sum to zero (lexicographically first).
pub fn brute_force_ksum(xs: &[i64], k: usize) -> Option<Vec<usize>> {
    Combinations::new(xs.len(), k).find(|c| c.iter().map(|&i| xs[i] as i128).sum::<i128>() == 0)
}

/// `k`-SPM instance: pick exactly `k` pairs maximising `sum x - prod y`.
#[derive(Debug, Clone, PartialEq)]
pub struct KspmInstance<T> {
    pub pairs: Vec<(T, T)>,
    pub k: usize,
    pub t: Option<T>,
}

impl<T: Scalar> KspmInstance<T> {
    /// Decision-format instance: every `x` and `y` strictly positive.
    pub fn new(pairs: Vec<(T, T)>, k: usize, t: Option<T>) -> Result<Self> {
        for (i, (x, y)) in pairs.iter().enumerate() {
            if *x <= T::zero() || *y <= T::zero() {
                return Err(Error::Input(format!("pair {i} = ({x}, {y}) is not strictly positive")));
            }
        }
        Self::optimization(pairs, k, t)
    }

    /// Optimisation-mode instance; any sign is allowed.
    pub fn optimization(pairs: Vec<(T, T)>, k: usize, t: Option<T>) -> Result<Self> {
        if k > pairs.len() {
            return Err(Error::Input(format!("k = {k} exceeds the number of pairs {}", pairs.len())));
        }
        Ok(KspmInstance { pairs, k, t })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `sum x - prod y` over the given indices.
    pub fn objective(&self, set: &[usize]) -> T {
        let mut sx = T::zero();
        let mut py = T::one();
        for &i in set {
            sx += &self.pairs[i].0;
            py *= &self.pairs[i].1;
        }
        sx - py
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> KspmInstance<U> {
        KspmInstance {
            pairs: self.pairs.iter().map(|(x, y)| (f(x), f(y))).collect(),
            k: self.k,
            t: self.t.as_ref().map(&f),
        }
    }
}

/// Maximum of the objective over exactly-`k` index sets, with the
/// lexicographically smallest maximiser.
pub fn brute_force_kspm<T: Scalar>(inst: &KspmInstance<T>) -> Result<(T, Vec<usize>)> {
    if inst.k > inst.len() {
        return Err(Error::Input(format!("k = {} exceeds N = {}", inst.k, inst.len())));
    }
    let mut best: Option<(T, Vec<usize>)> = None;
    for set in Combinations::new(inst.len(), inst.k) {
        let v = inst.objective(&set);
        if best.as_ref().map_or(true, |(b, _)| improves(&v, b)) {
            best = Some((v, set));
        }
    }
    Ok(best.expect("k <= N gives at least one subset"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn star() -> UncertainGraph<Rational> {
        UncertainGraph::from_edges(vec![rat(1, 1); 4], (1..4).map(|l| (0, l, rat(1, 2)))).unwrap()
    }

    #[test]
    fn brute_star() {
        let g = star();
        let r = brute_force_pbds(&g, 1);
        assert_eq!(r.set, vec![0]);
        assert_eq!(r.value, rat(5, 2));
        let r0 = brute_force_pbds(&g, 0);
        assert!(r0.set.is_empty());
        assert_eq!(r0.value, rat(0, 1));
        let all = brute_force_pbds(&g, 9);
        assert_eq!(all.set, vec![0, 1, 2, 3]);
        assert_eq!(all.value, rat(4, 1));
    }

    #[test]
    fn greedy_examples() {
        let mut g = UncertainGraph::<Rational>::with_unit_weights(7);
        for l in 1..4 {
            g.add_edge(0, l, rat(1, 1)).unwrap();
        }
        for l in 5..7 {
            g.add_edge(4, l, rat(1, 1)).unwrap();
        }
        let r = greedy_pbds(&g, 2);
        assert_eq!(r.set, vec![0, 4]);
        assert_eq!(r.value, rat(7, 1));
        let s = greedy_pbds(&star(), 1);
        assert_eq!((s.set, s.value), (vec![0], rat(5, 2)));
    }

    #[test]
    fn ksum_examples() {
        assert_eq!(brute_force_ksum(&[-1, 0, 1], 3), Some(vec![0, 1, 2]));
        assert_eq!(brute_force_ksum(&[1, 2], 2), None);
        assert_eq!(brute_force_ksum(&[-3, 1, 2, 5], 3), Some(vec![0, 1, 2]));
    }

    #[test]
    fn kspm_examples() {
        let a = KspmInstance::new(vec![(rat(1, 1), rat(1, 1)), (rat(2, 1), rat(3, 1))], 2, None).unwrap();
        assert_eq!(brute_force_kspm(&a).unwrap(), (rat(0, 1), vec![0, 1]));
        let a1 = KspmInstance { k: 1, ..a };
        assert_eq!(brute_force_kspm(&a1).unwrap(), (rat(0, 1), vec![0]));
        let b = KspmInstance::new(vec![(rat(2, 1), rat(1, 1)), (rat(3, 1), rat(1, 1)), (rat(5, 1), rat(2, 1))], 2, None).unwrap();
        assert_eq!(brute_force_kspm(&b).unwrap(), (rat(6, 1), vec![1, 2]));
        assert!(KspmInstance::new(vec![(rat(1, 1), rat(1, 1))], 2, None).is_err());
        assert!(KspmInstance::new(vec![(rat(-1, 1), rat(1, 1))], 1, None).is_err());
    }
}
