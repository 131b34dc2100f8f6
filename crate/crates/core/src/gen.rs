//! Seeded random instance generators. Probabilities and weights are dyadic
//! rationals so that every backend represents them exactly.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baselines::KspmInstance;
use crate::error::{Error, Result};
use crate::graph::UncertainGraph;
use crate::reductions::McColoredGraph;
use crate::scalar::{Rational, Scalar};

/// Closed interval sampled on a grid of step `2^-bits`.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicRange {
    pub lo: Rational,
    pub hi: Rational,
    pub bits: u32,
}

impl DyadicRange {
    pub fn new(lo: Rational, hi: Rational, bits: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::Parameter(format!("empty range [{lo}, {hi}]")));
        }
        Ok(DyadicRange { lo, hi, bits })
    }

    pub fn unit(bits: u32) -> Self {
        DyadicRange { lo: Rational::zero(), hi: Rational::one(), bits }
    }

    pub fn constant(v: Rational) -> Self {
        DyadicRange { lo: v.clone(), hi: v, bits: 0 }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Rational {
        if self.lo == self.hi {
            return self.lo.clone();
        }
        let steps: u64 = 1 << self.bits;
        let u = rng.gen_range(0..=steps);
        let frac = Rational::new(BigInt::from(u), BigInt::from(steps));
        self.lo.clone() + (self.hi.clone() - &self.lo) * frac
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random tree: vertex `i` attaches to a uniform earlier vertex, then ids
/// are shuffled.
pub fn random_tree(n: usize, seed: u64, probs: &DyadicRange, weights: &DyadicRange) -> Result<UncertainGraph<Rational>> {
    if n == 0 {
        return Err(Error::Parameter("a tree needs at least one vertex".into()));
    }
    let mut r = rng(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut r);
    let w = (0..n).map(|_| weights.sample(&mut r)).collect();
    let mut g = UncertainGraph::new(w)?;
    for i in 1..n {
        let j = r.gen_range(0..i);
        g.add_edge(perm[i], perm[j], probs.sample(&mut r))?;
    }
    Ok(g)
}

/// Erdos-Renyi style graph: each pair is an edge with probability `density`.
pub fn random_graph(n: usize, density: f64, seed: u64, probs: &DyadicRange, weights: &DyadicRange) -> Result<UncertainGraph<Rational>> {
    if n == 0 {
        return Err(Error::Parameter("a graph needs at least one vertex".into()));
    }
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Parameter(format!("density {density} outside [0,1]")));
    }
    let mut r = rng(seed);
    let w = (0..n).map(|_| weights.sample(&mut r)).collect();
    let mut g = UncertainGraph::new(w)?;
    for u in 0..n {
        for v in u + 1..n {
            if r.gen::<f64>() < density {
                g.add_edge(u, v, probs.sample(&mut r))?;
            }
        }
    }
    Ok(g)
}

/// Subgraph of a random `w`-tree: every vertex after the first `w + 1`
/// attaches to a random existing `w`-clique; edges survive with
/// probability `keep`. Treewidth is at most `w`.
pub fn random_partial_ktree(n: usize, w: usize, keep: f64, seed: u64, probs: &DyadicRange, weights: &DyadicRange) -> Result<UncertainGraph<Rational>> {
    if n == 0 {
        return Err(Error::Parameter("a graph needs at least one vertex".into()));
    }
    let mut r = rng(seed);
    let wts = (0..n).map(|_| weights.sample(&mut r)).collect();
    let mut g = UncertainGraph::new(wts)?;
    let base = (w + 1).min(n);
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for u in 0..base {
        for v in u + 1..base {
            edges.push((u, v));
        }
    }
    if base == w + 1 {
        for skip in 0..base {
            cliques.push((0..base).filter(|&x| x != skip).collect());
        }
    }
    for v in base..n {
        let c = cliques[r.gen_range(0..cliques.len())].clone();
        for &u in &c {
            edges.push((u, v));
        }
        for skip in 0..c.len() {
            let mut nc: Vec<usize> = c.iter().copied().filter(|&x| x != c[skip]).collect();
            nc.push(v);
            cliques.push(nc);
        }
    }
    for (u, v) in edges {
        if r.gen::<f64>() < keep {
            g.add_edge(u, v, probs.sample(&mut r))?;
        }
    }
    Ok(g)
}

/// `rows x cols` grid with every edge probability `p`.
pub fn grid<T: Scalar>(rows: usize, cols: usize, p: T) -> UncertainGraph<T> {
    let mut g = UncertainGraph::with_unit_weights(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                g.add_edge(v, v + 1, p.clone()).expect("grid edge");
            }
            if r + 1 < rows {
                g.add_edge(v, v + cols, p.clone()).expect("grid edge");
            }
        }
    }
    g
}

/// Random positive k-SPM instance.
pub fn random_kspm(n: usize, k: usize, seed: u64, xs: &DyadicRange, ys: &DyadicRange) -> Result<KspmInstance<Rational>> {
    if xs.lo <= Rational::zero() || ys.lo <= Rational::zero() {
        return Err(Error::Parameter("k-SPM values must be strictly positive".into()));
    }
    let mut r = rng(seed);
    let pairs = (0..n).map(|_| (xs.sample(&mut r), ys.sample(&mut r))).collect();
    KspmInstance::new(pairs, k, None)
}

/// `k` classes of `n` vertices each (vertex `v` in class `v / n`) with `m`
/// distinct cross-class edges chosen uniformly.
pub fn random_mcc(k: usize, n: usize, m: usize, seed: u64) -> Result<McColoredGraph> {
    let mut cross = Vec::new();
    for u in 0..k * n {
        for v in u + 1..k * n {
            if u / n != v / n {
                cross.push((u, v));
            }
        }
    }
    if m > cross.len() {
        return Err(Error::Parameter(format!("only {} cross-class edges exist, asked for {m}", cross.len())));
    }
    let mut r = rng(seed);
    cross.shuffle(&mut r);
    cross.truncate(m);
    McColoredGraph::new(k, (0..k * n).map(|v| v / n).collect(), cross)
}

/// Weights uniform on `{1, ..., max}` as a dyadic range helper.
pub fn integer_range(lo: i64, hi: i64) -> DyadicRange {
    DyadicRange { lo: Rational::from_int(lo), hi: Rational::from_int(hi), bits: 0 }
}
