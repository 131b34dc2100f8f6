//! Multi-colored clique to uniform-probability budgeted domination.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::UncertainGraph;
use crate::scalar::{Rational, Scalar};
use crate::twdp::TreeDecomposition;

/// Simple graph whose vertices carry one of `k` colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McColoredGraph {
    pub k: usize,
    pub class_of: Vec<usize>,
    /// `u < v`, sorted, no duplicates.
    pub edges: Vec<(usize, usize)>,
}

impl McColoredGraph {
    pub fn new(k: usize, class_of: Vec<usize>, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Input("need at least one color class".into()));
        }
        if let Some((v, c)) = class_of.iter().enumerate().find(|(_, &c)| c >= k) {
            return Err(Error::Input(format!("vertex {v} has color {c} outside 0..{k}")));
        }
        let n = class_of.len();
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Input(format!("edge ({u},{v}) references a missing vertex")));
            }
            if u == v {
                return Err(Error::Input(format!("self-loop at vertex {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::Input(format!("duplicate edge ({u},{v})")));
            }
        }
        Ok(McColoredGraph { k, class_of, edges: set.into_iter().collect() })
    }

    pub fn num_vertices(&self) -> usize {
        self.class_of.len()
    }

    /// Members of each class in id order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &c) in self.class_of.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Common class size after padding (largest class).
    pub fn class_size(&self) -> usize {
        self.classes().iter().map(|c| c.len()).max().unwrap_or(0)
    }

    /// Copy with isolated dummy vertices appended so all classes have equal size.
    pub fn padded(&self) -> McColoredGraph {
        let n = self.class_size();
        let mut class_of = self.class_of.clone();
        for (c, members) in self.classes().iter().enumerate() {
            class_of.extend(std::iter::repeat(c).take(n - members.len()));
        }
        McColoredGraph { k: self.k, class_of, edges: self.edges.clone() }
    }

    /// 1-based position of `v` inside its class.
    pub fn position(&self, v: usize) -> usize {
        let c = self.class_of[v];
        1 + (0..v).filter(|&u| self.class_of[u] == c).count()
    }

    /// Edges between classes `i < j` as `(vertex in V_i, vertex in V_j)`.
    pub fn cross_edges(&self, i: usize, j: usize) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .filter_map(|&(u, v)| match (self.class_of[u], self.class_of[v]) {
                (a, b) if a == i && b == j => Some((u, v)),
                (a, b) if a == j && b == i => Some((v, u)),
                _ => None,
            })
            .collect()
    }

    /// Number of edges joining distinct classes.
    pub fn cross_edge_count(&self) -> usize {
        self.edges.iter().filter(|&&(u, v)| self.class_of[u] != self.class_of[v]).count()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// `clique[i]` must lie in class `i` and all pairs must be adjacent.
    pub fn check_clique(&self, clique: &[usize]) -> Result<()> {
        if clique.len() != self.k {
            return Err(Error::Certificate(format!("expected {} vertices, got {}", self.k, clique.len())));
        }
        for (i, &v) in clique.iter().enumerate() {
            if v >= self.num_vertices() || self.class_of[v] != i {
                return Err(Error::Certificate(format!("vertex {v} is not in class {i}")));
            }
        }
        for i in 0..clique.len() {
            for j in i + 1..clique.len() {
                if !self.has_edge(clique[i], clique[j]) {
                    return Err(Error::Certificate(format!("vertices {} and {} are not adjacent", clique[i], clique[j])));
                }
            }
        }
        Ok(())
    }
}

/// One two-headed gadget: heads `a_i, c_i` (and `h_a, h_c`) with `f` shared tails each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IGadget {
    pub a: Vec<usize>,
    pub c: Vec<usize>,
    pub ha: usize,
    pub hc: usize,
    /// `tails[i]` for the pair `(a_i, c_i)`, `tails[n]` for `(h_a, h_c)`.
    pub tails: Vec<Vec<usize>>,
}

impl IGadget {
    /// `A + {h_c}` when `pick_a`, else `C + {h_a}`.
    pub fn selection(&self, pick_a: bool) -> Vec<usize> {
        let mut s = if pick_a { self.a.clone() } else { self.c.clone() };
        s.push(if pick_a { self.hc } else { self.ha });
        s
    }

    fn head_pairs(&self) -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = self.a.iter().copied().zip(self.c.iter().copied()).collect();
        v.push((self.ha, self.hc));
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub gadgets: Vec<IGadget>,
    /// `b` vertex per gadget, adjacent to that gadget's `C`.
    pub b: Vec<usize>,
    /// Adjacent to every gadget's `A`.
    pub d: usize,
}

/// Connector pair for the `side` class of the class pair `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Connector {
    pub i: usize,
    pub j: usize,
    pub side: usize,
    pub r: usize,
    pub s: usize,
}

#[derive(Debug, Clone)]
pub struct MccReduction {
    pub graph: UncertainGraph<Rational>,
    pub k_prime: usize,
    pub t_prime: Rational,
    pub p: Rational,
    pub f: usize,
    pub n: usize,
    pub m: usize,
    pub source: McColoredGraph,
    pub vertex_blocks: Vec<Block>,
    /// Keyed by class pair `(i, j)`, `i < j`, with the source edges per gadget.
    pub edge_blocks: Vec<((usize, usize), Vec<(usize, usize)>, Block)>,
    pub connectors: Vec<Connector>,
}

struct Builder {
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl Builder {
    fn vertex(&mut self, label: String) -> usize {
        self.labels.push(label);
        self.labels.len() - 1
    }

    fn edge(&mut self, u: usize, v: usize) {
        self.edges.push((u, v));
    }

    /// Two heads sharing `f` tails; the heads are not adjacent.
    fn d_gadget(&mut self, u: usize, v: usize, f: usize, prefix: &str) -> Vec<usize> {
        (0..f)
            .map(|t| {
                let x = self.vertex(format!("{prefix}.t{}", t + 1));
                self.edge(u, x);
                self.edge(v, x);
                x
            })
            .collect()
    }

    fn i_gadget(&mut self, n: usize, f: usize, prefix: &str) -> IGadget {
        let a: Vec<usize> = (1..=n).map(|i| self.vertex(format!("{prefix}.a{i}"))).collect();
        let c: Vec<usize> = (1..=n).map(|i| self.vertex(format!("{prefix}.c{i}"))).collect();
        let ha = self.vertex(format!("{prefix}.ha"));
        let hc = self.vertex(format!("{prefix}.hc"));
        let mut tails = Vec::with_capacity(n + 1);
        for i in 0..n {
            tails.push(self.d_gadget(a[i], c[i], f, &format!("{prefix}.D{}", i + 1)));
            self.edge(a[i], ha);
            self.edge(c[i], hc);
        }
        tails.push(self.d_gadget(ha, hc, f, &format!("{prefix}.Dh")));
        IGadget { a, c, ha, hc, tails }
    }

    fn block(&mut self, size: usize, n: usize, f: usize, prefix: &str) -> Block {
        let gadgets: Vec<IGadget> = (1..=size).map(|x| self.i_gadget(n, f, &format!("{prefix}.I{x}"))).collect();
        let b: Vec<usize> = (1..=size).map(|x| self.vertex(format!("{prefix}.b{x}"))).collect();
        let d = self.vertex(format!("{prefix}.d"));
        for (gd, &bx) in gadgets.iter().zip(&b) {
            for &c in &gd.c {
                self.edge(c, bx);
            }
            for &a in &gd.a {
                self.edge(a, d);
            }
        }
        Block { gadgets, b, d }
    }

    fn finish(self, p: &Rational) -> Result<UncertainGraph<Rational>> {
        let n = self.labels.len();
        let mut g = UncertainGraph::from_edges(vec![Rational::one(); n], self.edges.into_iter().map(|(u, v)| (u, v, p.clone())))?;
        g.set_labels(self.labels)?;
        Ok(g)
    }
}

fn check_p(p: &Rational) -> Result<()> {
    if *p <= Rational::zero() || *p >= Rational::one() {
        return Err(Error::Parameter(format!("p = {p} must lie strictly between 0 and 1")));
    }
    Ok(())
}

/// `max{knm, ceil(n + k^2/p)} + 1`.
pub fn default_f(k: usize, n: usize, m: usize, p: &Rational) -> usize {
    let bound = Rational::from_int(n as i64) + Rational::from_int((k * k) as i64) / p;
    let c = bound.ceil().to_integer();
    let c: usize = c.try_into().unwrap_or(usize::MAX / 2);
    (k * n * m).max(c) + 1
}

/// `(kn+m)((n+1)fp + n + np + 1 + 2(1-(1-p)^n)) + 4 C(k,2) (1-(1-p)^{n+1})`.
pub fn t_prime(k: usize, n: usize, m: usize, f: usize, p: &Rational) -> Rational {
    let r = |x: usize| Rational::from_int(x as i64);
    let q = Rational::one() - p;
    let per = (r(n) + Rational::one()) * r(f) * p + r(n) + r(n) * p + Rational::one() + r(2) * (Rational::one() - q.powi(n as u32));
    let pairs = r(k * k.saturating_sub(1) / 2);
    r(k * n + m) * per + r(4) * pairs * (Rational::one() - q.powi(n as u32 + 1))
}

pub fn reduce_mcc_to_unipbds(src: &McColoredGraph, p: &Rational, f: Option<usize>) -> Result<MccReduction> {
    check_p(p)?;
    let src = src.padded();
    let k = src.k;
    let n = src.class_size();
    let m = src.cross_edge_count();
    let min_f = default_f(k, n, m, p);
    let f = match f {
        Some(f) if f + 1 < min_f => {
            return Err(Error::Parameter(format!("f = {f} must exceed max{{knm, n + k^2/p}} (use at least {})", min_f - 1)));
        }
        Some(f) => f,
        None => min_f,
    };
    let classes = src.classes();
    let mut b = Builder { labels: Vec::new(), edges: Vec::new() };
    let vertex_blocks: Vec<Block> = (0..k).map(|i| b.block(n, n, f, &format!("G{}", i + 1))).collect();
    let mut edge_blocks = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let es = src.cross_edges(i, j);
            let blk = b.block(es.len(), n, f, &format!("G{}_{}", i + 1, j + 1));
            edge_blocks.push(((i, j), es, blk));
        }
    }
    let mut connectors = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            for side in [i, j] {
                let tag = format!("{}_{}^{}", i + 1, j + 1, side + 1);
                let r = b.vertex(format!("r{tag}"));
                let s = b.vertex(format!("s{tag}"));
                connectors.push(Connector { i, j, side, r, s });
            }
        }
    }
    for con in &connectors {
        // vertex block of the side class: a_t of I_l goes to s for t <= l, to r for t >= l
        for (l0, gd) in vertex_blocks[con.side].gadgets.iter().enumerate() {
            let l = l0 + 1;
            for (t0, &a) in gd.a.iter().enumerate() {
                let t = t0 + 1;
                if t <= l {
                    b.edge(a, con.s);
                }
                if t >= l {
                    b.edge(a, con.r);
                }
            }
        }
        // edge block: a_t of I_e goes to r for t <= x, to s for t >= x
        let (_, es, blk) = edge_blocks.iter().find(|(key, _, _)| *key == (con.i, con.j)).expect("block exists");
        for (&(u, v), gd) in es.iter().zip(&blk.gadgets) {
            let x = src.position(if con.side == con.i { u } else { v });
            for (t0, &a) in gd.a.iter().enumerate() {
                let t = t0 + 1;
                if t <= x {
                    b.edge(a, con.r);
                }
                if t >= x {
                    b.edge(a, con.s);
                }
            }
        }
    }
    debug_assert!(classes.iter().all(|c| c.len() == n));
    let graph = b.finish(p)?;
    Ok(MccReduction {
        graph,
        k_prime: (n + 1) * (m + k * n),
        t_prime: t_prime(k, n, m, f, p),
        p: p.clone(),
        f,
        n,
        m,
        source: src,
        vertex_blocks,
        edge_blocks,
        connectors,
    })
}

impl MccReduction {
    /// `A + {h_c}` in the gadgets of the clique's vertices and edges, `C + {h_a}` elsewhere.
    pub fn canonical_clique_solution(&self, clique: &[usize]) -> Result<Vec<usize>> {
        self.source.check_clique(clique)?;
        let mut s = Vec::with_capacity(self.k_prime);
        for (i, blk) in self.vertex_blocks.iter().enumerate() {
            let x = self.source.position(clique[i]);
            for (l0, gd) in blk.gadgets.iter().enumerate() {
                s.extend(gd.selection(l0 + 1 == x));
            }
        }
        for ((i, j), es, blk) in &self.edge_blocks {
            for (&(u, v), gd) in es.iter().zip(&blk.gadgets) {
                s.extend(gd.selection(u == clique[*i] && v == clique[*j]));
            }
        }
        s.sort_unstable();
        Ok(s)
    }

    /// Path decomposition: for every tail a bag `{u, v, tail}` plus
    /// `{h_a, h_c}`, the gadget's `b`, the block's `d` and all connectors.
    pub fn build_gadget_path_decomposition(&self) -> TreeDecomposition {
        let conns: Vec<usize> = self.connectors.iter().flat_map(|c| [c.r, c.s]).collect();
        let mut bags = Vec::new();
        let blocks = self.vertex_blocks.iter().chain(self.edge_blocks.iter().map(|(_, _, b)| b));
        for blk in blocks {
            let mut extra = conns.clone();
            extra.push(blk.d);
            if blk.gadgets.is_empty() {
                bags.push(extra.clone());
            }
            for (gd, &bx) in blk.gadgets.iter().zip(&blk.b) {
                let mut ex = extra.clone();
                ex.push(bx);
                bags.extend(i_gadget_bags(gd, &ex));
            }
        }
        path_decomposition(bags)
    }
}

fn i_gadget_bags(gd: &IGadget, extra: &[usize]) -> Vec<Vec<usize>> {
    let mut bags = Vec::new();
    for ((u, v), tails) in gd.head_pairs().into_iter().zip(&gd.tails) {
        for &t in tails {
            let mut bag = vec![u, v, t, gd.ha, gd.hc];
            bag.extend_from_slice(extra);
            bags.push(bag);
        }
    }
    bags
}

fn path_decomposition(bags: Vec<Vec<usize>>) -> TreeDecomposition {
    let edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
    TreeDecomposition::new(bags, edges)
}

/// Standalone two-headed gadget with `f` tails (heads are 0 and 1) and its
/// width-2 path decomposition.
pub fn d_gadget(f: usize, p: &Rational) -> Result<(UncertainGraph<Rational>, TreeDecomposition)> {
    check_p(p)?;
    let mut b = Builder { labels: Vec::new(), edges: Vec::new() };
    let u = b.vertex("u".into());
    let v = b.vertex("v".into());
    let tails = b.d_gadget(u, v, f, "D");
    let bags = if tails.is_empty() { vec![vec![u, v]] } else { tails.iter().map(|&t| vec![u, v, t]).collect() };
    Ok((b.finish(p)?, path_decomposition(bags)))
}

/// Standalone gadget with `n` head pairs and its path decomposition of width at most 4.
pub fn i_gadget(n: usize, f: usize, p: &Rational) -> Result<(UncertainGraph<Rational>, TreeDecomposition)> {
    check_p(p)?;
    if f == 0 {
        return Err(Error::Parameter("gadgets need at least one tail".into()));
    }
    let mut b = Builder { labels: Vec::new(), edges: Vec::new() };
    let gd = b.i_gadget(n, f, "I");
    let bags = i_gadget_bags(&gd, &[]);
    Ok((b.finish(p)?, path_decomposition(bags)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::coverage;
    use crate::scalar::rat;
    use crate::twdp::validate_decomposition;

    fn tiny() -> McColoredGraph {
        McColoredGraph::new(2, vec![0, 0, 1, 1], [(0, 2)]).unwrap()
    }

    #[test]
    fn parameters() {
        let r = reduce_mcc_to_unipbds(&tiny(), &rat(1, 2), None).unwrap();
        assert_eq!((r.f, r.k_prime), (11, 15));
        assert_eq!(r.t_prime, rat(227, 2));
        assert_eq!(r.graph.n(), 207);
        assert!(r.graph.edges().iter().all(|e| e.2 == rat(1, 2)));
        assert!(reduce_mcc_to_unipbds(&tiny(), &rat(1, 1), None).is_err());
        assert!(reduce_mcc_to_unipbds(&tiny(), &rat(1, 2), Some(5)).is_err());
    }

    #[test]
    fn canonical_solution() {
        let r = reduce_mcc_to_unipbds(&tiny(), &rat(1, 2), None).unwrap();
        let s = r.canonical_clique_solution(&[0, 2]).unwrap();
        assert_eq!(s.len(), 15);
        assert_eq!(coverage(&r.graph, &s).unwrap(), rat(227, 2));
        assert!(matches!(r.canonical_clique_solution(&[1, 2]), Err(Error::Certificate(_))));
    }

    #[test]
    fn decompositions() {
        let (g, td) = d_gadget(3, &rat(1, 2)).unwrap();
        assert_eq!(validate_decomposition(&g, &td).unwrap(), 2);
        let (g, td) = i_gadget(4, 3, &rat(1, 2)).unwrap();
        assert!(validate_decomposition(&g, &td).unwrap() <= 4);
        let r = reduce_mcc_to_unipbds(&tiny(), &rat(1, 2), None).unwrap();
        let w = validate_decomposition(&r.graph, &r.build_gadget_path_decomposition()).unwrap();
        assert!(w <= 10, "{w}");
    }

    #[test]
    fn padding() {
        let g = McColoredGraph::new(2, vec![0, 0, 0, 1], [(0, 3)]).unwrap();
        let p = g.padded();
        assert_eq!(p.classes().iter().map(|c| c.len()).collect::<Vec<_>>(), vec![3, 3]);
        assert_eq!(p.edges, g.edges);
    }
}
