//! Dynamic programme over a nice tree decomposition for uniform edge
//! probability `p`.
//!
//! A state at node `i` is `(b, gamma, alpha, beta)`: `b` solution vertices in
//! the subtree bags `X_i+`, `gamma` marks bag vertices in the solution, and
//! for unmarked bag vertices `alpha` / `beta` count solution neighbours inside
//! / outside `X_i+`. The value is the best coverage of `X_i+` where an
//! unmarked bag vertex `u` has weight `(1-p)^beta(u) w(u)`.
//!
//! Only reachable states are materialised: tables are built forward from the
//! child tables.

use std::collections::HashMap;

use super::nice::{NiceTreeDecomposition, NodeKind};
use crate::baselines::improves;
use crate::error::{Error, Result};
use crate::graph::UncertainGraph;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DpState {
    pub b: usize,
    /// Per bag position, in bag order.
    pub gamma: Vec<u8>,
    pub alpha: Vec<u8>,
    pub beta: Vec<u8>,
}

impl DpState {
    fn key(&self) -> Vec<u8> {
        let mut k = Vec::with_capacity(1 + 3 * self.gamma.len());
        k.push(self.b as u8);
        for i in 0..self.gamma.len() {
            k.extend([self.gamma[i], self.alpha[i], self.beta[i]]);
        }
        k
    }

    fn from_key(key: &[u8]) -> Self {
        let m = (key.len() - 1) / 3;
        DpState {
            b: key[0] as usize,
            gamma: (0..m).map(|i| key[1 + 3 * i]).collect(),
            alpha: (0..m).map(|i| key[2 + 3 * i]).collect(),
            beta: (0..m).map(|i| key[3 + 3 * i]).collect(),
        }
    }
}

/// Where a state's value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Back {
    Leaf,
    Child(usize),
    Join(usize, usize),
}

#[derive(Debug, Clone)]
pub struct NodeTable<T> {
    pub bag: Vec<usize>,
    keys: Vec<Vec<u8>>,
    vals: Vec<T>,
    back: Vec<Back>,
    index: HashMap<Vec<u8>, usize>,
}

impl<T: Scalar> NodeTable<T> {
    fn new(bag: Vec<usize>) -> Self {
        NodeTable { bag, keys: Vec::new(), vals: Vec::new(), back: Vec::new(), index: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn state(&self, i: usize) -> DpState {
        DpState::from_key(&self.keys[i])
    }

    pub fn value(&self, i: usize) -> &T {
        &self.vals[i]
    }

    pub fn back(&self, i: usize) -> Back {
        self.back[i]
    }

    pub fn find(&self, s: &DpState) -> Option<usize> {
        self.index.get(&s.key()).copied()
    }

    fn insert_new(&mut self, key: Vec<u8>, val: T, back: Back) {
        self.index.insert(key.clone(), self.keys.len());
        self.keys.push(key);
        self.vals.push(val);
        self.back.push(back);
    }

    /// Keeps the larger value; equal values go to the smaller tie key.
    fn offer(&mut self, key: Vec<u8>, val: T, back: Back, tie: Vec<usize>, ties: &mut Vec<Vec<usize>>) {
        match self.index.get(&key) {
            None => {
                self.insert_new(key, val, back);
                ties.push(tie);
            }
            Some(&i) => {
                let old = &self.vals[i];
                if improves(&val, old) || (!improves(old, &val) && tie < ties[i]) {
                    self.vals[i] = val;
                    self.back[i] = back;
                    ties[i] = tie;
                }
            }
        }
    }

    fn pos(&self, v: usize) -> Option<usize> {
        self.bag.binary_search(&v).ok()
    }
}

/// Weight of `u` in state `s` at a node with bag `bag`.
pub fn state_weight<T: Scalar>(s: &DpState, bag: &[usize], u: usize, p: &T, w: &T) -> T {
    match bag.binary_search(&u) {
        Ok(i) if s.gamma[i] == 0 => (T::one() - p).powi(s.beta[i] as u32) * w,
        _ => w.clone(),
    }
}

/// Shared per-run data.
pub struct DpContext<'a, T> {
    pub g: &'a UncertainGraph<T>,
    pub p: T,
    pub k: usize,
    qpow: Vec<T>,
    /// `|X_i+|` bookkeeping: for every node, which vertices have been seen.
    seen: Vec<Vec<bool>>,
}

impl<'a, T: Scalar> DpContext<'a, T> {
    pub fn new(g: &'a UncertainGraph<T>, p: T, k: usize, nice: &NiceTreeDecomposition) -> Result<Self> {
        if k > u8::MAX as usize / 2 {
            return Err(Error::Parameter(format!("budget {k} too large for the treewidth DP")));
        }
        let q = T::one() - &p;
        let qpow = (0..=2 * k + 2).map(|e| q.powi(e as u32)).collect();
        let mut seen: Vec<Vec<bool>> = Vec::with_capacity(nice.len());
        for node in &nice.nodes {
            let mut s = match node.children.first() {
                Some(&c) => seen[c].clone(),
                None => vec![false; g.n()],
            };
            for &c in node.children.iter().skip(1) {
                for (x, y) in s.iter_mut().zip(&seen[c]) {
                    *x |= *y;
                }
            }
            for &v in &node.bag {
                s[v] = true;
            }
            seen.push(s);
        }
        Ok(DpContext { g, p, k, qpow, seen })
    }

    /// Vertices of `X_i+` (subtree bags) for node `i`.
    pub fn subtree_vertices(&self, i: usize) -> Vec<usize> {
        (0..self.g.n()).filter(|&v| self.seen[i][v]).collect()
    }

    fn q(&self, e: usize) -> &T {
        &self.qpow[e]
    }
}

/// Fills the table of `node` from its children's tables.
pub fn dp_step<T: Scalar>(ctx: &DpContext<'_, T>, nice: &NiceTreeDecomposition, node: usize, children: &[&NodeTable<T>]) -> Result<NodeTable<T>> {
    let nd = &nice.nodes[node];
    if children.len() != nd.children.len() || children.iter().zip(&nd.children).any(|(t, &c)| t.bag != nice.nodes[c].bag) {
        return Err(Error::Structural(format!("child tables do not match node {node}")));
    }
    let g = ctx.g;
    let k = ctx.k;
    let mut out = NodeTable::new(nd.bag.clone());
    match nd.kind {
        NodeKind::Leaf => {
            if !nd.bag.is_empty() {
                return Err(Error::Structural(format!("leaf node {node} has a non-empty bag")));
            }
            out.insert_new(vec![0], T::zero(), Back::Leaf);
        }
        NodeKind::Introduce(v) => {
            let child = children[0];
            let pv = out.pos(v).ok_or_else(|| Error::Structural(format!("introduced vertex {v} missing from bag")))?;
            let nbr_pos: Vec<usize> = g.neighbor_ids(v).filter_map(|u| child.pos(u)).collect();
            let outside = g.degree(v) - nbr_pos.len();
            let wv = g.weight(v);
            for (ci, key) in child.keys.iter().enumerate() {
                let b = key[0] as usize;
                let val = &child.vals[ci];
                let gam = |j: usize| key[1 + 3 * j];
                // v not in the solution
                let a_v = nbr_pos.iter().filter(|&&j| gam(j) == 1).count();
                let max_beta = (k - b).min(outside).min(k - a_v.min(k));
                if a_v <= k {
                    for beta in 0..=max_beta {
                        let mut nk = Vec::with_capacity(key.len() + 3);
                        nk.extend_from_slice(&key[..1 + 3 * pv]);
                        nk.extend([0, a_v as u8, beta as u8]);
                        nk.extend_from_slice(&key[1 + 3 * pv..]);
                        let gain = (T::one() - ctx.q(a_v)) * ctx.q(beta) * wv;
                        out.insert_new(nk, val.clone() + &gain, Back::Child(ci));
                    }
                }
                // v in the solution
                if b < k {
                    let mut nk = key.clone();
                    nk[0] += 1;
                    let mut gain = wv.clone();
                    let mut ok = true;
                    for &j in &nbr_pos {
                        if gam(j) == 0 {
                            let (a, be) = (key[2 + 3 * j], key[3 + 3 * j]);
                            if be == 0 {
                                ok = false;
                                break;
                            }
                            nk[2 + 3 * j] = a + 1;
                            nk[3 + 3 * j] = be - 1;
                            gain += &(ctx.p.clone() * ctx.q(be as usize - 1) * g.weight(child.bag[j]));
                        }
                    }
                    if ok {
                        nk.splice(1 + 3 * pv..1 + 3 * pv, [1, 0, 0]);
                        out.insert_new(nk, val.clone() + &gain, Back::Child(ci));
                    }
                }
            }
        }
        NodeKind::Forget(v) => {
            let child = children[0];
            let pv = child.pos(v).ok_or_else(|| Error::Structural(format!("forgotten vertex {v} missing from child bag")))?;
            let mut ties = Vec::new();
            for (ci, key) in child.keys.iter().enumerate() {
                let (z, x, be) = (key[1 + 3 * pv], key[2 + 3 * pv], key[3 + 3 * pv]);
                if z == 0 && be != 0 {
                    continue;
                }
                let mut nk = key.clone();
                nk.drain(1 + 3 * pv..4 + 3 * pv);
                out.offer(nk, child.vals[ci].clone(), Back::Child(ci), vec![z as usize, x as usize], &mut ties);
            }
        }
        NodeKind::Join => {
            let (tj, th) = (children[0], children[1]);
            let m = nd.bag.len();
            // a1[j]: neighbours of bag position j inside the bag, as positions
            let bag_nbrs: Vec<Vec<usize>> = nd.bag.iter().map(|&u| g.neighbor_ids(u).filter_map(|w| out.pos(w)).collect()).collect();
            let group_key = |key: &[u8]| -> Vec<u8> {
                let mut gk = Vec::with_capacity(2 * m);
                for j in 0..m {
                    gk.push(key[1 + 3 * j]);
                    gk.push(key[2 + 3 * j] + key[3 + 3 * j]);
                }
                gk
            };
            let mut groups: HashMap<Vec<u8>, Vec<usize>> = HashMap::new();
            for (hi, key) in th.keys.iter().enumerate() {
                groups.entry(group_key(key)).or_default().push(hi);
            }
            let a_weight = |key: &[u8]| -> (usize, T) {
                let mut cnt = 0;
                let mut w = T::zero();
                for j in 0..m {
                    if key[1 + 3 * j] == 1 {
                        cnt += 1;
                        w += g.weight(nd.bag[j]);
                    }
                }
                (cnt, w)
            };
            let mut ties = Vec::new();
            for (ji, kj) in tj.keys.iter().enumerate() {
                let Some(hs) = groups.get(&group_key(kj)) else { continue };
                let (na, wa) = a_weight(kj);
                let a1: Vec<u8> = (0..m).map(|j| bag_nbrs[j].iter().filter(|&&x| kj[1 + 3 * x] == 1).count() as u8).collect();
                for &hi in hs {
                    let kh = &th.keys[hi];
                    let b = kj[0] as usize + kh[0] as usize - na;
                    if b > k {
                        continue;
                    }
                    let mut nk = vec![0u8; 1 + 3 * m];
                    nk[0] = b as u8;
                    let mut tie = vec![kj[0] as usize - na];
                    let mut lambda = T::zero();
                    let mut ok = true;
                    for j in 0..m {
                        let gm = kj[1 + 3 * j];
                        nk[1 + 3 * j] = gm;
                        if gm == 1 {
                            continue;
                        }
                        let (aj, ah, bh) = (kj[2 + 3 * j], kh[2 + 3 * j], kh[3 + 3 * j]);
                        if aj < a1[j] || ah < a1[j] {
                            ok = false;
                            break;
                        }
                        let eta = aj - a1[j];
                        if bh < eta {
                            ok = false;
                            break;
                        }
                        let (alpha, beta) = (ah + eta, bh - eta);
                        nk[2 + 3 * j] = alpha;
                        nk[3 + 3 * j] = beta;
                        tie.push(eta as usize);
                        let ws = ctx.q(beta as usize).clone() * g.weight(nd.bag[j]);
                        let coef = ctx.q((alpha - a1[j] - eta) as usize).clone() + ctx.q(eta as usize) - ctx.q(alpha as usize) - T::one();
                        lambda += &(coef * &ws);
                    }
                    if !ok {
                        continue;
                    }
                    let val = tj.vals[ji].clone() + &th.vals[hi] - &lambda - &wa;
                    out.offer(nk, val, Back::Join(ji, hi), tie, &mut ties);
                }
            }
        }
    }
    Ok(out)
}

/// All node tables, bottom-up.
pub struct TwDp<'a, T> {
    pub ctx: DpContext<'a, T>,
    pub nice: NiceTreeDecomposition,
    pub tables: Vec<NodeTable<T>>,
}

impl<'a, T: Scalar> TwDp<'a, T> {
    pub fn run(g: &'a UncertainGraph<T>, p: T, k: usize, nice: NiceTreeDecomposition) -> Result<Self> {
        nice.check_structure()?;
        let ctx = DpContext::new(g, p, k, &nice)?;
        let mut tables: Vec<NodeTable<T>> = Vec::with_capacity(nice.len());
        for i in 0..nice.len() {
            let kids: Vec<&NodeTable<T>> = nice.nodes[i].children.iter().map(|&c| &tables[c]).collect();
            let t = dp_step(&ctx, &nice, i, &kids)?;
            tables.push(t);
        }
        Ok(TwDp { ctx, nice, tables })
    }

    /// Solution vertices selected in the subtree of `node` for state `idx`.
    pub fn solution(&self, node: usize, idx: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![(node, idx)];
        while let Some((i, s)) = stack.pop() {
            let nd = &self.nice.nodes[i];
            match (nd.kind, self.tables[i].back(s)) {
                (_, Back::Leaf) => {}
                (NodeKind::Introduce(v), Back::Child(c)) => {
                    let pv = self.tables[i].pos(v).expect("bag holds v");
                    if self.tables[i].keys[s][1 + 3 * pv] == 1 {
                        out.push(v);
                    }
                    stack.push((nd.children[0], c));
                }
                (_, Back::Child(c)) => stack.push((nd.children[0], c)),
                (_, Back::Join(a, b)) => {
                    stack.push((nd.children[0], a));
                    stack.push((nd.children[1], b));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Root value and solution for budget exactly `k`.
    pub fn root_solution(&self) -> Option<(T, Vec<usize>)> {
        let r = self.nice.root();
        let idx = self.tables[r].find(&DpState { b: self.ctx.k, gamma: vec![], alpha: vec![], beta: vec![] })?;
        Some((self.tables[r].value(idx).clone(), self.solution(r, idx)))
    }
}
