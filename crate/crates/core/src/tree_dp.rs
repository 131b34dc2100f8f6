//! Tree PTAS and exact tree DP over Pareto fronts.
//!
//! For every vertex `v` the table holds `Y_v(par, curr, b)`: the best
//! contribution of the subtree of `v` given whether the parent and `v` are
//! chosen and how many strict descendants of `v` are chosen. Children are
//! merged one at a time, keeping only non-dominated partial assignments
//! `(A, B)`, where `A` is `v`'s own contribution and `B` the children's sum.

use std::time::Instant;

use crate::coverage::coverage;
use crate::error::{Error, Result};
use crate::graph::RootedTree;
use crate::report::{Guarantee, SolutionReport};
use crate::scalar::Scalar;

/// How `A` is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum Mode<T> {
    /// Floor to a multiple of `m`.
    Rounded(T),
    Exact,
}

/// One partial assignment of the children merged so far.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoEntry<T> {
    pub a_val: T,
    pub b_val: T,
    /// Product of `1 - p(v, z_i)` over children with `curr_i = 1`.
    pub surv_prod: T,
    /// Index of the parent entry in the previous stage's front.
    pub prev: usize,
    /// Budget and choice assigned to the child of this stage.
    pub b_child: usize,
    pub curr_child: u8,
}

/// Antichain sorted by ascending `a_val` and strictly descending `b_val`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront<T> {
    pub entries: Vec<ParetoEntry<T>>,
}

impl<T> Default for ParetoFront<T> {
    fn default() -> Self {
        ParetoFront { entries: Vec::new() }
    }
}

impl<T: Scalar> ParetoFront<T> {
    /// Prunes `candidates` (in construction order) to an antichain.
    /// Among equal `(A, B)` the earliest candidate survives.
    pub fn from_candidates(candidates: Vec<ParetoEntry<T>>) -> Self {
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by(|&i, &j| {
            let (x, y) = (&candidates[i], &candidates[j]);
            y.a_val.total_cmp(&x.a_val).then_with(|| y.b_val.total_cmp(&x.b_val)).then_with(|| i.cmp(&j))
        });
        let mut keep = Vec::new();
        let mut best_b: Option<&T> = None;
        for &i in &order {
            let e = &candidates[i];
            if best_b.map_or(true, |b| e.b_val > *b) {
                best_b = Some(&e.b_val);
                keep.push(i);
            }
        }
        keep.reverse();
        let mut slots: Vec<Option<ParetoEntry<T>>> = candidates.into_iter().map(Some).collect();
        ParetoFront { entries: keep.into_iter().map(|i| slots[i].take().expect("index kept once")).collect() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Index of the entry maximising `A + B` (first one on ties).
    pub fn best(&self) -> Option<(usize, T)> {
        let mut best: Option<(usize, T)> = None;
        for (i, e) in self.entries.iter().enumerate() {
            let v = e.a_val.clone() + &e.b_val;
            if best.as_ref().map_or(true, |(_, b)| v > *b) {
                best = Some((i, v));
            }
        }
        best
    }

    pub fn is_antichain(&self) -> bool {
        self.entries.windows(2).all(|w| w[0].a_val < w[1].a_val && w[0].b_val > w[1].b_val)
    }
}

/// `Y_v(par, curr, b)`; `None` marks an infeasible cell.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexTable<T> {
    cells: [[Vec<Option<T>>; 2]; 2],
}

impl<T: Scalar> VertexTable<T> {
    fn empty(bmax: usize) -> Self {
        let row = vec![None; bmax + 1];
        VertexTable { cells: [[row.clone(), row.clone()], [row.clone(), row]] }
    }

    pub fn get(&self, par: u8, curr: u8, b: usize) -> Option<&T> {
        self.cells[par as usize][curr as usize].get(b).and_then(|c| c.as_ref())
    }

    /// Largest `b` with a stored cell.
    pub fn bmax(&self) -> usize {
        self.cells[0][0].len() - 1
    }
}

/// Base case for a leaf with weight `weight`; `parent_prob` is `None` for a
/// lone root.
pub fn leaf_table<T: Scalar>(weight: &T, parent_prob: Option<&T>, k: usize) -> VertexTable<T> {
    let _ = k;
    let mut t = VertexTable::empty(0);
    t.cells[0][1][0] = Some(weight.clone());
    t.cells[1][1][0] = Some(weight.clone());
    t.cells[0][0][0] = Some(T::zero());
    let p = parent_prob.cloned().unwrap_or_else(T::zero);
    t.cells[1][0][0] = Some(weight.clone() * &p);
    t
}

/// Contribution of `v` itself.
pub fn a_value<T: Scalar>(weight: &T, par: u8, parent_prob: &T, surv_prod: &T, curr: u8, mode: &Mode<T>) -> Result<T> {
    if let Mode::Rounded(m) = mode {
        if *m <= T::zero() {
            return Err(Error::Parameter(format!("rounding step must be positive, got {m}")));
        }
    }
    if curr == 1 {
        return Ok(weight.clone());
    }
    let parent_miss = if par == 1 { T::one() - parent_prob } else { T::one() };
    let raw = weight.clone() * (T::one() - parent_miss * surv_prod);
    Ok(match mode {
        Mode::Rounded(m) => raw.floor_to_multiple(m),
        Mode::Exact => raw,
    })
}

struct MergeCtx<'a, T> {
    weight: &'a T,
    par: u8,
    parent_prob: &'a T,
    curr: u8,
    mode: &'a Mode<T>,
}

/// Fronts before any child is merged.
fn initial_fronts<T: Scalar>(ctx: &MergeCtx<'_, T>, bmax: usize) -> Vec<ParetoFront<T>> {
    let mut fronts = vec![ParetoFront::default(); bmax + 1];
    let a = a_value(ctx.weight, ctx.par, ctx.parent_prob, &T::one(), ctx.curr, ctx.mode).expect("mode validated");
    fronts[0].entries.push(ParetoEntry { a_val: a, b_val: T::zero(), surv_prod: T::one(), prev: 0, b_child: 0, curr_child: 0 });
    fronts
}

/// Extends every front by one child and prunes each budget to an antichain.
#[allow(clippy::too_many_arguments)]
pub fn merge_child<T: Scalar>(
    prev: &[ParetoFront<T>],
    child: &VertexTable<T>,
    child_edge_prob: &T,
    weight: &T,
    par: u8,
    parent_prob: &T,
    curr: u8,
    mode: &Mode<T>,
) -> Vec<ParetoFront<T>> {
    let ctx = MergeCtx { weight, par, parent_prob, curr, mode };
    merge(prev, child, child_edge_prob, &ctx)
}

fn merge<T: Scalar>(prev: &[ParetoFront<T>], child: &VertexTable<T>, child_edge_prob: &T, ctx: &MergeCtx<'_, T>) -> Vec<ParetoFront<T>> {
    let miss = T::one() - child_edge_prob;
    let mut out = Vec::with_capacity(prev.len());
    for beta in 0..prev.len() {
        let mut cands = Vec::new();
        for b_child in 0..=beta.min(child.bmax()) {
            for curr_child in 0..=1u8 {
                if b_child + curr_child as usize > beta {
                    continue;
                }
                let Some(y) = child.get(ctx.curr, curr_child, b_child) else { continue };
                let src = &prev[beta - b_child - curr_child as usize];
                for (idx, e) in src.entries.iter().enumerate() {
                    let surv_prod = if curr_child == 1 { e.surv_prod.clone() * &miss } else { e.surv_prod.clone() };
                    let a_val = a_value(ctx.weight, ctx.par, ctx.parent_prob, &surv_prod, ctx.curr, ctx.mode).expect("mode validated");
                    cands.push(ParetoEntry { a_val, b_val: e.b_val.clone() + y, surv_prod, prev: idx, b_child, curr_child });
                }
            }
        }
        out.push(ParetoFront::from_candidates(cands));
    }
    out
}

// context slots: (par=0,curr=0), (par=1,curr=0), (curr=1)
fn slot(par: u8, curr: u8) -> usize {
    if curr == 1 {
        2
    } else {
        par as usize
    }
}

struct VertexData<T> {
    table: VertexTable<T>,
    // stages[slot][i][beta]; stage 0 is before any child
    stages: [Vec<Vec<ParetoFront<T>>>; 3],
}

/// Complete bottom-up DP over a rooted tree.
pub struct TreeDp<'t, 'g, T> {
    tree: &'t RootedTree<'g, T>,
    k: usize,
    data: Vec<Option<VertexData<T>>>,
}

impl<'t, 'g, T: Scalar> TreeDp<'t, 'g, T> {
    pub fn run(tree: &'t RootedTree<'g, T>, k: usize, mode: Mode<T>) -> Result<Self> {
        if let Mode::Rounded(m) = &mode {
            if *m <= T::zero() {
                return Err(Error::Parameter(format!("rounding step must be positive, got {m}")));
            }
        }
        let g = tree.graph();
        let k = k.min(g.n());
        let mut data: Vec<Option<VertexData<T>>> = (0..g.n()).map(|_| None).collect();
        for v in tree.postorder() {
            let pp = tree.parent_prob(v).cloned().unwrap_or_else(T::zero);
            if tree.children(v).is_empty() {
                let table = leaf_table(g.weight(v), tree.parent_prob(v), k);
                data[v] = Some(VertexData { table, stages: [Vec::new(), Vec::new(), Vec::new()] });
                continue;
            }
            let bmax = k.min(tree.subtree_size(v) - 1);
            let mut table = VertexTable::empty(bmax);
            let mut stages: [Vec<Vec<ParetoFront<T>>>; 3] = [Vec::new(), Vec::new(), Vec::new()];
            for (s, (par, curr)) in [(0u8, 0u8), (1, 0), (0, 1)].into_iter().enumerate() {
                let ctx = MergeCtx { weight: g.weight(v), par, parent_prob: &pp, curr, mode: &mode };
                let mut fronts = vec![initial_fronts(&ctx, bmax)];
                for &z in tree.children(v) {
                    let child = &data[z].as_ref().expect("children first").table;
                    let p = g.edge_prob(v, z).expect("tree edge");
                    let next = merge(fronts.last().expect("non-empty"), child, p, &ctx);
                    fronts.push(next);
                }
                let last = fronts.last().expect("non-empty");
                for (b, front) in last.iter().enumerate() {
                    let value = front.best().map(|(_, v)| v);
                    if curr == 1 {
                        table.cells[0][1][b] = value.clone();
                        table.cells[1][1][b] = value;
                    } else {
                        table.cells[par as usize][0][b] = value;
                    }
                }
                stages[s] = fronts;
            }
            data[v] = Some(VertexData { table, stages });
        }
        Ok(TreeDp { tree, k, data })
    }

    pub fn table(&self, v: usize) -> &VertexTable<T> {
        &self.data[v].as_ref().expect("all vertices processed").table
    }

    /// Front after all children of `v` are merged, for budget `b`.
    pub fn final_front(&self, v: usize, par: u8, curr: u8, b: usize) -> Option<&ParetoFront<T>> {
        let d = self.data[v].as_ref()?;
        d.stages[slot(par, curr)].last()?.get(b)
    }

    /// Fronts of `v` after merging its first `i` children.
    pub fn stage_fronts(&self, v: usize, par: u8, curr: u8, i: usize) -> Option<&[ParetoFront<T>]> {
        let d = self.data[v].as_ref()?;
        d.stages[slot(par, curr)].get(i).map(|f| f.as_slice())
    }

    /// `max{Y_r(0,0,k), Y_r(0,1,k-1)}` and which of the two won.
    pub fn root_value(&self) -> (T, u8) {
        let r = self.tree.root();
        let t = self.table(r);
        let a = t.get(0, 0, self.k).cloned();
        let b = if self.k >= 1 { t.get(0, 1, self.k - 1).cloned() } else { None };
        match (a, b) {
            (Some(a), Some(b)) if b > a => (b, 1),
            (Some(a), _) => (a, 0),
            (None, Some(b)) => (b, 1),
            (None, None) => unreachable!("k <= n keeps one root cell feasible"),
        }
    }

    /// Vertex set realising the root value.
    pub fn reconstruct(&self) -> Vec<usize> {
        let (_, curr) = self.root_value();
        let root_b = self.k - curr as usize;
        let mut set = Vec::new();
        let mut todo = vec![(self.tree.root(), 0u8, curr, root_b)];
        while let Some((v, par, curr, b)) = todo.pop() {
            if curr == 1 {
                set.push(v);
            }
            let children = self.tree.children(v);
            if children.is_empty() {
                continue;
            }
            let stages = &self.data[v].as_ref().expect("processed").stages[slot(par, curr)];
            let (mut idx, _) = stages[children.len()][b].best().expect("feasible cell has an entry");
            let mut beta = b;
            for i in (1..=children.len()).rev() {
                let e = &stages[i][beta].entries[idx];
                todo.push((children[i - 1], curr, e.curr_child, e.b_child));
                beta -= e.b_child + e.curr_child as usize;
                idx = e.prev;
            }
        }
        set.sort_unstable();
        set
    }
}

fn solve_with_mode<T: Scalar>(tree: &RootedTree<'_, T>, k: usize, mode: Mode<T>) -> Result<(Vec<usize>, T)> {
    let dp = TreeDp::run(tree, k, mode)?;
    let set = dp.reconstruct();
    let value = coverage(tree.graph(), &set)?;
    Ok((set, value))
}

/// `(1 - eps)`-approximation with rounding step `M = eps * W / n`.
pub fn solve_tree_ptas<T: Scalar>(tree: &RootedTree<'_, T>, k: usize, eps: &T) -> Result<SolutionReport<T>> {
    let start = Instant::now();
    if *eps <= T::zero() {
        return Err(Error::Parameter(format!("eps must be positive, got {eps}")));
    }
    let g = tree.graph();
    let k = k.min(g.n());
    let w = g.weights().iter().cloned().fold(T::zero(), T::max_of);
    let (set, value) = if w <= T::zero() {
        let set: Vec<usize> = (0..k).collect();
        (set, T::zero())
    } else {
        let m = eps.clone() * &w / &T::from_int(g.n() as i64);
        solve_with_mode(tree, k, Mode::Rounded(m))?
    };
    Ok(SolutionReport::new("tree-ptas", k, set, value)
        .with_guarantee(Guarantee::Approx(eps.to_string()))
        .with_param("eps", eps)
        .with_time(start.elapsed()))
}

/// Exact optimum; fast when few distinct edge probabilities occur.
pub fn solve_tree_exact_bounded<T: Scalar>(tree: &RootedTree<'_, T>, k: usize) -> Result<SolutionReport<T>> {
    let start = Instant::now();
    let k = k.min(tree.graph().n());
    let (set, value) = solve_with_mode(tree, k, Mode::Exact)?;
    let distinct = distinct_probabilities(tree);
    Ok(SolutionReport::new("tree-exact-uniform", k, set, value)
        .with_guarantee(Guarantee::Exact)
        .with_param("distinct_probabilities", distinct)
        .with_time(start.elapsed()))
}

fn distinct_probabilities<T: Scalar>(tree: &RootedTree<'_, T>) -> usize {
    let mut ps: Vec<&T> = tree.graph().edges().iter().map(|(_, _, p)| p).collect();
    ps.sort_by(|a, b| a.total_cmp(b));
    ps.dedup_by(|a, b| a == b);
    ps.len()
}
