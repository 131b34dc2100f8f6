//! Nice tree decompositions.

use super::decomposition::{validate_decomposition, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::UncertainGraph;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Nodes are stored children-first; the last node is the root (empty bag).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
}

/// `make_nice` produces at most `NODE_BOUND_FACTOR * (w + 1) * n` nodes.
pub const NODE_BOUND_FACTOR: usize = 4;

impl NiceTreeDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn width(&self) -> usize {
        self.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(1).saturating_sub(1)
    }

    /// Plain decomposition with the same bags and tree.
    pub fn flatten(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|x| x.bag.clone()).collect();
        let edges = self.nodes.iter().enumerate().flat_map(|(i, x)| x.children.iter().map(move |&c| (c, i))).collect();
        TreeDecomposition { bags, edges }
    }

    /// Checks the per-kind bag relations.
    pub fn check_structure(&self) -> Result<()> {
        for (i, node) in self.nodes.iter().enumerate() {
            let child_bag = |j: usize| &self.nodes[node.children[j]].bag;
            let ok = match node.kind {
                NodeKind::Leaf => node.children.is_empty() && node.bag.is_empty(),
                NodeKind::Introduce(v) => {
                    node.children.len() == 1 && {
                        let mut b = child_bag(0).clone();
                        !b.contains(&v) && {
                            b.push(v);
                            b.sort_unstable();
                            b == node.bag
                        }
                    }
                }
                NodeKind::Forget(v) => {
                    node.children.len() == 1 && {
                        let b = child_bag(0);
                        b.contains(&v) && b.iter().copied().filter(|&x| x != v).eq(node.bag.iter().copied())
                    }
                }
                NodeKind::Join => node.children.len() == 2 && *child_bag(0) == node.bag && *child_bag(1) == node.bag,
            };
            if !ok || node.children.iter().any(|&c| c >= i) {
                return Err(Error::Structural(format!("nice node {i} ({:?}) is malformed", node.kind)));
            }
        }
        if self.nodes.last().map_or(true, |r| !r.bag.is_empty()) {
            return Err(Error::Structural("root bag is not empty".into()));
        }
        Ok(())
    }
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NodeKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Forgets `from \ to`, then introduces `to \ from`, starting at node `at`.
    fn transition(&mut self, mut at: usize, to: &[usize]) -> usize {
        let from = self.nodes[at].bag.clone();
        for &v in from.iter().filter(|v| to.binary_search(v).is_err()) {
            let bag: Vec<usize> = self.nodes[at].bag.iter().copied().filter(|&x| x != v).collect();
            at = self.push(NodeKind::Forget(v), bag, vec![at]);
        }
        for &v in to.iter().filter(|v| from.binary_search(v).is_err()) {
            let mut bag = self.nodes[at].bag.clone();
            bag.push(v);
            bag.sort_unstable();
            at = self.push(NodeKind::Introduce(v), bag, vec![at]);
        }
        at
    }
}

/// Validates `td` against `g`, merges redundant bags and converts to a nice
/// decomposition of the same width.
pub fn make_nice<T: Scalar>(g: &UncertainGraph<T>, td: &TreeDecomposition) -> Result<NiceTreeDecomposition> {
    validate_decomposition(g, td)?;
    let mut b = Builder { nodes: Vec::new() };
    if td.bags.is_empty() {
        b.push(NodeKind::Leaf, Vec::new(), Vec::new());
        return Ok(NiceTreeDecomposition { nodes: b.nodes });
    }
    let td = td.compress();
    let adj = td.adjacency();
    let nb = td.bags.len();
    let mut parent = vec![usize::MAX; nb];
    let mut order = vec![0];
    let mut seen = vec![false; nb];
    seen[0] = true;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        i += 1;
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                parent[y] = x;
                order.push(y);
            }
        }
    }
    let mut top = vec![usize::MAX; nb];
    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); nb];
    for &x in order.iter().skip(1) {
        kids[parent[x]].push(x);
    }
    for &x in order.iter().rev() {
        let bag = &td.bags[x];
        let mut branches = Vec::new();
        if kids[x].is_empty() {
            let leaf = b.push(NodeKind::Leaf, Vec::new(), Vec::new());
            branches.push(b.transition(leaf, bag));
        }
        for &c in &kids[x] {
            branches.push(b.transition(top[c], bag));
        }
        let mut acc = branches[0];
        for &other in &branches[1..] {
            acc = b.push(NodeKind::Join, bag.clone(), vec![acc, other]);
        }
        top[x] = acc;
    }
    b.transition(top[0], &[]);
    Ok(NiceTreeDecomposition { nodes: b.nodes })
}
