//! Uncertain graphs and rooted trees.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Vertex-weighted undirected graph whose edges exist independently with
/// the stored probability. Vertex ids are `0..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertainGraph<T> {
    weights: Vec<T>,
    edges: Vec<(usize, usize, T)>,
    // adjacency sorted by neighbour id; the usize is the edge index
    adj: Vec<Vec<(usize, usize)>>,
    labels: Option<Vec<String>>,
}

impl<T: Scalar> UncertainGraph<T> {
    /// Graph with the given vertex weights and no edges.
    pub fn new(weights: Vec<T>) -> Result<Self> {
        for (v, w) in weights.iter().enumerate() {
            if *w < T::zero() {
                return Err(Error::Input(format!("vertex {v} has negative weight {w}")));
            }
        }
        let n = weights.len();
        Ok(UncertainGraph { weights, edges: Vec::new(), adj: vec![Vec::new(); n], labels: None })
    }

    pub fn with_unit_weights(n: usize) -> Self {
        Self::new(vec![T::one(); n]).expect("unit weights are valid")
    }

    pub fn from_edges(weights: Vec<T>, edges: impl IntoIterator<Item = (usize, usize, T)>) -> Result<Self> {
        let mut g = Self::new(weights)?;
        for (u, v, p) in edges {
            g.add_edge(u, v, p)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize, p: T) -> Result<()> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(Error::Input(format!("edge ({u},{v}) references a vertex outside 0..{n}")));
        }
        if u == v {
            return Err(Error::Input(format!("self-loop at vertex {u}")));
        }
        if p < T::zero() || p > T::one() {
            return Err(Error::Input(format!("edge ({u},{v}) has probability {p} outside [0,1]")));
        }
        if self.edge_index(u, v).is_some() {
            return Err(Error::Input(format!("duplicate edge ({u},{v})")));
        }
        let idx = self.edges.len();
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges.push((a, b, p));
        for (x, y) in [(u, v), (v, u)] {
            let list = &mut self.adj[x];
            let pos = list.partition_point(|&(w, _)| w < y);
            list.insert(pos, (y, idx));
        }
        Ok(())
    }

    pub fn set_labels(&mut self, labels: Vec<String>) -> Result<()> {
        if labels.len() != self.n() {
            return Err(Error::Input(format!("{} labels for {} vertices", labels.len(), self.n())));
        }
        self.labels = Some(labels);
        Ok(())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, v: usize) -> &T {
        &self.weights[v]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Edges as `(u, v, p)` with `u < v`, in insertion order.
    pub fn edges(&self) -> &[(usize, usize, T)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Neighbours of `v` in increasing id order, with edge probabilities.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, &T)> + '_ {
        self.adj[v].iter().map(move |&(u, e)| (u, &self.edges[e].2))
    }

    pub fn neighbor_ids(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let list = &self.adj[u];
        list.binary_search_by_key(&v, |&(w, _)| w).ok().map(|i| list[i].1)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.edge_index(u, v).is_some()
    }

    /// Probability of edge `uv`, `None` if absent.
    pub fn edge_prob(&self, u: usize, v: usize) -> Option<&T> {
        self.edge_index(u, v).map(|e| &self.edges[e].2)
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::Input(format!("unknown vertex id {v} (n = {})", self.n())))
        }
    }

    /// Returns the common probability if every edge has the same one.
    /// An edgeless graph is uniform with `None` as the probability.
    pub fn uniform_probability(&self) -> std::result::Result<Option<T>, (usize, usize)> {
        let mut it = self.edges.iter();
        let Some((_, _, p0)) = it.next() else { return Ok(None) };
        for (u, v, p) in it {
            if p != p0 {
                return Err((*u, *v));
            }
        }
        Ok(Some(p0.clone()))
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for u in self.neighbor_ids(v) {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == n
    }

    pub fn is_tree(&self) -> bool {
        self.n() >= 1 && self.m() + 1 == self.n() && self.is_connected()
    }

    /// Subgraph induced by `vertices`; the i-th listed vertex becomes id i.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<UncertainGraph<T>> {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            if index[v] != usize::MAX {
                return Err(Error::Input(format!("vertex {v} listed twice")));
            }
            index[v] = i;
        }
        let weights = vertices.iter().map(|&v| self.weights[v].clone()).collect();
        let mut g = UncertainGraph::new(weights)?;
        for (u, v, p) in &self.edges {
            if index[*u] != usize::MAX && index[*v] != usize::MAX {
                g.add_edge(index[*u], index[*v], p.clone())?;
            }
        }
        Ok(g)
    }

    /// Hop distances from the set `sources`, `usize::MAX` when unreachable.
    pub fn bfs_distances(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for u in self.neighbor_ids(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn map_scalar<U: Scalar>(&self, f: impl Fn(&T) -> U) -> UncertainGraph<U> {
        UncertainGraph {
            weights: self.weights.iter().map(&f).collect(),
            edges: self.edges.iter().map(|(u, v, p)| (*u, *v, f(p))).collect(),
            adj: self.adj.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn to_f64(&self) -> UncertainGraph<f64> {
        self.map_scalar(|x| x.to_f64())
    }

    pub fn to_rational(&self) -> UncertainGraph<Rational> {
        self.map_scalar(|x| x.to_rational())
    }
}

/// A tree together with a chosen root.
#[derive(Debug, Clone)]
pub struct RootedTree<'g, T> {
    graph: &'g UncertainGraph<T>,
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    size: Vec<usize>,
    preorder: Vec<usize>,
}

impl<'g, T: Scalar> RootedTree<'g, T> {
    pub fn new(graph: &'g UncertainGraph<T>, root: usize) -> Result<Self> {
        graph.check_vertex(root)?;
        if !graph.is_connected() {
            return Err(Error::NotATree("graph is not connected".into()));
        }
        if graph.m() + 1 != graph.n() {
            return Err(Error::NotATree(format!("{} edges on {} vertices, the graph has a cycle", graph.m(), graph.n())));
        }
        let n = graph.n();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut preorder = Vec::with_capacity(n);
        let mut stack = vec![root];
        let mut seen = vec![false; n];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            preorder.push(v);
            for u in graph.neighbor_ids(v) {
                if !seen[u] {
                    seen[u] = true;
                    parent[u] = Some(v);
                    children[v].push(u);
                }
            }
            // push in reverse so children are visited in id order
            for &u in children[v].iter().rev() {
                stack.push(u);
            }
        }
        let mut size = vec![1; n];
        for &v in preorder.iter().rev() {
            if let Some(p) = parent[v] {
                size[p] += size[v];
            }
        }
        Ok(RootedTree { graph, root, parent, children, size, preorder })
    }

    pub fn graph(&self) -> &'g UncertainGraph<T> {
        self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Number of vertices in the subtree of `v`, including `v`.
    pub fn subtree_size(&self, v: usize) -> usize {
        self.size[v]
    }

    /// Vertices with every parent before its children.
    pub fn preorder(&self) -> &[usize] {
        &self.preorder
    }

    /// Vertices with every child before its parent.
    pub fn postorder(&self) -> impl Iterator<Item = usize> + '_ {
        self.preorder.iter().rev().copied()
    }

    pub fn parent_prob(&self, v: usize) -> Option<&T> {
        self.parent[v].and_then(|p| self.graph.edge_prob(p, v))
    }

    /// Vertices of the subtree rooted at `v`.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.size[v]);
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.children[x].iter().rev());
        }
        out
    }
}

impl<T: Scalar> UncertainGraph<T> {
    pub fn as_rooted_tree(&self, root: usize) -> Result<RootedTree<'_, T>> {
        RootedTree::new(self, root)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn path3() -> UncertainGraph<Rational> {
        UncertainGraph::from_edges(vec![rat(1, 1); 3], [(0, 1, rat(1, 2)), (1, 2, rat(1, 2))]).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        let mut g = UncertainGraph::<f64>::with_unit_weights(3);
        assert!(g.add_edge(0, 0, 0.5).is_err());
        assert!(g.add_edge(0, 3, 0.5).is_err());
        assert!(g.add_edge(0, 1, 1.5).is_err());
        g.add_edge(0, 1, 0.5).unwrap();
        assert!(g.add_edge(1, 0, 0.5).is_err());
        assert!(UncertainGraph::new(vec![-1.0]).is_err());
    }

    #[test]
    fn rooted_path() {
        let g = path3();
        let t = g.as_rooted_tree(1).unwrap();
        assert_eq!(t.children(1), &[0, 2]);
        assert_eq!(t.subtree_size(1), 3);
        assert_eq!(t.parent(0), Some(1));
        assert_eq!(t.parent_prob(2), Some(&rat(1, 2)));
    }

    #[test]
    fn triangle_is_not_a_tree() {
        let g = UncertainGraph::from_edges(vec![1.0; 3], [(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.5)]).unwrap();
        assert!(matches!(g.as_rooted_tree(0), Err(Error::NotATree(_))));
        let forest = UncertainGraph::from_edges(vec![1.0; 3], [(0, 1, 0.5)]).unwrap();
        assert!(matches!(forest.as_rooted_tree(0), Err(Error::NotATree(_))));
    }

    #[test]
    fn single_vertex_tree() {
        let g = UncertainGraph::<f64>::with_unit_weights(1);
        let t = g.as_rooted_tree(0).unwrap();
        assert_eq!(t.subtree_size(0), 1);
        assert!(t.children(0).is_empty());
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = path3();
        let h = g.induced_subgraph(&[2, 1]).unwrap();
        assert_eq!(h.m(), 1);
        assert!(h.has_edge(0, 1));
    }

    #[test]
    fn uniformity() {
        let g = path3();
        assert_eq!(g.uniform_probability(), Ok(Some(rat(1, 2))));
        let mut h = g.clone();
        h.add_edge(0, 2, rat(1, 3)).unwrap();
        assert_eq!(h.uniform_probability(), Err((0, 2)));
    }
}
