//! Tree decompositions: validation, a min-fill heuristic and PACE text I/O.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::UncertainGraph;
use crate::scalar::Scalar;

/// Bags (sorted vertex lists) connected by tree edges.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, edges }
    }

    /// Max bag size minus one (`-1` style value 0 for no bags).
    pub fn width(&self) -> usize {
        self.bags.iter().map(|b| b.len()).max().unwrap_or(1).saturating_sub(1)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Merges every bag that is contained in a neighbouring bag into it.
    pub fn compress(&self) -> TreeDecomposition {
        let mut bags: Vec<Option<Vec<usize>>> = self.bags.iter().cloned().map(Some).collect();
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); bags.len()];
        for &(a, b) in &self.edges {
            adj[a].insert(b);
            adj[b].insert(a);
        }
        loop {
            let mut merged = false;
            for a in 0..bags.len() {
                let Some(ba) = bags[a].clone() else { continue };
                let target = adj[a].iter().copied().find(|&b| {
                    let bb = bags[b].as_ref().expect("live neighbour");
                    ba.iter().all(|x| bb.binary_search(x).is_ok())
                });
                if let Some(b) = target {
                    let nbrs: Vec<usize> = adj[a].iter().copied().filter(|&c| c != b).collect();
                    for c in nbrs {
                        adj[c].remove(&a);
                        adj[c].insert(b);
                        adj[b].insert(c);
                    }
                    adj[b].remove(&a);
                    adj[a].clear();
                    bags[a] = None;
                    merged = true;
                }
            }
            if !merged {
                break;
            }
        }
        let mut index = vec![usize::MAX; bags.len()];
        let mut out_bags = Vec::new();
        for (i, b) in bags.iter().enumerate() {
            if let Some(b) = b {
                index[i] = out_bags.len();
                out_bags.push(b.clone());
            }
        }
        let mut out_edges = Vec::new();
        for (a, nb) in adj.iter().enumerate() {
            for &b in nb {
                if a < b && index[a] != usize::MAX && index[b] != usize::MAX {
                    out_edges.push((index[a], index[b]));
                }
            }
        }
        TreeDecomposition { bags: out_bags, edges: out_edges }
    }
}

/// Checks that the decomposition tree is a tree, every vertex and edge is
/// covered, and every vertex's bags form a connected subtree. Returns the width.
pub fn validate_decomposition<T: Scalar>(g: &UncertainGraph<T>, td: &TreeDecomposition) -> Result<usize> {
    let nb = td.bags.len();
    if nb == 0 {
        if g.n() == 0 {
            return Ok(0);
        }
        return Err(Error::Validation("decomposition has no bags".into()));
    }
    for &(a, b) in &td.edges {
        if a >= nb || b >= nb || a == b {
            return Err(Error::Validation(format!("bad decomposition edge ({a},{b})")));
        }
    }
    if td.edges.len() + 1 != nb {
        return Err(Error::Validation(format!("{} bags need {} tree edges, found {}", nb, nb - 1, td.edges.len())));
    }
    let adj = td.adjacency();
    let mut seen = vec![false; nb];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Validation("decomposition tree is not connected".into()));
    }
    let mut holders = vec![Vec::new(); g.n()];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= g.n() {
                return Err(Error::Validation(format!("bag {i} contains unknown vertex {v}")));
            }
            holders[v].push(i);
        }
    }
    for (v, h) in holders.iter().enumerate() {
        if h.is_empty() {
            return Err(Error::Validation(format!("vertex {v} is in no bag")));
        }
    }
    for &(u, v, _) in g.edges() {
        let ok = td.bags.iter().any(|b| b.binary_search(&u).is_ok() && b.binary_search(&v).is_ok());
        if !ok {
            return Err(Error::Validation(format!("edge ({u},{v}) is in no bag")));
        }
    }
    let mut mark = vec![false; nb];
    for (v, h) in holders.iter().enumerate() {
        for &i in h {
            mark[i] = true;
        }
        let mut reached = 1;
        let mut visited = vec![false; nb];
        visited[h[0]] = true;
        let mut stack = vec![h[0]];
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if mark[y] && !visited[y] {
                    visited[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        for &i in h {
            mark[i] = false;
        }
        if reached != h.len() {
            return Err(Error::Validation(format!("bags containing vertex {v} are not connected")));
        }
    }
    Ok(td.width())
}

/// Decomposition from a min-fill elimination ordering (ties: fewer
/// neighbours, then smaller id).
pub fn heuristic_tree_decomposition<T: Scalar>(g: &UncertainGraph<T>) -> TreeDecomposition {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition::default();
    }
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbor_ids(v).collect()).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut bag_of = vec![Vec::new(); n];
    for _ in 0..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for v in (0..n).filter(|&v| alive[v]) {
            let nb: Vec<usize> = adj[v].iter().copied().collect();
            let mut fill = 0;
            for i in 0..nb.len() {
                for j in i + 1..nb.len() {
                    if !adj[nb[i]].contains(&nb[j]) {
                        fill += 1;
                    }
                }
            }
            let key = (fill, nb.len(), v);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        let (_, _, v) = best.expect("a vertex is alive");
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        for i in 0..nb.len() {
            for j in i + 1..nb.len() {
                adj[nb[i]].insert(nb[j]);
                adj[nb[j]].insert(nb[i]);
            }
        }
        for &u in &nb {
            adj[u].remove(&v);
        }
        let mut bag = nb.clone();
        bag.push(v);
        bag.sort_unstable();
        bag_of[v] = bag;
        alive[v] = false;
        order.push(v);
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // bag i belongs to order[i]; its parent is the first-eliminated later neighbour
    let bags: Vec<Vec<usize>> = order.iter().map(|&v| bag_of[v].clone()).collect();
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let parent = bag_of[v].iter().filter(|&&u| u != v).map(|&u| pos[u]).min();
        match parent {
            Some(p) => edges.push((i, p)),
            None => roots.push(i),
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    TreeDecomposition::new(bags, edges).compress()
}

/// PACE `.td` text: header `s td <bags> <max bag size> <n>`, bag lines
/// `b <id> <v...>` and edge lines `<i> <j>`, all 1-based.
pub fn write_pace(td: &TreeDecomposition, n: usize) -> String {
    let max = td.bags.iter().map(|b| b.len()).max().unwrap_or(0);
    let mut out = format!("s td {} {} {}\n", td.bags.len(), max, n);
    for (i, b) in td.bags.iter().enumerate() {
        out.push_str(&format!("b {}", i + 1));
        for v in b {
            out.push_str(&format!(" {}", v + 1));
        }
        out.push('\n');
    }
    for &(a, b) in &td.edges {
        out.push_str(&format!("{} {}\n", a + 1, b + 1));
    }
    out
}

pub fn parse_pace(text: &str) -> Result<(TreeDecomposition, usize)> {
    let mut header: Option<(usize, usize)> = None;
    let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
    let mut edges = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() || toks[0] == "c" {
            continue;
        }
        let num = |i: usize| -> Result<usize> {
            toks.get(i)
                .ok_or_else(|| Error::parse(line_no, 1, "missing field"))?
                .parse::<usize>()
                .map_err(|_| Error::parse(line_no, 1, format!("bad integer {:?}", toks[i])))
        };
        match toks[0] {
            "s" => {
                if toks.get(1) != Some(&"td") || toks.len() != 5 {
                    return Err(Error::parse(line_no, 1, "expected `s td <bags> <max> <n>`"));
                }
                let nb = num(2)?;
                header = Some((nb, num(4)?));
                bags = vec![None; nb];
            }
            "b" => {
                let (nb, n) = header.ok_or_else(|| Error::parse(line_no, 1, "bag before header"))?;
                let id = num(1)?;
                if id == 0 || id > nb {
                    return Err(Error::parse(line_no, 3, format!("bag id {id} outside 1..{nb}")));
                }
                let mut bag = Vec::new();
                for i in 2..toks.len() {
                    let v = num(i)?;
                    if v == 0 || v > n {
                        return Err(Error::parse(line_no, 1, format!("vertex {v} outside 1..{n}")));
                    }
                    bag.push(v - 1);
                }
                bags[id - 1] = Some(bag);
            }
            _ => {
                let (nb, _) = header.ok_or_else(|| Error::parse(line_no, 1, "edge before header"))?;
                if toks.len() != 2 {
                    return Err(Error::parse(line_no, 1, "expected a tree edge `<i> <j>`"));
                }
                let (a, b) = (num(0)?, num(1)?);
                if a == 0 || b == 0 || a > nb || b > nb {
                    return Err(Error::parse(line_no, 1, format!("edge ({a},{b}) references a missing bag")));
                }
                edges.push((a - 1, b - 1));
            }
        }
    }
    let (_, n) = header.ok_or_else(|| Error::parse(1, 1, "missing `s td` header"))?;
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::parse(0, 0, format!("bag {} never defined", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok((TreeDecomposition::new(bags, edges), n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> UncertainGraph<f64> {
        UncertainGraph::from_edges(vec![1.0; n], edges.iter().map(|&(u, v)| (u, v, 0.5))).unwrap()
    }

    #[test]
    fn path_bags() {
        let p = g(3, &[(0, 1), (1, 2)]);
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        assert_eq!(validate_decomposition(&p, &td).unwrap(), 1);
        let q = g(3, &[(0, 1), (1, 2), (0, 2)]);
        assert!(matches!(validate_decomposition(&q, &td), Err(Error::Validation(m)) if m.contains("(0,2)")));
    }

    #[test]
    fn broken_running_intersection() {
        let p = g(3, &[(0, 1), (1, 2)]);
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![2], vec![1, 2]], vec![(0, 1), (1, 2)]);
        assert!(validate_decomposition(&p, &td).is_err());
    }

    #[test]
    fn heuristic_widths() {
        let tree = g(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
        assert_eq!(validate_decomposition(&tree, &heuristic_tree_decomposition(&tree)).unwrap(), 1);
        let k4 = g(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(validate_decomposition(&k4, &heuristic_tree_decomposition(&k4)).unwrap(), 3);
        let c5 = g(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        assert_eq!(validate_decomposition(&c5, &heuristic_tree_decomposition(&c5)).unwrap(), 2);
        let empty = g(3, &[]);
        assert_eq!(validate_decomposition(&empty, &heuristic_tree_decomposition(&empty)).unwrap(), 0);
    }

    #[test]
    fn pace_round_trip() {
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2]], vec![(0, 1)]);
        let text = write_pace(&td, 3);
        assert_eq!(text, "s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n");
        let (back, n) = parse_pace(&format!("c comment\n{text}")).unwrap();
        assert_eq!((back, n), (td, 3));
        assert!(parse_pace("s td 1 1 2\nb 1 5\n").is_err());
    }
}
