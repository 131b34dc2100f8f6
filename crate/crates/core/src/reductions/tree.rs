//! k-SPM to budgeted domination on a unit-weight tree of diameter 4.

use crate::baselines::KspmInstance;
use crate::error::{Error, Result};
use crate::graph::UncertainGraph;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone)]
pub struct TreeReduction {
    pub graph: UncertainGraph<Rational>,
    pub k: usize,
    /// `1 + N k + t / (X Y)^k`.
    pub threshold: Rational,
    /// `X_max * Y_max`.
    pub scale: Rational,
    /// Vertex id of `b_i` for pair `i`.
    pub b: Vec<usize>,
    pub warning: Option<String>,
}

impl TreeReduction {
    /// Pair indices to the corresponding `b` vertices.
    pub fn map_certificate(&self, set: &[usize]) -> Vec<usize> {
        set.iter().map(|&i| self.b[i]).collect()
    }

    /// Coverage of the image of `set`: `1 + N k + (sum x - prod y) / (XY)^k`.
    pub fn expected_value(&self, inst: &KspmInstance<Rational>, set: &[usize]) -> Rational {
        let n = Rational::from_int(inst.len() as i64);
        Rational::one() + n * Rational::from_int(set.len() as i64) + inst.objective(set) / self.scale.powi(inst.k as u32)
    }
}

/// Root `a_0` (id 0) joined to `b_i` (id `1 + i`) with probability
/// `1 - y_i/(XY)`; `b_i` has `N` leaves `c_ij`, the first at probability
/// `x_i/(XY)^k` and the rest at probability 1.
pub fn reduce_kspm_to_tree(inst: &KspmInstance<Rational>) -> Result<TreeReduction> {
    let n = inst.len();
    let k = inst.k;
    if n == 0 {
        return Err(Error::Input("empty k-SPM instance".into()));
    }
    for (i, (x, y)) in inst.pairs.iter().enumerate() {
        if *x <= Rational::zero() || *y <= Rational::zero() {
            return Err(Error::Input(format!("pair {i} = ({x}, {y}) is not strictly positive")));
        }
    }
    let xmax = inst.pairs.iter().map(|p| p.0.clone()).fold(Rational::one(), Scalar::max_of);
    let ymax = inst.pairs.iter().map(|p| p.1.clone()).fold(Rational::one(), Scalar::max_of);
    let scale = xmax * ymax;
    let scale_k = scale.powi(k as u32);
    let mut g = UncertainGraph::with_unit_weights(n * n + n + 1);
    let mut labels = vec!["a0".to_string()];
    let mut b = Vec::with_capacity(n);
    for (i, (x, y)) in inst.pairs.iter().enumerate() {
        let bi = 1 + i;
        b.push(bi);
        labels.push(format!("b{}", i + 1));
        g.add_edge(0, bi, Rational::one() - y.clone() / &scale)?;
        for j in 0..n {
            let c = 1 + n + i * n + j;
            let p = if j == 0 { x.clone() / &scale_k } else { Rational::one() };
            g.add_edge(bi, c, p)?;
        }
    }
    for i in 0..n {
        for j in 0..n {
            labels.push(format!("c{}_{}", i + 1, j + 1));
        }
    }
    g.set_labels(labels)?;
    let t = inst.t.clone().unwrap_or_else(Rational::zero);
    let threshold = Rational::one() + Rational::from_int((n * k) as i64) + t / &scale_k;
    let warning = (n < 6).then(|| format!("N = {n} < 6: optimal sets may leave B"));
    Ok(TreeReduction { graph: g, k, threshold, scale, b, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coverage::coverage;
    use crate::scalar::rat;

    #[test]
    fn example() {
        let inst = KspmInstance::new(vec![(rat(1, 1), rat(1, 1)), (rat(2, 1), rat(1, 1))], 1, Some(rat(0, 1))).unwrap();
        let r = reduce_kspm_to_tree(&inst).unwrap();
        assert_eq!(r.graph.n(), 7);
        assert!(r.graph.is_tree());
        let dist = r.graph.bfs_distances(&[r.graph.n() - 1]);
        assert_eq!(dist.iter().max(), Some(&4));
        assert_eq!(r.graph.edge_prob(0, 1), Some(&rat(1, 2)));
        assert_eq!(r.graph.edge_prob(2, 5), Some(&rat(1, 1)));
        let s = r.map_certificate(&[1]);
        assert_eq!(coverage(&r.graph, &s).unwrap(), rat(7, 2));
        assert_eq!(r.expected_value(&inst, &[1]), rat(7, 2));
        assert!(r.warning.is_some());
    }
}
