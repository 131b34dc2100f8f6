//! Expected coverage and its Monte-Carlo estimate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::UncertainGraph;
use crate::scalar::Scalar;

fn membership<T: Scalar>(g: &UncertainGraph<T>, set: &[usize]) -> Result<Vec<bool>> {
    let mut mask = vec![false; g.n()];
    for &v in set {
        g.check_vertex(v)?;
        mask[v] = true;
    }
    Ok(mask)
}

/// Probability that `u` is dominated by `set`: one if `u` is in the set,
/// otherwise `1 - prod (1 - p(uv))` over set members adjacent to `u`.
pub fn coverage_prob<T: Scalar>(g: &UncertainGraph<T>, u: usize, set: &[usize]) -> Result<T> {
    g.check_vertex(u)?;
    let mask = membership(g, set)?;
    Ok(prob_with_mask(g, u, &mask))
}

fn prob_with_mask<T: Scalar>(g: &UncertainGraph<T>, u: usize, mask: &[bool]) -> T {
    if mask[u] {
        return T::one();
    }
    let mut miss = T::one();
    for (w, p) in g.neighbors(u) {
        if mask[w] {
            miss *= &(T::one() - p);
        }
    }
    T::one() - miss
}

/// `C(S1, S2)`: weighted sum over `S1` of the probability of being dominated by `S2`.
pub fn expected_coverage<T: Scalar>(g: &UncertainGraph<T>, s1: &[usize], s2: &[usize]) -> Result<T> {
    let mask = membership(g, s2)?;
    let mut total = T::zero();
    for &v in s1 {
        g.check_vertex(v)?;
        total += &(prob_with_mask(g, v, &mask) * g.weight(v));
    }
    Ok(total)
}

/// `C(V, S)`.
pub fn coverage<T: Scalar>(g: &UncertainGraph<T>, set: &[usize]) -> Result<T> {
    let mask = membership(g, set)?;
    Ok(coverage_with_mask(g, &mask))
}

pub(crate) fn coverage_with_mask<T: Scalar>(g: &UncertainGraph<T>, mask: &[bool]) -> T {
    let mut total = T::zero();
    for v in 0..g.n() {
        if g.weight(v).total_cmp(&T::zero()).is_eq() {
            continue;
        }
        total += &(prob_with_mask(g, v, mask) * g.weight(v));
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Samples possible worlds (each edge present independently with its
/// probability) and averages the weight dominated by `set`.
pub fn monte_carlo_coverage<T: Scalar>(g: &UncertainGraph<T>, set: &[usize], samples: usize, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::Input("monte-carlo needs at least one sample".into()));
    }
    let mask = membership(g, set)?;
    let probs: Vec<f64> = g.edges().iter().map(|(_, _, p)| p.to_f64()).collect();
    let weights: Vec<f64> = g.weights().iter().map(|w| w.to_f64()).collect();
    let base: f64 = (0..g.n()).filter(|&v| mask[v]).map(|v| weights[v]).sum();
    // only edges with exactly one endpoint in the set matter
    let relevant: Vec<(usize, f64)> = g
        .edges()
        .iter()
        .zip(&probs)
        .filter_map(|((u, v, _), &p)| match (mask[*u], mask[*v]) {
            (true, false) => Some((*v, p)),
            (false, true) => Some((*u, p)),
            _ => None,
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hit = vec![u32::MAX; g.n()];
    let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
    for s in 0..samples as u32 {
        let mut value = base;
        for &(outside, p) in &relevant {
            // draw even when already covered so the stream is independent of order
            let present = rng.gen::<f64>() < p;
            if present && hit[outside] != s {
                hit[outside] = s;
                value += weights[outside];
            }
        }
        sum += value;
        sum_sq += value * value;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(McEstimate { mean, std_error: (var / n).sqrt(), samples })
}
