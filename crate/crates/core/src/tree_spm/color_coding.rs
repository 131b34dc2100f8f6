//! Monte-Carlo k-SPM by color coding.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::two_spm::pair_max;
use crate::baselines::{improves, KspmInstance};
use crate::error::{Error, Result};
use crate::report::{Guarantee, SolutionReport};
use crate::scalar::Scalar;

/// Number of random colorings used for budget `k` (`ceil(e^{2k})`).
pub fn iterations_for(k: usize) -> usize {
    (2.0 * k as f64).exp().ceil() as usize
}

/// Deterministic coloring number `iteration` for `seed`.
fn coloring(seed: u64, iteration: u64, n: usize, colors: usize, pinned: Option<usize>) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(iteration);
    (0..n)
        .map(|i| match pinned {
            Some(p) if p == i => 0,
            Some(_) => 1 + rng.gen_range(0..colors - 1),
            None => rng.gen_range(0..colors),
        })
        .collect()
}

/// One entry per way of picking one element from each class.
fn half_list<T: Scalar>(pairs: &[(T, T)], classes: &[Vec<usize>]) -> (Vec<(T, T)>, Vec<Vec<usize>>) {
    let mut vals = vec![(T::zero(), T::one())];
    let mut sets: Vec<Vec<usize>> = vec![Vec::new()];
    for class in classes {
        let mut nv = Vec::with_capacity(vals.len() * class.len());
        let mut ns = Vec::with_capacity(vals.len() * class.len());
        for ((x, y), s) in vals.iter().zip(&sets) {
            for &i in class {
                nv.push((x.clone() + &pairs[i].0, y.clone() * &pairs[i].1));
                let mut s2 = s.clone();
                s2.push(i);
                ns.push(s2);
            }
        }
        vals = nv;
        sets = ns;
    }
    (vals, sets)
}

/// Color-coding search for the best exactly-`k` subset. Odd `k` is padded
/// with an element `(sum x, 1)` that is forced into every candidate by
/// giving it a color class of its own.
pub fn solve_kspm_colorcoding<T: Scalar>(inst: &KspmInstance<T>, seed: u64) -> Result<SolutionReport<T>> {
    let start = Instant::now();
    let n = inst.len();
    let k = inst.k;
    if k == 0 {
        return Err(Error::Input("color coding needs k >= 1".into()));
    }
    if k > n {
        return Err(Error::Input(format!("k = {k} exceeds N = {n}")));
    }
    let finish = |set: Vec<usize>, iters: usize, padded: bool| {
        let value = inst.objective(&set);
        SolutionReport::new("kspm-cc", k, set, value)
            .with_guarantee(Guarantee::MonteCarlo)
            .with_param("seed", seed)
            .with_param("iterations", iters)
            .with_param("padded", padded)
            .with_time(start.elapsed())
    };
    if k == n {
        return Ok(finish((0..n).collect(), 0, false));
    }

    let mut pairs = inst.pairs.clone();
    let (kk, pinned) = if k % 2 == 1 {
        let sx = pairs.iter().fold(T::zero(), |acc, p| acc + &p.0);
        pairs.push((sx, T::one()));
        (k + 1, Some(n))
    } else {
        (k, None)
    };
    let h = kk / 2;
    let iters = iterations_for(kk);
    let mut best: Option<(T, Vec<usize>)> = None;
    for it in 0..iters {
        let colors = coloring(seed, it as u64, pairs.len(), kk, pinned);
        let mut classes = vec![Vec::new(); kk];
        for (i, &c) in colors.iter().enumerate() {
            classes[c].push(i);
        }
        if classes.iter().any(|c| c.is_empty()) {
            continue;
        }
        let (l1, s1) = half_list(&pairs, &classes[..h]);
        let (l2, s2) = half_list(&pairs, &classes[h..]);
        if let Some((val, (i, j))) = pair_max(&l1, &l2)? {
            if best.as_ref().map_or(true, |(b, _)| improves(&val, b)) {
                let mut set = s1[i].clone();
                set.extend(&s2[j]);
                best = Some((val, set));
            }
        }
    }
    let set = match best {
        Some((_, set)) => set.into_iter().filter(|&i| Some(i) != pinned).collect(),
        // no colorful coloring at all; fall back to the first k indices
        None => (0..k).collect(),
    };
    Ok(finish(set, iters, pinned.is_some()))
}
