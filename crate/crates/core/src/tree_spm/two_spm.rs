//! 2-SPM solving and the reduction of cross-list pair maximisation to 2-SPM.

use crate::baselines::{improves, KspmInstance};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Best unordered pair `i < j` of `0..n` under `value`; first pair wins ties.
pub fn solve_2spm_by<T: Scalar>(n: usize, value: impl Fn(usize, usize) -> T) -> Option<(T, (usize, usize))> {
    let mut best: Option<(T, (usize, usize))> = None;
    for i in 0..n {
        for j in i + 1..n {
            let v = value(i, j);
            if best.as_ref().map_or(true, |(b, _)| improves(&v, b)) {
                best = Some((v, (i, j)));
            }
        }
    }
    best
}

/// `max_{i<j} x_i + x_j - y_i y_j` by enumeration.
pub fn solve_2spm_brute<T: Scalar>(inst: &KspmInstance<T>) -> Result<(T, (usize, usize))> {
    if inst.len() < 2 {
        return Err(Error::Input(format!("2-SPM needs at least two pairs, got {}", inst.len())));
    }
    let p = &inst.pairs;
    Ok(solve_2spm_by(p.len(), |i, j| p[i].0.clone() + &p[j].0 - p[i].1.clone() * &p[j].1).expect("n >= 2"))
}

/// A 2-SPM instance produced from two pair lists. The scale `R` is kept
/// symbolically through `R^2` so every product stays exact: the first
/// `split` elements carry `y = coef * R`, the rest `y = coef / R`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed2Spm<T> {
    pub q: T,
    pub r_squared: T,
    pub xs: Vec<T>,
    pub coefs: Vec<T>,
    pub split: usize,
}

impl<T: Scalar> Transformed2Spm<T> {
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// `x_i + x_j - y_i y_j`, exact.
    pub fn pair_value(&self, i: usize, j: usize) -> T {
        let mut prod = self.coefs[i].clone() * &self.coefs[j];
        match (i < self.split, j < self.split) {
            (true, true) => prod *= &self.r_squared,
            (false, false) => prod = prod / &self.r_squared,
            _ => {}
        }
        self.xs[i].clone() + &self.xs[j] - prod
    }

    pub fn solve(&self) -> Option<(T, (usize, usize))> {
        solve_2spm_by(self.len(), |i, j| self.pair_value(i, j))
    }

    /// Materialises `R` (approximately, via `sqrt`); exact only when `R^2`
    /// is a perfect square in the backend.
    pub fn to_instance(&self) -> KspmInstance<T> {
        let r = self.r_squared.sqrt_approx();
        let pairs = self
            .xs
            .iter()
            .zip(&self.coefs)
            .enumerate()
            .map(|(i, (x, c))| (x.clone(), if i < self.split { c.clone() * &r } else { c.clone() / &r }))
            .collect();
        KspmInstance { pairs, k: 2, t: None }
    }
}

/// Rewrites `max_{i,j} a_i + abar_j - b_i * bbar_j` as a single 2-SPM whose
/// optimum is attained only by cross pairs. Requires non-empty lists,
/// `a, abar >= 0` and `b, bbar > 0`.
pub fn transform_pairmax_to_2spm<T: Scalar>(a: &[(T, T)], abar: &[(T, T)]) -> Result<Transformed2Spm<T>> {
    if a.is_empty() || abar.is_empty() {
        return Err(Error::Input("both pair lists must be non-empty".into()));
    }
    for (x, y) in a.iter().chain(abar) {
        if *y <= T::zero() {
            return Err(Error::Input(format!("second coordinate {y} is not positive")));
        }
        if *x < T::zero() {
            return Err(Error::Input(format!("first coordinate {x} is negative")));
        }
    }
    let max_of = |it: &mut dyn Iterator<Item = T>| it.reduce(T::max_of).expect("non-empty");
    let max_b = max_of(&mut a.iter().map(|p| p.1.clone()));
    let max_bbar = max_of(&mut abar.iter().map(|p| p.1.clone()));
    let max_a = max_of(&mut a.iter().map(|p| p.0.clone()));
    let max_abar = max_of(&mut abar.iter().map(|p| p.0.clone()));
    let min_b = a.iter().map(|p| p.1.clone()).reduce(|x, y| if y < x { y } else { x }).expect("non-empty");
    let q = max_b * max_bbar + (max_a + max_abar) * T::from_int(2);
    let r_squared = T::from_int(4) * &q / (min_b.clone() * &min_b);
    let mut xs = Vec::with_capacity(a.len() + abar.len());
    let mut coefs = Vec::with_capacity(a.len() + abar.len());
    for (x, y) in a {
        xs.push(q.clone() + x);
        coefs.push(y.clone());
    }
    for (x, y) in abar {
        xs.push(x.clone() - &q);
        coefs.push(y.clone());
    }
    Ok(Transformed2Spm { q, r_squared, xs, coefs, split: a.len() })
}

/// `max_{i,j} a_i + abar_j - b_i * bbar_j` with the maximising `(i, j)`,
/// computed through the 2-SPM transform. Entries with a zero second
/// coordinate are paired directly with the best first coordinate on the
/// other side, and negative first coordinates are shifted away.
pub fn pair_max<T: Scalar>(a: &[(T, T)], abar: &[(T, T)]) -> Result<Option<(T, (usize, usize))>> {
    if a.is_empty() || abar.is_empty() {
        return Ok(None);
    }
    if let Some((_, y)) = a.iter().chain(abar).find(|(_, y)| *y < T::zero()) {
        return Err(Error::Input(format!("second coordinate {y} is negative")));
    }
    let mut best: Option<(T, (usize, usize))> = None;
    let offer = |v: T, i: usize, j: usize, best: &mut Option<(T, (usize, usize))>| {
        if best.as_ref().map_or(true, |(b, _)| improves(&v, b)) {
            *best = Some((v, (i, j)));
        }
    };
    let argmax = |l: &[(T, T)]| {
        let mut bi = 0;
        for (i, e) in l.iter().enumerate() {
            if e.0 > l[bi].0 {
                bi = i;
            }
        }
        bi
    };
    let (ia, ib) = (argmax(a), argmax(abar));
    for (i, e) in a.iter().enumerate() {
        if e.1.total_cmp(&T::zero()).is_eq() {
            offer(e.0.clone() + &abar[ib].0, i, ib, &mut best);
        }
    }
    for (j, e) in abar.iter().enumerate() {
        if e.1.total_cmp(&T::zero()).is_eq() {
            offer(a[ia].0.clone() + &e.0, ia, j, &mut best);
        }
    }
    let pos_a: Vec<usize> = (0..a.len()).filter(|&i| a[i].1 > T::zero()).collect();
    let pos_b: Vec<usize> = (0..abar.len()).filter(|&j| abar[j].1 > T::zero()).collect();
    if !pos_a.is_empty() && !pos_b.is_empty() {
        let shift = |l: &[(T, T)], idx: &[usize]| -> (T, Vec<(T, T)>) {
            let lo = idx.iter().map(|&i| l[i].0.clone()).reduce(|x, y| if y < x { y } else { x }).expect("non-empty");
            let s = if lo < T::zero() { -lo } else { T::zero() };
            (s.clone(), idx.iter().map(|&i| (l[i].0.clone() + &s, l[i].1.clone())).collect())
        };
        let (sa, la) = shift(a, &pos_a);
        let (sb, lb) = shift(abar, &pos_b);
        let tr = transform_pairmax_to_2spm(&la, &lb)?;
        let (v, (i, j)) = tr.solve().expect("at least two elements");
        if !(i < tr.split && j >= tr.split) {
            return Err(Error::Structural("2-SPM optimum is not a cross pair".into()));
        }
        offer(v - &sa - &sb, pos_a[i], pos_b[j - tr.split], &mut best);
    }
    Ok(best)
}
