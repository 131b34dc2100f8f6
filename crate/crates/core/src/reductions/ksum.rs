//! k-SUM to k-SPM with exact rational Taylor truncations of `e^{x/(kL)}`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::baselines::KspmInstance;
use crate::error::{Error, Result};
use crate::scalar::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KsumInstance {
    pub xs: Vec<i64>,
    pub k: usize,
}

impl KsumInstance {
    pub fn new(xs: Vec<i64>, k: usize) -> Result<Self> {
        if k > xs.len() {
            return Err(Error::Input(format!("k = {k} exceeds N = {}", xs.len())));
        }
        Ok(KsumInstance { xs, k })
    }

    /// `1 + max |x_i|`.
    pub fn l(&self) -> i64 {
        1 + self.xs.iter().map(|x| x.abs()).max().unwrap_or(0)
    }
}

/// Smallest integer `Q` with `2^Q >= (kL)^3`, i.e. `ceil(3 log2(kL))`.
pub fn precision_bits(k: usize, l: i64) -> u32 {
    let v = BigInt::from(k as i64 * l).pow(3);
    let mut q = 0u32;
    let mut p = BigInt::one();
    while p < v {
        p <<= 1;
        q += 1;
    }
    q
}

/// Degree used for `z`: `q`, raised by one for negative `z` when `q` is even
/// so that the truncation never overshoots `e^z`.
pub fn taylor_degree(z: &Rational, q: u32) -> u32 {
    if z.is_negative() && q % 2 == 0 {
        q + 1
    } else {
        q
    }
}

/// `sum_{i=0}^{d} z^i / i!`.
pub fn taylor_exp(z: &Rational, d: u32) -> Rational {
    let mut term = Rational::one();
    let mut sum = Rational::one();
    for i in 1..=d {
        term = term * z / Rational::from_integer(BigInt::from(i));
        sum += &term;
    }
    sum
}

/// Rational enclosure `[lo, hi]` of `e^z` for `|z| <= 1`, using the
/// truncation of degree `taylor_degree(z, q)` and the remainder bound
/// `e^{|z|} |z|^{d+1} / (d+1)! <= 3 |z|^{d+1} / (d+1)!`.
pub fn exp_enclosure(z: &Rational, q: u32) -> Result<(Rational, Rational)> {
    if z.abs() > Rational::one() {
        return Err(Error::Parameter(format!("|{z}| > 1 outside the enclosure range")));
    }
    let d = taylor_degree(z, q);
    let lo = taylor_exp(z, d);
    let mut rem = Rational::from_integer(BigInt::from(3));
    for i in 1..=d + 1 {
        rem = rem * z.abs() / Rational::from_integer(BigInt::from(i));
    }
    Ok((lo.clone(), lo + rem))
}

#[derive(Debug, Clone)]
pub struct KsumReduction {
    pub instance: KspmInstance<Rational>,
    pub l: i64,
    pub q: u32,
    /// `(2kL)^{-2}`.
    pub lambda: Rational,
    /// Certified upper bounds on `e^{x_i/(kL)}`; the instance holds the lower ends.
    pub y_upper: Vec<Rational>,
}

impl KsumReduction {
    /// Certificates carry over unchanged (same index set).
    pub fn map_certificate(&self, set: &[usize]) -> Vec<usize> {
        set.to_vec()
    }

    /// Certified upper bound on `prod y_i - prod ytilde_i` over `set`.
    pub fn precision_gap_bound(&self, set: &[usize]) -> Rational {
        let mut hi = Rational::one();
        let mut lo = Rational::one();
        for &i in set {
            hi *= &self.y_upper[i];
            lo *= &self.instance.pairs[i].1;
        }
        hi - lo
    }
}

/// `x~_i = (L + x_i)/(kL)`, `y~_i` a truncated Taylor value of
/// `e^{x_i/(kL)}` within `2^-Q` from below; threshold `t = 0`.
pub fn reduce_ksum_to_kspm(inst: &KsumInstance) -> Result<KsumReduction> {
    let k = inst.k;
    if k < 3 {
        return Err(Error::Parameter(format!("the k-SUM reduction needs k >= 3, got {k}")));
    }
    if k > inst.xs.len() {
        return Err(Error::Parameter(format!("k = {k} exceeds N = {}", inst.xs.len())));
    }
    let l = inst.l();
    let kl = BigInt::from(k as i64 * l);
    let q = precision_bits(k, l);
    let mut pairs = Vec::with_capacity(inst.xs.len());
    let mut y_upper = Vec::with_capacity(inst.xs.len());
    for &x in &inst.xs {
        let xt = Rational::new(BigInt::from(l + x), kl.clone());
        let z = Rational::new(BigInt::from(x), kl.clone());
        let (lo, hi) = exp_enclosure(&z, q)?;
        pairs.push((xt, lo));
        y_upper.push(hi);
    }
    let lambda = Rational::new(BigInt::one(), (BigInt::from(2) * &kl).pow(2));
    let instance = KspmInstance { pairs, k, t: Some(Rational::zero()) };
    Ok(KsumReduction { instance, l, q, lambda, y_upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn example_values() {
        let r = reduce_ksum_to_kspm(&KsumInstance::new(vec![-1, 0, 1], 3).unwrap()).unwrap();
        assert_eq!(r.l, 2);
        let xs: Vec<Rational> = r.instance.pairs.iter().map(|p| p.0.clone()).collect();
        assert_eq!(xs, vec![rat(1, 6), rat(1, 3), rat(1, 2)]);
        assert_eq!(r.q, 8);
    }

    #[test]
    fn bits() {
        assert_eq!(precision_bits(3, 2), 8);
        assert_eq!(precision_bits(2, 2), 6);
        assert_eq!(precision_bits(1, 1), 0);
    }

    #[test]
    fn rejects_small_k() {
        assert!(reduce_ksum_to_kspm(&KsumInstance::new(vec![1, 2], 2).unwrap()).is_err());
    }
}
