//! Exact Sturm chains over the integers.
//!
//! Every finite `f64` is a dyadic rational `m·2^e`, so a coefficient vector
//! scales to an integer polynomial with the same roots and signs. The chain
//! is a primitive pseudo-remainder sequence with positive multipliers, which
//! keeps each member a positive multiple of the classical Sturm remainder.
//! Evaluation at an `f64` point is likewise exact.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{RootError, UniPoly};

#[derive(Clone, Debug)]
pub struct SturmChain {
    /// Ascending integer coefficients, leading coefficient nonzero.
    chain: Vec<Vec<BigInt>>,
}

/// `x = m · 2^e` exactly.
fn dyadic(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let negative = bits >> 63 == 1;
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut m, mut e) = if biased == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), biased - 1075)
    };
    let tz = m.trailing_zeros();
    m >>= tz;
    e += tz as i64;
    let m = BigInt::from(m);
    (if negative { -m } else { m }, e)
}

fn integer_coeffs(c: &[f64]) -> Vec<BigInt> {
    let parts: Vec<_> = c.iter().map(|&x| dyadic(x)).collect();
    let min_e = parts
        .iter()
        .filter(|(m, _)| !m.is_zero())
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    parts
        .into_iter()
        .map(|(m, e)| m << ((e - min_e) as usize))
        .collect()
}

fn trim(v: &mut Vec<BigInt>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    if !g.is_zero() && g != BigInt::from(1) {
        v.iter_mut().for_each(|c| *c = &*c / &g);
    }
    v
}

fn derivative(v: &[BigInt]) -> Vec<BigInt> {
    v.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigInt::from(k))
        .collect()
}

/// Positive multiple of `a mod b`.
fn pseudo_remainder(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = &b[db];
    let lb_abs = lb.abs();
    let lb_neg = lb.is_negative();
    let mut r = a.to_vec();
    trim(&mut r);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let la = r.last().unwrap().clone();
        let la = if lb_neg { -la } else { la };
        for c in r.iter_mut() {
            *c *= &lb_abs;
        }
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &la * bj;
        }
        trim(&mut r);
    }
    r
}

fn sign_at(c: &[BigInt], t: f64) -> Sign {
    let d = c.len() - 1;
    let (m, e) = dyadic(t);
    if m.is_zero() {
        return c[0].sign();
    }
    if e >= 0 {
        let t = m << (e as usize);
        let v = c.iter().rev().fold(BigInt::zero(), |acc, ck| acc * &t + ck);
        return v.sign();
    }
    // 2^(s·d) · p(m / 2^s), a positive multiple of p(t)
    let s = (-e) as usize;
    let mut acc = c[d].clone();
    for k in (0..d).rev() {
        acc = acc * &m + (&c[k] << (s * (d - k)));
    }
    acc.sign()
}

impl SturmChain {
    pub fn new(q: &UniPoly) -> Result<Self, RootError> {
        let mut p0 = integer_coeffs(q.coeffs());
        trim(&mut p0);
        if p0.is_empty() {
            return Err(RootError::ZeroPolynomial);
        }
        let p0 = primitive(p0);
        let mut chain = vec![p0];
        let mut d = derivative(&chain[0]);
        trim(&mut d);
        if !d.is_empty() {
            chain.push(primitive(d));
        }
        while chain.len() >= 2 {
            let b = &chain[chain.len() - 1];
            if b.len() == 1 {
                break;
            }
            let r = pseudo_remainder(&chain[chain.len() - 2], b);
            if r.is_empty() {
                break;
            }
            chain.push(primitive(r.into_iter().map(|c| -c).collect()));
        }
        Ok(SturmChain { chain })
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// Exact sign of the polynomial itself at `t`: -1, 0 or 1.
    pub fn sign(&self, t: f64) -> i8 {
        match sign_at(&self.chain[0], t) {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub(crate) fn leading_is_zero(&self, t: f64) -> bool {
        self.sign(t) == 0
    }

    /// Sign variations along the chain at `t`, zeros skipped.
    pub fn variations(&self, t: f64) -> usize {
        let mut count = 0;
        let mut last = Sign::NoSign;
        for c in &self.chain {
            let s = sign_at(c, t);
            if s == Sign::NoSign {
                continue;
            }
            if last != Sign::NoSign && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_roundtrip() {
        for x in [1.0, -0.75, 0.1, 3e-310, 1e300, -5.0] {
            let (m, e) = dyadic(x);
            let back = m.to_string().parse::<f64>().unwrap() * 2f64.powi(e as i32);
            if x.abs() > 1e-300 && x.abs() < 1e300 {
                assert_eq!(back, x);
            }
            assert!(m.is_odd() || m.is_zero());
        }
    }

    #[test]
    fn exact_signs_near_a_root() {
        // τ² - 2 changes sign between consecutive floats around √2
        let q = UniPoly::new(vec![-2.0, 0.0, 1.0]);
        let chain = SturmChain::new(&q).unwrap();
        let r = 2f64.sqrt();
        let below = f64::from_bits(r.to_bits() - 1);
        let above = f64::from_bits(r.to_bits() + 1);
        assert_ne!(chain.sign(below), chain.sign(above));
        assert_eq!(chain.variations(0.0) - chain.variations(10.0), 1);
    }

    #[test]
    fn double_root_chain_ends_in_gcd() {
        // (τ-1)²(τ-3): gcd with its derivative is τ-1
        let q = UniPoly::new(vec![-3.0, 7.0, -5.0, 1.0]);
        let chain = SturmChain::new(&q).unwrap();
        assert_eq!(chain.chain.last().unwrap().len(), 2);
        assert_eq!(chain.variations(0.0) - chain.variations(4.0), 2);
    }
}
