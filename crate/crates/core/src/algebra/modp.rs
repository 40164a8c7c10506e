//! Small-prime field arithmetic and rational reconstruction, used by the
//! base-point search.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Fp {
    pub p: u64,
}

impl Fp {
    /// Products are formed in `u64`, so the modulus must stay below `2^32`.
    pub fn new(p: u64) -> Self {
        assert!(p < 1 << 32);
        Fp { p }
    }

    pub fn reduce(&self, x: &BigInt) -> u64 {
        let r = x.mod_floor(&BigInt::from(self.p));
        r.try_into().expect("residue fits in u64")
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.p
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        (a + self.p - b) % self.p
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(!a.is_multiple_of(self.p));
        self.pow(a, self.p - 2)
    }

    fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    /// Monic gcd of two polynomials given by ascending coefficients.
    pub fn poly_gcd(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        Self::trim(&mut a);
        Self::trim(&mut b);
        while !b.is_empty() {
            let r = self.poly_rem(&a, &b);
            a = b;
            b = r;
        }
        if let Some(&lc) = a.last() {
            let inv = self.inv(lc);
            for c in &mut a {
                *c = self.mul(*c, inv);
            }
        }
        a
    }

    fn poly_rem(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let inv = self.inv(b[db]);
        while r.len() > db {
            let lead = self.mul(*r.last().unwrap(), inv);
            let shift = r.len() - 1 - db;
            for (i, &c) in b.iter().enumerate() {
                r[shift + i] = self.sub(r[shift + i], self.mul(lead, c));
            }
            r.pop();
            Self::trim(&mut r);
        }
        r
    }

    pub fn poly_eval(&self, a: &[u64], x: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// All roots in `F_p` of a nonzero polynomial, by exhaustive search.
    pub fn roots(&self, a: &[u64]) -> Vec<u64> {
        if a.len() <= 1 {
            return Vec::new();
        }
        (0..self.p).filter(|&x| self.poly_eval(a, x) == 0).collect()
    }
}

/// Finds `r/s` with `r ≡ s·a (mod m)` and `|r|, s ≤ sqrt(m/2)`.
pub(crate) fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<Rational> {
    let bound = (m >> 1u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let s2 = &s0 - &q * &s1;
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if s1.is_zero() || s1.abs() > bound {
        return None;
    }
    let q = Rational::new(r1, s1);
    (q.denom().gcd(m).is_one()).then_some(q)
}

/// Inverse of `a` modulo `m`, when it exists.
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn field_basics() {
        let f = Fp::new(7919);
        assert_eq!(f.mul(f.inv(1234), 1234), 1);
        assert_eq!(f.reduce(&BigInt::from(-1)), 7918);
        // (x-2)(x-5) and (x-5)(x+1)
        let a = [10, 7919 - 7, 1];
        let b = [7919 - 5, 7919 - 4, 1];
        assert_eq!(f.poly_gcd(&a, &b), vec![7919 - 5, 1]);
        assert_eq!(f.roots(&a), vec![2, 5]);
    }

    #[test]
    fn reconstruction_round_trips() {
        let m = BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64);
        for q in [rat(3, 7), rat(-22, 5), rat(0, 1), rat(12345, 678)] {
            let a = (q.numer() * mod_inverse(q.denom(), &m).unwrap()).mod_floor(&m);
            assert_eq!(rational_reconstruct(&a, &m), Some(q));
        }
    }
}
