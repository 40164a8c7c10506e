//! Dense univariate polynomials over a gcd domain, with subresultant
//! remainder sequences for gcd and resultant.
//!
//! Nesting `UPoly<UPoly<BigInt>>` gives the recursive bivariate representation
//! used by the homogeneous gcd.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Coefficient ring interface: an integral domain with exact division and gcd.
pub trait GcdDomain: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / other` when the division is exact.
    fn exact_div(&self, other: &Self) -> Option<Self>;
    /// Greatest common divisor with nonnegative normalization.
    fn gcd(&self, other: &Self) -> Self;
    /// True when the normalized leading sign is negative.
    fn is_negative(&self) -> bool;

    fn pow(&self, exp: usize) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl GcdDomain for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, other: &Self) -> Option<Self> {
        if Zero::is_zero(other) {
            return None;
        }
        let (q, r) = self.div_rem(other);
        Zero::is_zero(&r).then_some(q)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UPoly<R> {
    /// Coefficients from the constant term upward; no trailing zeros.
    coeffs: Vec<R>,
}

impl<R: GcdDomain> UPoly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lc(&self) -> R {
        self.coeffs.last().cloned().unwrap_or_else(R::zero)
    }

    pub fn coeff(&self, i: usize) -> R {
        self.coeffs.get(i).cloned().unwrap_or_else(R::zero)
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn div_scalar_exact(&self, c: &R) -> Option<Self> {
        self.coeffs
            .iter()
            .map(|a| a.exact_div(c))
            .collect::<Option<Vec<_>>>()
            .map(Self::new)
    }

    pub fn eval(&self, at: &R) -> R {
        self.coeffs
            .iter()
            .rev()
            .fold(R::zero(), |acc, c| acc.mul(at).add(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| {
                    let mut acc = R::zero();
                    for _ in 0..i {
                        acc = acc.add(c);
                    }
                    acc
                })
                .collect(),
        )
    }

    /// Content: gcd of all coefficients.
    pub fn content(&self) -> R {
        let mut g = R::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g == R::one() {
                break;
            }
        }
        g
    }

    /// Primitive part with a positive leading sign.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.lc().is_negative() {
            c = c.neg();
        }
        self.div_scalar_exact(&c)
            .expect("content divides every coefficient")
    }

    /// `lc(d)^(deg self - deg d + 1) * self mod d`.
    pub fn pseudo_rem(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("pseudo-division by zero polynomial");
        let Some(mut deg) = self.degree() else {
            return self.clone();
        };
        if deg < dd {
            return self.clone();
        }
        let lc = divisor.lc();
        let mut rem = self.coeffs.clone();
        let mut steps = deg - dd + 1;
        loop {
            let lead = rem[deg].clone();
            for c in rem.iter_mut() {
                *c = c.mul(&lc);
            }
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                let idx = deg - dd + i;
                rem[idx] = rem[idx].sub(&lead.mul(dc));
            }
            steps -= 1;
            rem.truncate(deg);
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
            match rem.len().checked_sub(1) {
                Some(d) if d >= dd => deg = d,
                _ => break,
            }
        }
        let mut out = Self::new(rem);
        if steps > 0 {
            out = out.scale(&lc.pow(steps));
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` if it does not exist.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree()?;
        let Some(deg) = self.degree() else {
            return Some(self.clone());
        };
        if deg < dd {
            return None;
        }
        let lc = divisor.lc();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![R::zero(); deg - dd + 1];
        for k in (0..=deg - dd).rev() {
            let lead = rem[k + dd].clone();
            if lead.is_zero() {
                continue;
            }
            let q = lead.exact_div(&lc)?;
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = rem[k + i].sub(&q.mul(dc));
            }
            quot[k] = q;
        }
        rem.iter().all(|c| c.is_zero()).then(|| Self::new(quot))
    }

    /// Greatest common divisor via the subresultant remainder sequence.
    pub fn gcd(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.primitive_part().scale(&other.content());
        }
        if other.is_zero() {
            return self.primitive_part().scale(&self.content());
        }
        let c = self.content().gcd(&other.content());
        let (mut f, mut g) = (self.primitive_part(), other.primitive_part());
        if f.degree() < g.degree() {
            std::mem::swap(&mut f, &mut g);
        }
        let mut g_lead = R::one();
        let mut h = R::one();
        loop {
            let d = f.degree().unwrap() - g.degree().unwrap();
            let r = f.pseudo_rem(&g);
            if r.is_zero() {
                break;
            }
            if r.degree() == Some(0) {
                return Self::constant(c);
            }
            let divisor = g_lead.mul(&h.pow(d));
            f = g;
            g = r
                .div_scalar_exact(&divisor)
                .expect("subresultant division is exact");
            g_lead = f.lc();
            h = match d {
                0 => h,
                1 => g_lead.clone(),
                _ => g_lead
                    .pow(d)
                    .exact_div(&h.pow(d - 1))
                    .expect("subresultant h update is exact"),
            };
        }
        g.primitive_part().scale(&c)
    }

    /// Resultant with respect to the polynomial variable.
    pub fn resultant(&self, other: &Self) -> R {
        let (Some(da), Some(db)) = (self.degree(), other.degree()) else {
            return R::zero();
        };
        let (mut a, mut b) = (self.clone(), other.clone());
        let mut negate = false;
        if da < db {
            std::mem::swap(&mut a, &mut b);
            negate = da % 2 == 1 && db % 2 == 1;
        }
        if b.degree() == Some(0) {
            let r = b.lc().pow(a.degree().unwrap());
            return if negate { r.neg() } else { r };
        }
        let ca = a.content();
        let cb = b.content();
        let t = ca
            .pow(b.degree().unwrap())
            .mul(&cb.pow(a.degree().unwrap()));
        a = a.div_scalar_exact(&ca).unwrap();
        b = b.div_scalar_exact(&cb).unwrap();
        let mut g = R::one();
        let mut h = R::one();
        loop {
            let (dega, degb) = (a.degree().unwrap(), b.degree().unwrap());
            let delta = dega - degb;
            if dega % 2 == 1 && degb % 2 == 1 {
                negate = !negate;
            }
            let r = a.pseudo_rem(&b);
            a = b;
            b = r
                .div_scalar_exact(&g.mul(&h.pow(delta)))
                .expect("subresultant division is exact");
            g = a.lc();
            h = match delta {
                0 => h,
                1 => g.clone(),
                _ => g
                    .pow(delta)
                    .exact_div(&h.pow(delta - 1))
                    .expect("subresultant h update is exact"),
            };
            match b.degree() {
                None => return R::zero(),
                Some(0) => break,
                Some(_) => {}
            }
        }
        let dega = a.degree().unwrap();
        let last = if dega == 0 {
            h
        } else {
            b.lc()
                .pow(dega)
                .exact_div(&h.pow(dega - 1))
                .expect("final subresultant step is exact")
        };
        let r = t.mul(&last);
        if negate {
            r.neg()
        } else {
            r
        }
    }

    pub fn mul_poly(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(Vec::new());
        }
        let mut out = vec![R::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn add_poly(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect())
    }

    pub fn sub_poly(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect())
    }
}

impl<R: GcdDomain> GcdDomain for UPoly<R> {
    fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }
    fn one() -> Self {
        UPoly::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        self.add_poly(other)
    }
    fn sub(&self, other: &Self) -> Self {
        self.sub_poly(other)
    }
    fn mul(&self, other: &Self) -> Self {
        self.mul_poly(other)
    }
    fn neg(&self) -> Self {
        UPoly::new(self.coeffs.iter().map(R::neg).collect())
    }
    fn exact_div(&self, other: &Self) -> Option<Self> {
        self.div_exact(other)
    }
    fn gcd(&self, other: &Self) -> Self {
        UPoly::gcd(self, other)
    }
    fn is_negative(&self) -> bool {
        self.lc().is_negative()
    }
}

pub type ZPoly = UPoly<BigInt>;
