//! Homogeneous polynomials in `x, y, z` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::linear::{Elementary, Matrix3, ProjPoint};
use super::rational::{format_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// Exponent triple `(i, j, k)` of the monomial `x^i y^j z^k`.
pub type Exponent = [u32; 3];

const VARS: [char; 3] = ['x', 'y', 'z'];

/// Sparse homogeneous polynomial. Terms are keyed by exponent triple, and the
/// map's ascending lexicographic order makes the last entry the graded-lex
/// leading term (all exponents share the same total degree).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HomogPoly {
    degree: u32,
    terms: BTreeMap<Exponent, Rational>,
}

/// Scalar `s` such that every `c * s` is an integer, the integers are coprime,
/// and the first nonzero `c * s` is positive.
pub(crate) fn primitive_scale<'a>(coeffs: impl Iterator<Item = &'a Rational> + Clone) -> Rational {
    let mut lcm = BigInt::one();
    for c in coeffs.clone() {
        lcm = lcm.lcm(c.denom());
    }
    let mut g = BigInt::zero();
    let mut first_negative = None;
    for c in coeffs {
        if c.is_zero() {
            continue;
        }
        let v = (c * Rational::from_integer(lcm.clone())).to_integer();
        if first_negative.is_none() {
            first_negative = Some(v.is_negative());
        }
        g = g.gcd(&v);
    }
    if g.is_zero() {
        return Rational::one();
    }
    if first_negative == Some(true) {
        g = -g;
    }
    Rational::new(lcm, g)
}

/// Dense integer form, coefficient of `x^i y^j` at `i * (deg + 1) + j`.
struct Dense {
    deg: usize,
    c: Vec<BigInt>,
}

impl Dense {
    fn constant(c: BigInt) -> Self {
        Dense { deg: 0, c: vec![c] }
    }

    fn mul_linear(&self, l: &[BigInt; 3]) -> Self {
        let d = self.deg + 1;
        let mut c = vec![BigInt::zero(); (d + 1) * (d + 1)];
        for i in 0..=self.deg {
            for j in 0..=self.deg - i {
                let v = &self.c[i * (self.deg + 1) + j];
                if v.is_zero() {
                    continue;
                }
                c[(i + 1) * (d + 1) + j] += v * &l[0];
                c[i * (d + 1) + j + 1] += v * &l[1];
                c[i * (d + 1) + j] += v * &l[2];
            }
        }
        Dense { deg: d, c }
    }

    /// `self += k * other` for forms of equal degree.
    fn add_scaled(&mut self, other: &Dense, k: &BigInt) {
        debug_assert_eq!(self.deg, other.deg);
        if k.is_zero() {
            return;
        }
        for (a, b) in self.c.iter_mut().zip(&other.c) {
            if !b.is_zero() {
                *a += b * k;
            }
        }
    }
}

fn binomial_row(n: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k as usize] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

impl HomogPoly {
    pub fn zero(degree: u32) -> Self {
        HomogPoly {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, [0, 0, 0])
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// The coordinate form `x`, `y` or `z` for `index` 0, 1, 2.
    pub fn var(index: usize) -> Self {
        let mut e = [0; 3];
        e[index] = 1;
        Self::monomial(Rational::one(), e)
    }

    pub fn monomial(c: Rational, exp: Exponent) -> Self {
        let mut p = Self::zero(exp.iter().sum());
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    /// Linear form `c0 x + c1 y + c2 z`.
    pub fn linear(c: &[Rational; 3]) -> Self {
        Self::from_terms(
            1,
            (0..3).map(|i| {
                let mut e = [0; 3];
                e[i] = 1;
                (e, c[i].clone())
            }),
        )
        .expect("linear terms have degree one")
    }

    /// Builds a polynomial of the given degree; zero coefficients are dropped
    /// and repeated exponents are summed.
    pub fn from_terms(
        degree: u32,
        terms: impl IntoIterator<Item = (Exponent, Rational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(degree);
        for (e, c) in terms {
            if e.iter().sum::<u32>() != degree {
                return Err(Error::InvalidInput(format!(
                    "term {} has degree {} but polynomial degree is {degree}",
                    format_monomial(&e),
                    e.iter().sum::<u32>()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, Rational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &Exponent) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Graded-lex leading term.
    pub fn leading_term(&self) -> Option<(&Exponent, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Re-labels the degree of a zero polynomial; nonzero polynomials keep theirs.
    pub fn with_zero_degree(mut self, degree: u32) -> Self {
        if self.terms.is_empty() {
            self.degree = degree;
        }
        self
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_degree(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    fn check_same_degree(&self, other: &Self) -> Result<()> {
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::InvalidInput(format!(
                "cannot add forms of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.degree);
        }
        HomogPoly {
            degree: self.degree,
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.degree + other.degree);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                out.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, pt: &ProjPoint) -> Rational {
        let mut powers: [Vec<Rational>; 3] = Default::default();
        for (v, pw) in powers.iter_mut().enumerate() {
            pw.push(Rational::one());
            for k in 0..self.degree as usize {
                let next = &pw[k] * &pt[v];
                pw.push(next);
            }
        }
        self.terms.iter().fold(Rational::zero(), |acc, (e, c)| {
            acc + c
                * &powers[0][e[0] as usize]
                * &powers[1][e[1] as usize]
                * &powers[2][e[2] as usize]
        })
    }

    /// Integer-coefficient scalar multiple with coprime coefficients and a
    /// positive leading coefficient.
    pub fn primitive(&self) -> Self {
        self.scale(&primitive_scale(self.terms.values().rev()))
    }

    /// Scalar multiple with graded-lex leading coefficient one.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    pub(crate) fn apply_elementary(&self, op: &Elementary) -> Self {
        match op {
            Elementary::Swap(i, j) => HomogPoly {
                degree: self.degree,
                terms: self
                    .terms
                    .iter()
                    .map(|(e, c)| {
                        let mut e = *e;
                        e.swap(*i, *j);
                        (e, c.clone())
                    })
                    .collect(),
            },
            Elementary::Scale(i, s) => {
                let mut out = self.clone();
                for (e, c) in out.terms.iter_mut() {
                    *c *= num_traits::pow(s.clone(), e[*i] as usize);
                }
                out
            }
            Elementary::Shear {
                target,
                source,
                factor,
            } => self.shear(*target, *source, factor),
        }
    }

    /// Substitutes `x_target -> x_target + factor * x_source`.
    pub(crate) fn shear(&self, target: usize, source: usize, factor: &Rational) -> Self {
        let mut fpow = vec![Rational::one()];
        for k in 0..self.degree as usize {
            let next = &fpow[k] * factor;
            fpow.push(next);
        }
        let mut out = Self::zero(self.degree);
        for (e, c) in &self.terms {
            let n = e[target];
            let binom = binomial_row(n);
            for t in 0..=n {
                let mut ne = *e;
                ne[target] = n - t;
                ne[source] += t;
                let coeff = c * Rational::from_integer(binom[t as usize].clone()) * &fpow[t as usize];
                out.add_term(ne, coeff);
            }
        }
        out
    }

    /// `p(M x)` for an invertible matrix `M`; a linear change of coordinates.
    pub fn linear_substitute(&self, m: &Matrix3) -> Result<Self> {
        let ops = m
            .elementary_factors()
            .ok_or_else(|| Error::InvalidInput("linear substitution by a singular matrix".into()))?;
        Ok(ops.iter().fold(self.clone(), |p, op| p.apply_elementary(op)))
    }

    /// `p(M x)` for an integer matrix, in integer arithmetic throughout.
    pub(crate) fn integer_linear_substitute(&self, m: &[[BigInt; 3]; 3]) -> Self {
        let n = self.degree as usize;
        if self.is_zero() {
            return self.clone();
        }
        let (ints, scale) = self.integer_terms();
        let mut coef = vec![vec![BigInt::zero(); n + 1]; n + 1];
        for (e, c) in ints {
            coef[e[0] as usize][e[1] as usize] = c;
        }
        let mut l2_pow = vec![Dense::constant(BigInt::one())];
        for k in 0..n {
            let next = l2_pow[k].mul_linear(&m[2]);
            l2_pow.push(next);
        }
        let mut outer = Dense::constant(BigInt::zero());
        for i in (0..=n).rev() {
            let deg = n - i;
            let mut inner = Dense::constant(coef[i][deg].clone());
            for j in (0..deg).rev() {
                inner = inner.mul_linear(&m[1]);
                inner.add_scaled(&l2_pow[deg - j], &coef[i][j]);
            }
            outer = if i == n {
                inner
            } else {
                let mut o = outer.mul_linear(&m[0]);
                o.add_scaled(&inner, &BigInt::one());
                o
            };
        }
        let inv = scale.recip();
        let mut out = Self::zero(self.degree);
        for a in 0..=n {
            for b in 0..=n - a {
                let c = &outer.c[a * (n + 1) + b];
                if !c.is_zero() {
                    out.terms
                        .insert([a as u32, b as u32, (n - a - b) as u32], Rational::from_integer(c.clone()) * &inv);
                }
            }
        }
        out
    }

    /// Substitutes the standard quadratic involution `(x, y, z) -> (yz, xz, xy)`.
    pub fn substitute_standard_involution(&self) -> Self {
        HomogPoly {
            degree: 2 * self.degree,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ([e[1] + e[2], e[0] + e[2], e[0] + e[1]], c.clone()))
                .collect(),
        }
    }

    /// `p(f0, f1, f2)` for forms of a common degree.
    pub fn substitute(&self, f: [&HomogPoly; 3]) -> Result<Self> {
        let m = f[0].degree;
        if f.iter().any(|g| g.degree != m) {
            return Err(Error::InvalidInput(
                "substituted forms must share a degree".into(),
            ));
        }
        let n = self.degree;
        let mut f2_pow = vec![HomogPoly::one()];
        for k in 0..n as usize {
            let next = f2_pow[k].mul(f[2]);
            f2_pow.push(next);
        }
        // Horner in f0 over Horner in f1.
        let mut result = HomogPoly::zero(0);
        for i in (0..=n).rev() {
            let mut inner = HomogPoly::zero(0);
            for j in (0..=n - i).rev() {
                let c = self.coeff(&[i, j, n - i - j]);
                let term = f2_pow[(n - i - j) as usize].scale(&c);
                inner = if j == n - i {
                    term.with_zero_degree(m * (n - i - j))
                } else {
                    inner.mul(f[1]).add(&term.with_zero_degree(m * (n - i - j)))?
                };
            }
            let inner = inner.with_zero_degree(m * (n - i));
            result = if i == n {
                inner
            } else {
                result.mul(f[0]).add(&inner)?
            };
        }
        Ok(result.with_zero_degree(m * n))
    }

    /// Exact quotient, or `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        let (dlead, dcoef) = divisor.leading_term()?;
        if self.is_zero() {
            return Some(Self::zero(self.degree.saturating_sub(divisor.degree)));
        }
        if self.degree < divisor.degree {
            return None;
        }
        let mut rem = self.clone();
        let mut quot = Self::zero(self.degree - divisor.degree);
        while let Some((lead, coef)) = rem.leading_term() {
            if (0..3).any(|v| lead[v] < dlead[v]) {
                return None;
            }
            let qe = [lead[0] - dlead[0], lead[1] - dlead[1], lead[2] - dlead[2]];
            let qc = coef / dcoef;
            let step = divisor.mul(&Self::monomial(qc.clone(), qe));
            rem = rem.sub(&step).expect("same degree");
            quot.add_term(qe, qc);
        }
        Some(quot)
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut out = Self::zero(self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut ne = *e;
                ne[var] -= 1;
                out.add_term(ne, c * Rational::from_integer(BigInt::from(e[var])));
            }
        }
        out
    }

    /// Largest power of the variable dividing every term.
    pub fn variable_valuation(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).min().unwrap_or(0)
    }

    /// Order of vanishing at a projective point.
    pub fn multiplicity_at(&self, pt: &ProjPoint) -> Result<u32> {
        if self.is_zero() {
            return Err(Error::InvalidInput(
                "multiplicity of the zero polynomial".into(),
            ));
        }
        let chart = pt
            .iter()
            .position(|c| !c.is_zero())
            .ok_or_else(|| Error::InvalidInput("point (0:0:0) is not projective".into()))?;
        // Move the point to the coordinate vertex e_chart.
        let mut moved = self.clone();
        for r in (0..3).filter(|&r| r != chart) {
            let f = &pt[r] / &pt[chart];
            if !f.is_zero() {
                moved = moved.shear(r, chart, &f);
            }
        }
        Ok(moved
            .terms
            .keys()
            .map(|e| self.degree - e[chart])
            .min()
            .expect("nonzero polynomial"))
    }

    /// Scales every coefficient to a common integer form; returns the integer
    /// polynomial and the factor applied.
    pub fn integer_terms(&self) -> (Vec<(Exponent, BigInt)>, Rational) {
        let mut lcm = BigInt::one();
        for c in self.terms.values() {
            lcm = lcm.lcm(c.denom());
        }
        let s = Rational::from_integer(lcm);
        (
            self.terms
                .iter()
                .map(|(e, c)| (*e, (c * &s).to_integer()))
                .collect(),
            s,
        )
    }
}

fn format_monomial(e: &Exponent) -> String {
    let parts: Vec<String> = (0..3)
        .filter(|&v| e[v] > 0)
        .map(|v| {
            if e[v] == 1 {
                VARS[v].to_string()
            } else {
                format!("{}^{}", VARS[v], e[v])
            }
        })
        .collect();
    parts.join("*")
}

impl fmt::Display for HomogPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mono = format_monomial(e);
            if mono.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}

impl FromStr for HomogPoly {
    type Err = Error;

    /// Parses a sum of terms `c*x^i*y^j*z^k`; rejects non-homogeneous input.
    fn from_str(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        for (idx, ch) in compact.chars().enumerate() {
            let prev_is_operator = idx == 0
                || current.is_empty()
                || current.ends_with('^')
                || current.ends_with('*')
                || current.ends_with('/');
            if (ch == '+' || ch == '-') && !prev_is_operator {
                pieces.push((negative, std::mem::take(&mut current)));
                negative = ch == '-';
            } else if (ch == '+' || ch == '-') && current.is_empty() {
                if ch == '-' {
                    negative = !negative;
                }
            } else {
                current.push(ch);
            }
        }
        pieces.push((negative, current));

        let mut terms: Vec<(Exponent, Rational)> = Vec::new();
        for (neg, piece) in pieces {
            if piece.is_empty() {
                return Err(Error::Parse(format!("dangling sign in {text:?}")));
            }
            let mut coeff = Rational::one();
            let mut exp = [0u32; 3];
            for factor in piece.split('*') {
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in {piece:?}")));
                }
                let first = factor.chars().next().unwrap();
                if let Some(v) = VARS.iter().position(|&c| c == first) {
                    let power = match &factor[1..] {
                        "" => 1,
                        rest => rest
                            .strip_prefix('^')
                            .and_then(|p| p.parse::<u32>().ok())
                            .ok_or_else(|| Error::Parse(format!("bad power {factor:?}")))?,
                    };
                    exp[v] += power;
                } else {
                    coeff *= parse_rational(factor)?;
                }
            }
            if neg {
                coeff = -coeff;
            }
            terms.push((exp, coeff));
        }
        let degree = terms[0].0.iter().sum::<u32>();
        if let Some((e, _)) = terms.iter().find(|(e, _)| e.iter().sum::<u32>() != degree) {
            return Err(Error::Parse(format!(
                "non-homogeneous polynomial: term {} has degree {} but {degree} expected",
                format_monomial(e),
                e.iter().sum::<u32>()
            )));
        }
        HomogPoly::from_terms(degree, terms)
    }
}
