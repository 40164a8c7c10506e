//! Rational base points of a map. Candidates are found by exhaustive search
//! over `P^2(F_p)`, lifted p-adically with Newton's method on two derivatives
//! of order `m - 1`, recovered by rational reconstruction and then verified
//! exactly.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::RationalMap;
use crate::algebra::modp::{mod_inverse, rational_reconstruct, Fp};
use crate::algebra::{normalize_point, same_point, ProjPoint, Rational};
use crate::error::{Error, Result};

const PRIMES: [u64; 3] = [7919, 7907, 7901];
/// Auxiliary prime for the cheap check before exact verification.
const CHECK_PRIME: u64 = (1 << 61) - 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasePoint {
    /// Primitive integer coordinates, first nonzero entry positive.
    pub point: ProjPoint,
    pub multiplicity: u32,
}

/// Integer polynomial in the two affine coordinates of a chart.
#[derive(Clone, Debug)]
struct BiPoly {
    terms: Vec<(u32, u32, BigInt)>,
}

impl BiPoly {
    fn derivative(&self, var: usize) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .filter_map(|(i, j, c)| match var {
                    0 if *i > 0 => Some((i - 1, *j, c * BigInt::from(*i))),
                    1 if *j > 0 => Some((*i, j - 1, c * BigInt::from(*j))),
                    _ => None,
                })
                .collect(),
        }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn max_exp(&self) -> usize {
        self.terms.iter().map(|(i, j, _)| (*i).max(*j) as usize).max().unwrap_or(0)
    }

    fn eval_mod(&self, x: &BigInt, y: &BigInt, m: &BigInt) -> BigInt {
        let d = self.max_exp();
        let xp = powers_mod(x, d, m);
        let yp = powers_mod(y, d, m);
        let mut acc = BigInt::zero();
        for (i, j, c) in &self.terms {
            acc += c * (&xp[*i as usize] * &yp[*j as usize] % m);
        }
        acc.mod_floor(m)
    }

    fn eval_fp(&self, f: &Fp, x: u64, y: u64) -> u64 {
        let d = self.max_exp();
        let xp: Vec<u64> = std::iter::successors(Some(1), |v| Some(f.mul(*v, x))).take(d + 1).collect();
        let yp: Vec<u64> = std::iter::successors(Some(1), |v| Some(f.mul(*v, y))).take(d + 1).collect();
        self.terms.iter().fold(0, |acc, (i, j, c)| {
            let t = f.mul(f.reduce(c), f.mul(xp[*i as usize], yp[*j as usize]));
            f.add(acc, t)
        })
    }

    /// Lowest total degree of `self(s + a, t + b)` over `F_p`.
    fn order_fp(&self, f: &Fp, a: u64, b: u64, binom: &[Vec<u64>]) -> Option<u32> {
        let d = self.max_exp();
        let mut g = vec![vec![0u64; d + 1]; d + 1];
        let ap: Vec<u64> = (0..=d).map(|k| f.pow(a, k as u64)).collect();
        let bp: Vec<u64> = (0..=d).map(|k| f.pow(b, k as u64)).collect();
        for (i, j, c) in &self.terms {
            let (i, j) = (*i as usize, *j as usize);
            let c = f.reduce(c);
            if c == 0 {
                continue;
            }
            for k in 0..=i {
                let ck = f.mul(c, f.mul(binom[i][k], ap[i - k]));
                for l in 0..=j {
                    let v = f.mul(ck, f.mul(binom[j][l], bp[j - l]));
                    g[k][l] = f.add(g[k][l], v);
                }
            }
        }
        (0..=2 * d as u32).find(|&s| {
            (0..=s as usize).any(|k| {
                let l = s as usize - k;
                k <= d && l <= d && g[k][l] != 0
            })
        })
    }
}

fn powers_mod(x: &BigInt, d: usize, m: &BigInt) -> Vec<BigInt> {
    let mut v = vec![BigInt::one() % m];
    for k in 0..d {
        let next = &v[k] * x % m;
        v.push(next);
    }
    v
}

/// Affine chart where coordinate `chart` is one; the other two coordinates
/// in increasing index order are the affine variables.
fn chart_vars(chart: usize) -> (usize, usize) {
    match chart {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

struct Setup {
    degree: u32,
    /// Primitive integer coefficients of each component, keyed by exponent.
    ints: Vec<Vec<([u32; 3], BigInt)>>,
    max_bits: u64,
}

impl Setup {
    fn new(m: &RationalMap) -> Self {
        let ints: Vec<Vec<([u32; 3], BigInt)>> = m
            .polys()
            .iter()
            .map(|p| p.primitive().integer_terms().0)
            .collect();
        let max_bits = ints
            .iter()
            .flatten()
            .map(|(_, c)| c.bits())
            .max()
            .unwrap_or(1);
        Setup {
            degree: m.degree(),
            ints,
            max_bits,
        }
    }

    fn chart_polys(&self, chart: usize) -> Vec<BiPoly> {
        let (u, v) = chart_vars(chart);
        self.ints
            .iter()
            .filter(|t| !t.is_empty())
            .map(|t| BiPoly {
                terms: t.iter().map(|(e, c)| (e[u], e[v], c.clone())).collect(),
            })
            .collect()
    }
}

#[derive(Default)]
struct Attempt {
    points: Vec<BasePoint>,
    /// A candidate with a regular system of derivatives that would not lift
    /// to a rational point.
    irrational: bool,
    bad_prime: bool,
}

/// Base points with multiplicities, ordered by decreasing multiplicity and
/// then by coordinates. Succeeds only when the points found satisfy both
/// homaloidal identities.
pub fn base_points(m: &RationalMap) -> Result<Vec<BasePoint>> {
    let setup = Setup::new(m);
    let n = i64::from(setup.degree);
    let mut all_irrational = true;
    let mut best: Option<(BigInt, BigInt)> = None;
    for p in PRIMES {
        let attempt = attempt_prime(&setup, Fp::new(p));
        let sq: i64 = attempt
            .points
            .iter()
            .map(|b| i64::from(b.multiplicity).pow(2))
            .sum();
        let lin: i64 = attempt.points.iter().map(|b| i64::from(b.multiplicity)).sum();
        let residuals = (BigInt::from(n * n - 1 - sq), BigInt::from(3 * n - 3 - lin));
        if residuals.0.is_zero() && residuals.1.is_zero() {
            let mut pts = attempt.points;
            pts.sort_by(|a, b| {
                b.multiplicity
                    .cmp(&a.multiplicity)
                    .then_with(|| a.point.cmp(&b.point))
            });
            return Ok(pts);
        }
        all_irrational &= attempt.irrational && !attempt.bad_prime;
        if !attempt.bad_prime {
            best.get_or_insert(residuals);
        }
    }
    if all_irrational {
        return Err(Error::NonRationalBasePoint(
            "a common zero of the components does not lift to a rational point".into(),
        ));
    }
    let (square_residual, linear_residual) =
        best.unwrap_or_else(|| (BigInt::from(n * n - 1), BigInt::from(3 * n - 3)));
    Err(Error::InfinitelyNearOrIrrational {
        square_residual,
        linear_residual,
    })
}

fn attempt_prime(setup: &Setup, f: Fp) -> Attempt {
    let mut out = Attempt::default();
    let candidates = match search_fp(setup, &f) {
        Some(c) => c,
        None => {
            out.bad_prime = true;
            return out;
        }
    };
    let n = setup.degree as usize;
    let mut binom = vec![vec![1u64]];
    for i in 1..=n {
        let prev = &binom[i - 1];
        let row: Vec<u64> = (0..=i)
            .map(|k| {
                let a = if k > 0 { prev[k - 1] } else { 0 };
                let b = if k < i { prev[k] } else { 0 };
                f.add(a, b)
            })
            .collect();
        binom.push(row);
    }
    for cand in candidates {
        let chart = (0..3).rev().find(|&i| cand[i] != 0).expect("projective point");
        let (u, v) = chart_vars(chart);
        let inv = f.inv(cand[chart]);
        let (a, b) = (f.mul(cand[u], inv), f.mul(cand[v], inv));
        let polys = setup.chart_polys(chart);
        let Some(mp) = polys.iter().filter_map(|g| g.order_fp(&f, a, b, &binom)).min() else {
            continue;
        };
        match lift_candidate(setup, &f, &polys, chart, (a, b), mp) {
            Lift::Found(bp) => {
                if !out.points.iter().any(|q| same_point(&q.point, &bp.point)) {
                    out.points.push(bp);
                }
            }
            Lift::Irrational => out.irrational = true,
            Lift::Degenerate => {}
        }
    }
    out
}

/// Common zeros of the reduced components in `P^2(F_p)`, or `None` when the
/// reduction acquires a common component.
fn search_fp(setup: &Setup, f: &Fp) -> Option<Vec<[u64; 3]>> {
    let n = setup.degree as usize;
    // table[i][x-exponent][y-exponent]
    let tables: Vec<Vec<Vec<u64>>> = setup
        .ints
        .iter()
        .map(|terms| {
            let mut t = vec![vec![0u64; n + 1]; n + 1];
            for (e, c) in terms {
                t[e[0] as usize][e[1] as usize] = f.reduce(c);
            }
            t
        })
        .collect();
    let mut found = Vec::new();
    let common = |univariates: Vec<Vec<u64>>| -> Option<Vec<u64>> {
        let mut g: Vec<u64> = Vec::new();
        for u in univariates {
            g = f.poly_gcd(&g, &u);
        }
        (!g.is_empty()).then_some(g)
    };
    // z = 1
    // Products are below p^2 < 2^26, so a column sum fits in a u64 without
    // intermediate reduction.
    debug_assert!(f.p < 1 << 20);
    let mut xp = vec![0u64; n + 1];
    for x0 in 0..f.p {
        xp[0] = 1;
        for k in 1..=n {
            xp[k] = xp[k - 1] * x0 % f.p;
        }
        let unis: Vec<Vec<u64>> = tables
            .iter()
            .map(|t| {
                (0..=n)
                    .map(|j| (0..=n - j).map(|i| t[i][j] * xp[i]).sum::<u64>() % f.p)
                    .collect()
            })
            .collect();
        let g = common(unis)?;
        for y0 in f.roots(&g) {
            found.push([x0, y0, 1]);
        }
    }
    // z = 0, y = 1
    let unis: Vec<Vec<u64>> = tables
        .iter()
        .map(|t| (0..=n).map(|i| t[i][n - i]).collect())
        .collect();
    let g = common(unis)?;
    for x0 in f.roots(&g) {
        found.push([x0, 1, 0]);
    }
    if tables.iter().all(|t| t[n][0] == 0) {
        found.push([1, 0, 0]);
    }
    Some(found)
}

enum Lift {
    Found(BasePoint),
    Irrational,
    Degenerate,
}

fn lift_candidate(
    setup: &Setup,
    f: &Fp,
    polys: &[BiPoly],
    chart: usize,
    start: (u64, u64),
    mp: u32,
) -> Lift {
    let mut regular = false;
    for m in (1..=mp).rev() {
        let mut derivs: Vec<BiPoly> = Vec::new();
        for g in polys {
            for k in 0..m {
                let mut d = g.clone();
                for _ in 0..k {
                    d = d.derivative(0);
                }
                for _ in 0..(m - 1 - k) {
                    d = d.derivative(1);
                }
                if !d.is_zero() {
                    derivs.push(d);
                }
            }
        }
        let grads: Vec<[u64; 2]> = derivs
            .iter()
            .map(|d| {
                [
                    d.derivative(0).eval_fp(f, start.0, start.1),
                    d.derivative(1).eval_fp(f, start.0, start.1),
                ]
            })
            .collect();
        let pair = (0..derivs.len())
            .flat_map(|i| (i + 1..derivs.len()).map(move |j| (i, j)))
            .find(|&(i, j)| {
                f.sub(f.mul(grads[i][0], grads[j][1]), f.mul(grads[i][1], grads[j][0])) != 0
            });
        let Some((i, j)) = pair else { continue };
        regular = true;
        if let Some(bp) = newton(setup, f, &derivs[i], &derivs[j], chart, start) {
            return Lift::Found(bp);
        }
    }
    if regular {
        Lift::Irrational
    } else {
        Lift::Degenerate
    }
}

fn newton(
    setup: &Setup,
    f: &Fp,
    g: &BiPoly,
    h: &BiPoly,
    chart: usize,
    start: (u64, u64),
) -> Option<BasePoint> {
    let n = u64::from(setup.degree);
    let cap_bits = 4 * n * (setup.max_bits + 4 * n + 16) + 512;
    let jac = [g.derivative(0), g.derivative(1), h.derivative(0), h.derivative(1)];
    let mut modulus = BigInt::from(f.p);
    let mut x = BigInt::from(start.0);
    let mut y = BigInt::from(start.1);
    let check = BigInt::from(CHECK_PRIME);
    while modulus.bits() < cap_bits {
        modulus = &modulus * &modulus;
        let gv = g.eval_mod(&x, &y, &modulus);
        let hv = h.eval_mod(&x, &y, &modulus);
        let [gx, gy, hx, hy] = jac.each_ref().map(|d| d.eval_mod(&x, &y, &modulus));
        let det = (&gx * &hy - &gy * &hx).mod_floor(&modulus);
        let dinv = mod_inverse(&det, &modulus)?;
        let dx = (&hy * &gv - &gy * &hv) * &dinv;
        let dy = (&gx * &hv - &hx * &gv) * &dinv;
        x = (&x - dx).mod_floor(&modulus);
        y = (&y - dy).mod_floor(&modulus);
        if modulus.bits() < 64 {
            continue;
        }
        let (Some(rx), Some(ry)) = (
            rational_reconstruct(&x, &modulus),
            rational_reconstruct(&y, &modulus),
        ) else {
            continue;
        };
        if !passes_cheap_check(g, h, &rx, &ry, &check) {
            continue;
        }
        let (u, v) = chart_vars(chart);
        let mut pt: ProjPoint = [Rational::zero(), Rational::zero(), Rational::zero()];
        pt[chart] = Rational::one();
        pt[u] = rx;
        pt[v] = ry;
        let pt = normalize_point(&pt).expect("nonzero");
        if let Some(nu) = exact_multiplicity(setup, &pt) {
            return Some(BasePoint {
                point: pt,
                multiplicity: nu,
            });
        }
    }
    None
}

fn passes_cheap_check(g: &BiPoly, h: &BiPoly, x: &Rational, y: &Rational, q: &BigInt) -> bool {
    let to_mod = |r: &Rational| -> Option<BigInt> {
        mod_inverse(r.denom(), q).map(|d| (r.numer() * d).mod_floor(q))
    };
    match (to_mod(x), to_mod(y)) {
        (Some(xm), Some(ym)) => g.eval_mod(&xm, &ym, q).is_zero() && h.eval_mod(&xm, &ym, q).is_zero(),
        _ => true,
    }
}

/// Multiplicity of the system at the point: the least order of vanishing
/// among the three components. `None` when the point is not a base point.
fn exact_multiplicity(setup: &Setup, pt: &ProjPoint) -> Option<u32> {
    let mut nu = u32::MAX;
    for terms in &setup.ints {
        if terms.is_empty() {
            continue;
        }
        let order = order_at(terms, setup.degree, pt);
        nu = nu.min(order);
        if nu == 0 {
            return None;
        }
    }
    Some(nu)
}

/// Order of vanishing of an integer form at a primitive integer point, by
/// testing homogeneous partial derivatives of increasing order.
fn order_at(terms: &[([u32; 3], BigInt)], degree: u32, pt: &ProjPoint) -> u32 {
    let coords: Vec<BigInt> = pt.iter().map(|c| c.to_integer()).collect();
    let pows: Vec<Vec<BigInt>> = coords
        .iter()
        .map(|c| {
            let mut v = vec![BigInt::one()];
            for k in 0..degree as usize {
                let next = &v[k] * c;
                v.push(next);
            }
            v
        })
        .collect();
    // The order is the least s such that some s-th partial is nonzero at the
    // point. Work with partial derivatives in the chart variables only; on
    // forms, derivatives in two variables suffice by Euler's relation.
    let chart = (0..3).find(|&i| !coords[i].is_zero()).expect("nonzero point");
    let (u, v) = chart_vars(chart);
    for s in 0..=degree {
        for k in 0..=s {
            let l = s - k;
            let mut acc = BigInt::zero();
            for (e, c) in terms {
                if e[u] < k || e[v] < l {
                    continue;
                }
                let mut coef = c.clone();
                for t in 0..k {
                    coef *= e[u] - t;
                }
                for t in 0..l {
                    coef *= e[v] - t;
                }
                let mut ne = *e;
                ne[u] -= k;
                ne[v] -= l;
                acc += coef * &pows[0][ne[0] as usize] * &pows[1][ne[1] as usize] * &pows[2][ne[2] as usize];
            }
            if !acc.is_zero() {
                return s;
            }
        }
    }
    degree
}
