//! Greatest common divisors of homogeneous polynomials.
//!
//! Forms are dehomogenized at `z = 1` into `Z[x][y]`, the gcd is taken with a
//! subresultant remainder sequence over `Z[x]`, and the result is
//! rehomogenized. Powers of `z` are split off beforehand since
//! dehomogenization cannot see them.

use num_bigint::BigInt;
use num_traits::One;

use super::homog::{Exponent, HomogPoly};
use super::rational::Rational;
use super::upoly::UPoly;
use crate::error::{Error, Result};

type Bivariate = UPoly<UPoly<BigInt>>;

fn dehomogenize(p: &HomogPoly) -> Bivariate {
    let (ints, _) = p.integer_terms();
    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for ([i, j, _], c) in ints {
        let (i, j) = (i as usize, j as usize);
        if rows.len() <= j {
            rows.resize(j + 1, Vec::new());
        }
        if rows[j].len() <= i {
            rows[j].resize(i + 1, <BigInt as num_traits::Zero>::zero());
        }
        rows[j][i] = c;
    }
    UPoly::new(rows.into_iter().map(UPoly::new).collect())
}

fn rehomogenize(g: &Bivariate, z_power: u32) -> HomogPoly {
    let total = g
        .coeffs()
        .iter()
        .enumerate()
        .filter_map(|(j, row)| row.degree().map(|d| d + j))
        .max()
        .unwrap_or(0) as u32;
    let mut terms: Vec<(Exponent, Rational)> = Vec::new();
    for (j, row) in g.coeffs().iter().enumerate() {
        for (i, c) in row.coeffs().iter().enumerate() {
            if !num_traits::Zero::is_zero(c) {
                let (i, j) = (i as u32, j as u32);
                terms.push(([i, j, total - i - j + z_power], Rational::from_integer(c.clone())));
            }
        }
    }
    HomogPoly::from_terms(total + z_power, terms).expect("rehomogenized terms share a degree")
}

fn strip_z(p: &HomogPoly) -> (HomogPoly, u32) {
    let v = p.variable_valuation(2);
    if v == 0 {
        return (p.clone(), 0);
    }
    let stripped = HomogPoly::from_terms(
        p.degree() - v,
        p.terms()
            .iter()
            .map(|(e, c)| ([e[0], e[1], e[2] - v], c.clone())),
    )
    .expect("uniform shift keeps degrees equal");
    (stripped, v)
}

/// Greatest common divisor, made monic in graded-lex order.
pub fn poly_gcd(p: &HomogPoly, q: &HomogPoly) -> Result<HomogPoly> {
    match (p.is_zero(), q.is_zero()) {
        (true, true) => return Err(Error::InvalidInput("gcd of two zero polynomials".into())),
        (true, false) => return Ok(q.monic()),
        (false, true) => return Ok(p.monic()),
        _ => {}
    }
    let (p0, vp) = strip_z(p);
    let (q0, vq) = strip_z(q);
    let g = dehomogenize(&p0).gcd(&dehomogenize(&q0));
    Ok(rehomogenize(&g, vp.min(vq)).monic())
}

/// Greatest common divisor of several forms; zero entries are skipped.
pub fn poly_gcd_many(polys: &[&HomogPoly]) -> Result<HomogPoly> {
    let nonzero: Vec<&HomogPoly> = polys.iter().copied().filter(|p| !p.is_zero()).collect();
    let Some((first, rest)) = nonzero.split_first() else {
        return Err(Error::InvalidInput("gcd of zero polynomials".into()));
    };
    if rest.is_empty() {
        return Ok(first.monic());
    }
    // A random-looking combination of the remaining forms shares exactly the
    // common factor with high probability; the result is checked by division.
    if rest.len() >= 2 {
        let mut combo = rest[0].clone();
        for (idx, r) in rest[1..].iter().enumerate() {
            let weight = Rational::from_integer(BigInt::from(7 + 13 * idx as i64));
            combo = combo.add(&r.scale(&weight))?;
        }
        if !combo.is_zero() {
            let candidate = poly_gcd(first, &combo)?;
            if rest.iter().all(|r| r.div_exact(&candidate).is_some()) {
                return Ok(candidate);
            }
        }
    }
    let mut g = (*first).clone();
    for r in rest {
        if g.degree() == 0 {
            break;
        }
        g = poly_gcd(&g, r)?;
    }
    Ok(if g.degree() == 0 {
        HomogPoly::constant(Rational::one())
    } else {
        g
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> HomogPoly {
        s.parse().unwrap()
    }

    #[test]
    fn monomial_gcd() {
        assert_eq!(poly_gcd(&p("x^2*y"), &p("x*y^2")).unwrap(), p("x*y"));
        assert_eq!(poly_gcd(&p("x*z^2"), &p("y*z^3")).unwrap(), p("z^2"));
    }

    #[test]
    fn coprime_forms() {
        assert_eq!(poly_gcd(&p("x"), &p("y")).unwrap(), HomogPoly::one());
    }

    #[test]
    fn zero_inputs() {
        assert!(poly_gcd(&HomogPoly::zero(2), &HomogPoly::zero(1)).is_err());
        assert_eq!(poly_gcd(&HomogPoly::zero(2), &p("2*x - y")).unwrap(), p("x - 1/2*y"));
    }

    #[test]
    fn recovers_shared_factor() {
        let h = p("x^2 - 3*y*z + 2*z^2");
        let f = p("x + 5*y");
        let g = p("y^2 - x*z");
        let got = poly_gcd(&f.mul(&h), &g.mul(&h)).unwrap();
        assert_eq!(got, h.monic());
    }

    #[test]
    fn several_forms() {
        let h = p("x - y + z");
        let a = p("x^2").mul(&h);
        let b = p("y*z").mul(&h);
        let c = p("x*y + z^2").mul(&h);
        assert_eq!(poly_gcd_many(&[&a, &b, &c]).unwrap(), h.monic());
        assert_eq!(
            poly_gcd_many(&[&p("y*z"), &p("x*z"), &p("x*y")]).unwrap(),
            HomogPoly::one()
        );
    }
}
