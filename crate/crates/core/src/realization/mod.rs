//! Cremona maps as triples of forms: composition, base points, factorization
//! into quadratic maps and a seeded corpus generator. This layer is the
//! polynomial oracle the combinatorial engine is checked against.

mod basepoints;
mod corpus;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::homog::primitive_scale;
use crate::algebra::{normalize_point, poly_gcd_many, HomogPoly, Matrix3, ProjPoint, Rational};
use crate::cluster::{Cluster, ClusterPoint};
use crate::error::{Error, Result};
use crate::marked::HomaloidalType;

pub use basepoints::{base_points, BasePoint};
pub use corpus::{random_corpus, CorpusEntry, CorpusEntryJson};

/// `(f0 : f1 : f2)`, coprime forms of a common degree, jointly scaled to
/// coprime integer coefficients with a positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMap {
    polys: [HomogPoly; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalMapJson {
    pub degree: u32,
    pub polys: [String; 3],
}

impl RationalMap {
    /// Removes the common factor of the forms and normalizes.
    pub fn new(polys: [HomogPoly; 3]) -> Result<Self> {
        let d = polys[0].degree();
        if polys.iter().any(|p| p.degree() != d) {
            return Err(Error::InvalidInput("components must share a degree".into()));
        }
        if polys.iter().all(HomogPoly::is_zero) {
            return Err(Error::InvalidInput("all three components vanish".into()));
        }
        let polys = strip_monomial(polys);
        let g = poly_gcd_many(&[&polys[0], &polys[1], &polys[2]])?;
        let polys = if g.degree() > 0 {
            let d = polys[0].degree() - g.degree();
            polys.map(|p| p.div_exact(&g).expect("gcd divides").with_zero_degree(d))
        } else {
            polys
        };
        if polys[0].degree() == 0 {
            return Err(Error::InvalidInput("the map is constant".into()));
        }
        Ok(Self::normalized(polys))
    }

    /// Trusts the caller that the forms are already coprime.
    fn normalized(polys: [HomogPoly; 3]) -> Self {
        let s = primitive_scale(polys.iter().flat_map(|p| p.terms().values().rev()));
        RationalMap {
            polys: polys.map(|p| p.scale(&s)),
        }
    }

    pub fn identity() -> Self {
        RationalMap {
            polys: [HomogPoly::var(0), HomogPoly::var(1), HomogPoly::var(2)],
        }
    }

    /// `(yz : xz : xy)`.
    pub fn standard_involution() -> Self {
        let m = |e| HomogPoly::monomial(Rational::one(), e);
        RationalMap {
            polys: [m([0, 1, 1]), m([1, 0, 1]), m([1, 1, 0])],
        }
    }

    /// The map `p -> M p`.
    pub fn from_matrix(m: &Matrix3) -> Result<Self> {
        if m.det().is_zero() {
            return Err(Error::InvalidInput("singular matrix".into()));
        }
        Ok(Self::normalized(std::array::from_fn(|i| {
            HomogPoly::linear(&m.0[i])
        })))
    }

    pub fn degree(&self) -> u32 {
        self.polys[0].degree()
    }

    pub fn polys(&self) -> &[HomogPoly; 3] {
        &self.polys
    }

    /// Image of a point, or `None` at a base point.
    pub fn apply(&self, p: &ProjPoint) -> Option<ProjPoint> {
        let v = [0, 1, 2].map(|i| self.polys[i].eval(p));
        normalize_point(&v)
    }

    pub fn to_json(&self) -> RationalMapJson {
        RationalMapJson {
            degree: self.degree(),
            polys: [0, 1, 2].map(|i| self.polys[i].to_string()),
        }
    }

    pub fn from_json(j: &RationalMapJson) -> Result<Self> {
        let mut polys = Vec::with_capacity(3);
        for s in &j.polys {
            let p: HomogPoly = s.parse()?;
            let p = if p.is_zero() {
                p.with_zero_degree(j.degree)
            } else if p.degree() != j.degree {
                return Err(Error::Parse(format!(
                    "component {s} does not have degree {}",
                    j.degree
                )));
            } else {
                p
            };
            polys.push(p);
        }
        let polys: [HomogPoly; 3] = polys.try_into().expect("three components");
        Self::new(polys)
    }
}

fn strip_monomial(polys: [HomogPoly; 3]) -> [HomogPoly; 3] {
    let shift: [u32; 3] = std::array::from_fn(|v| {
        polys
            .iter()
            .filter(|p| !p.is_zero())
            .map(|p| p.variable_valuation(v))
            .min()
            .unwrap_or(0)
    });
    if shift == [0, 0, 0] {
        return polys;
    }
    let d = polys[0].degree() - shift.iter().sum::<u32>();
    polys.map(|p| {
        HomogPoly::from_terms(
            d,
            p.terms()
                .iter()
                .map(|(e, c)| ([e[0] - shift[0], e[1] - shift[1], e[2] - shift[2]], c.clone())),
        )
        .expect("shifted terms keep a common degree")
    })
}

/// `g ∘ f`, with the common factor removed.
pub fn compose(g: &RationalMap, f: &RationalMap) -> Result<RationalMap> {
    let fp = [&f.polys[0], &f.polys[1], &f.polys[2]];
    let comps: Vec<HomogPoly> = g
        .polys
        .iter()
        .map(|p| p.substitute(fp))
        .collect::<Result<_>>()?;
    if comps.iter().all(HomogPoly::is_zero) {
        return Err(Error::DegenerateComposition);
    }
    RationalMap::new(comps.try_into().expect("three components"))
}

/// Integer matrix whose columns are the three centers, checked to be in
/// general position.
fn center_matrix(centers: &[ProjPoint; 3]) -> Result<Matrix3> {
    let cols = centers
        .each_ref()
        .map(|p| normalize_point(p).ok_or_else(|| Error::InvalidInput("zero vector as a point".into())));
    let [a, b, c] = cols;
    let m = Matrix3::from_columns([&a?, &b?, &c?]);
    if m.det().is_zero() {
        return Err(Error::SpecialPosition(
            "quadratic centers are collinear or coincide".into(),
        ));
    }
    Ok(m)
}

/// `f ∘ Q` for the quadratic involution `Q` based at the three centers.
/// Since `Q = M σ adj(M)`, the only common factor after substituting `σ` is a
/// monomial, so no polynomial gcd is needed.
pub fn compose_with_quadratic(f: &RationalMap, centers: &[ProjPoint; 3]) -> Result<RationalMap> {
    let m = center_matrix(centers)?;
    let to_int = |m: &Matrix3| -> [[BigInt; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| m.0[i][j].to_integer()))
    };
    let (mi, adj) = (to_int(&m), to_int(&m.adjugate()));
    let polys = f
        .polys
        .each_ref()
        .map(|p| p.integer_linear_substitute(&mi).substitute_standard_involution());
    let polys = strip_monomial(polys).map(|p| p.integer_linear_substitute(&adj));
    Ok(RationalMap::normalized(polys))
}

/// The quadratic involution with base points exactly the three centers.
pub fn quadratic_from_points(p1: &ProjPoint, p2: &ProjPoint, p3: &ProjPoint) -> Result<RationalMap> {
    compose_with_quadratic(&RationalMap::identity(), &[p1.clone(), p2.clone(), p3.clone()])
}

/// The matrix of a degree-one map, scaled to coprime integers.
pub fn is_projective_linear(m: &RationalMap) -> Option<Matrix3> {
    if m.degree() != 1 {
        return None;
    }
    let rows: [[Rational; 3]; 3] = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut e = [0, 0, 0];
            e[j] = 1;
            m.polys[i].coeff(&e)
        })
    });
    let mat = Matrix3(rows);
    (!mat.det().is_zero()).then(|| mat.normalized())
}

/// Degree and base-point multiplicities, with ids `p1, p2, ...` in
/// decreasing order of multiplicity.
pub fn homaloidal_type_of(m: &RationalMap) -> Result<HomaloidalType> {
    let pts = base_points(m)?;
    let cluster = Cluster::new(
        pts.iter()
            .enumerate()
            .map(|(k, b)| ClusterPoint::root(format!("p{}", k + 1), b.multiplicity))
            .collect(),
    )?;
    let t = HomaloidalType::new(m.degree(), cluster);
    if !t.validate() {
        return Err(Error::InternalInvariantViolation(format!(
            "extracted type {t} fails the identities"
        )));
    }
    Ok(t)
}

/// One factor of a quadratic factorization: the involution based at
/// `centers`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticFactor {
    pub centers: [ProjPoint; 3],
    pub map: RationalMap,
}

/// Greedy untwisting: compose with the quadratic map at the three base points
/// of largest multiplicity until the degree is one. On success
/// `m ∘ Q_1 ∘ ... ∘ Q_k` is projective linear.
pub fn factor_by_quadratics(m: &RationalMap) -> Result<Vec<QuadraticFactor>> {
    let mut pts = base_points(m)?;
    let mut cur = m.clone();
    let mut factors = Vec::new();
    while cur.degree() > 1 {
        let n = cur.degree();
        pts.sort_by_key(|p| std::cmp::Reverse(p.multiplicity));
        let (idx, nus) = pick_triple(&pts, n)?;
        let centers = idx.map(|i| pts[i].point.clone());
        let next = compose_with_quadratic(&cur, &centers)?;
        let expected = 2 * n - nus.iter().sum::<u32>();
        if next.degree() != expected {
            return Err(Error::InternalInvariantViolation(format!(
                "quadratic step took degree {n} to {}, expected {expected}",
                next.degree()
            )));
        }
        let q = quadratic_from_points(&centers[0], &centers[1], &centers[2])?;
        let mut moved: Vec<BasePoint> = Vec::new();
        for k in 0..3 {
            let nu = n - nus[(k + 1) % 3] - nus[(k + 2) % 3];
            if nu > 0 {
                moved.push(BasePoint {
                    point: normalize_point(&centers[k]).expect("nonzero"),
                    multiplicity: nu,
                });
            }
        }
        for b in pts.iter().enumerate().filter(|(i, _)| !idx.contains(i)).map(|(_, b)| b) {
            let image = q.apply(&b.point).ok_or_else(|| {
                Error::InternalInvariantViolation("base point is a base point of Q".into())
            })?;
            moved.push(BasePoint {
                point: image,
                multiplicity: b.multiplicity,
            });
        }
        factors.push(QuadraticFactor { centers, map: q });
        pts = moved;
        cur = next;
    }
    if is_projective_linear(&cur).is_none() {
        return Err(Error::InternalInvariantViolation(
            "quadratic factorization did not end on a linear map".into(),
        ));
    }
    Ok(factors)
}

/// Composes `m ∘ Q_1 ∘ ... ∘ Q_k` and returns its matrix if it is linear.
pub fn residual_linear(m: &RationalMap, factors: &[QuadraticFactor]) -> Result<Option<Matrix3>> {
    let mut cur = m.clone();
    for f in factors {
        cur = compose_with_quadratic(&cur, &f.centers)?;
    }
    Ok(is_projective_linear(&cur))
}

/// The first triple in order of decreasing multiplicity sum (ties broken by
/// the sorted order of the points) that is in general position and drops the
/// degree. Points are sorted by decreasing multiplicity, so the first triple
/// tried is the three largest.
fn pick_triple(pts: &[BasePoint], n: u32) -> Result<([usize; 3], [u32; 3])> {
    if pts.len() < 3 {
        return Err(Error::InternalInvariantViolation(format!(
            "degree {n} map with fewer than three base points"
        )));
    }
    let mut triples: Vec<[usize; 3]> = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            for k in j + 1..pts.len() {
                triples.push([i, j, k]);
            }
        }
    }
    let sum = |t: &[usize; 3]| t.iter().map(|&i| pts[i].multiplicity).sum::<u32>();
    triples.sort_by(|a, b| sum(b).cmp(&sum(a)).then_with(|| a.cmp(b)));
    let mut first_err = None;
    for t in triples {
        if sum(&t) <= n {
            break;
        }
        match check_general_position(pts, &t) {
            Ok(()) => return Ok((t, t.map(|i| pts[i].multiplicity))),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.unwrap_or_else(|| {
        Error::InternalInvariantViolation(format!("no triple of base points exceeds degree {n}"))
    }))
}

/// The centers must not be collinear and no other base point may sit on a
/// line through two of them.
fn check_general_position(pts: &[BasePoint], t: &[usize; 3]) -> Result<()> {
    let centers: [ProjPoint; 3] = t.map(|i| pts[i].point.clone());
    center_matrix(&centers)?;
    for (k, b) in pts.iter().enumerate() {
        if t.contains(&k) {
            continue;
        }
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let m = Matrix3::from_columns([&centers[i], &centers[j], &b.point]);
            if m.det().is_zero() {
                return Err(Error::SpecialPosition(format!(
                    "base point {} lies on a line through two centers",
                    crate::algebra::format_point(&b.point)
                )));
            }
        }
    }
    Ok(())
}
