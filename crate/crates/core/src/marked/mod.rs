//! Marked linear systems on the plane and on Hirzebruch surfaces.
//!
//! A class is written `H ~ -a K + b f` with `f` the fiber class (and `b = 0`
//! on the plane). Everything is exact.

mod fano;
mod surface;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use fano::{fano3_classify, CurveVerdict, Fano3Data, Fano3Report, NearCurveVerdict, PointVerdict};
pub use surface::{Position, PositionedPoint, Ruling, Surface};

use crate::algebra::rational::{as_integer, format_rational};
use crate::algebra::Rational;
use crate::cluster::{Cluster, ClusterJson, ClusterPoint, PointId};
use crate::error::{Error, Result};

/// Degree plus base-point cluster of a plane Cremona map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomaloidalType {
    pub n: u32,
    pub cluster: Cluster,
}

impl HomaloidalType {
    pub fn new(n: u32, cluster: Cluster) -> Self {
        HomaloidalType { n, cluster }
    }

    pub fn identity() -> Self {
        HomaloidalType::new(1, Cluster::empty())
    }

    /// A type with proper points `p1, p2, ...` of the given multiplicities.
    pub fn proper(n: u32, mults: &[u32]) -> Result<Self> {
        let pts = mults
            .iter()
            .enumerate()
            .map(|(i, m)| ClusterPoint::root(format!("p{}", i + 1), *m))
            .collect();
        Ok(HomaloidalType::new(n, Cluster::new(pts)?))
    }

    fn sums(&self) -> (BigInt, BigInt) {
        let mut sq = BigInt::zero();
        let mut lin = BigInt::zero();
        for m in self.cluster.multiplicities() {
            let m = BigInt::from(m);
            sq += &m * &m;
            lin += m;
        }
        (sq, lin)
    }

    /// `n^2 - 1 - sum nu^2` and `3n - 3 - sum nu`; both vanish on a valid type.
    pub fn residuals(&self) -> (BigInt, BigInt) {
        let n = BigInt::from(self.n);
        let (sq, lin) = self.sums();
        (&n * &n - 1 - sq, 3 * n - 3 - lin)
    }

    /// Both degree identities hold exactly.
    pub fn validate(&self) -> bool {
        let (s, l) = self.residuals();
        self.n >= 1 && s.is_zero() && l.is_zero()
    }

    /// The three largest multiplicities sum to more than `n`.
    pub fn noether_inequality(&self) -> Result<bool> {
        if self.n <= 1 {
            return Err(Error::NotApplicable(
                "the inequality concerns maps of degree above one".into(),
            ));
        }
        let mut m = self.cluster.multiplicities();
        m.sort_unstable_by(|a, b| b.cmp(a));
        let top: u64 = m.iter().take(3).map(|v| u64::from(*v)).sum();
        Ok(top > u64::from(self.n))
    }

    /// Multiplicities sorted in decreasing order; ignores ids and proximity.
    pub fn multiplicity_profile(&self) -> Vec<u32> {
        let mut m = self.cluster.multiplicities();
        m.sort_unstable_by(|a, b| b.cmp(a));
        m
    }

    pub fn to_json(&self) -> HomaloidalTypeJson {
        HomaloidalTypeJson {
            n: self.n,
            cluster: ClusterJson::from(&self.cluster),
        }
    }
}

pub fn validate_homaloidal(t: &HomaloidalType) -> bool {
    t.validate()
}

pub fn noether_inequality(t: &HomaloidalType) -> Result<bool> {
    t.noether_inequality()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomaloidalTypeJson {
    pub n: u32,
    pub cluster: ClusterJson,
}

impl TryFrom<HomaloidalTypeJson> for HomaloidalType {
    type Error = Error;

    fn try_from(j: HomaloidalTypeJson) -> Result<Self> {
        Ok(HomaloidalType::new(j.n, Cluster::try_from(j.cluster)?))
    }
}

impl FromStr for HomaloidalType {
    type Err = Error;

    /// Parses `"n; nu1,nu2,..."`. An entry `nu>i` makes the point infinitely
    /// near the `i`-th listed point (1-based); further `>j` suffixes add
    /// proximity to earlier points. Points are named `p1, p2, ...`.
    fn from_str(text: &str) -> Result<Self> {
        let (n_text, rest) = text
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("expected \"n; nu1,nu2,...\", got {text:?}")))?;
        let n: u32 = n_text
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad degree {:?}", n_text.trim())))?;
        if n == 0 {
            return Err(Error::Parse("degree must be positive".into()));
        }
        let rest = rest.trim();
        let mut points = Vec::new();
        if !rest.is_empty() {
            for (idx, entry) in rest.split(',').enumerate() {
                let mut parts = entry.trim().split('>');
                let mult_text = parts.next().unwrap_or("").trim();
                let mult: u32 = mult_text
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad multiplicity {mult_text:?}")))?;
                let mut refs = Vec::new();
                for r in parts {
                    let k: usize = r
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad point index {:?}", r.trim())))?;
                    if k == 0 || k > idx {
                        return Err(Error::Parse(format!(
                            "point {} refers to {k}, which is not an earlier point",
                            idx + 1
                        )));
                    }
                    refs.push(PointId(format!("p{k}")));
                }
                let id = PointId(format!("p{}", idx + 1));
                let point = match refs.split_first() {
                    None => ClusterPoint::root(id, mult),
                    Some((parent, extra)) => {
                        let mut p = ClusterPoint::child(id, parent.clone(), mult);
                        p.proximate_to.extend(extra.iter().cloned());
                        p
                    }
                };
                points.push(point);
            }
        }
        Ok(HomaloidalType::new(n, Cluster::new(points)?))
    }
}

impl fmt::Display for HomaloidalType {
    /// Inverse of the parser, with points numbered in storage order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts = self.cluster.points();
        let index: BTreeMap<&PointId, usize> =
            pts.iter().enumerate().map(|(i, p)| (&p.id, i + 1)).collect();
        let entries: Vec<String> = pts
            .iter()
            .map(|p| {
                let mut s = p.multiplicity.to_string();
                if let Some(parent) = &p.parent {
                    s.push_str(&format!(">{}", index[parent]));
                    for q in p.proximate_to.iter().filter(|q| *q != parent) {
                        s.push_str(&format!(">{}", index[q]));
                    }
                }
                s
            })
            .collect();
        write!(f, "{}; {}", self.n, entries.join(","))
    }
}

/// Lexicographically ordered `(mu, lambda, e)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SarkisovDegree {
    pub mu: Rational,
    pub lambda: Rational,
    pub e: u32,
}

impl fmt::Display for SarkisovDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            format_rational(&self.mu),
            format_rational(&self.lambda),
            self.e
        )
    }
}

/// Outcome of the Noether lemma on a marked system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    Isomorphism,
    MaxSingularity(PointId),
    NegativeFiberCoeff,
}

/// The state of the factorization: a surface, a class, and a cluster whose
/// points carry incidence flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedSystem {
    surface: Surface,
    a: Rational,
    b: Rational,
    cluster: Cluster,
    /// Only points off the general position are listed. Fiber relations are
    /// normalized so every member of a class points to the smallest id.
    positions: BTreeMap<PointId, Position>,
}

impl MarkedSystem {
    /// Builds and validates a state. Points may come in any order; points of
    /// multiplicity zero are pruned after fiber relations are resolved.
    pub fn new(surface: Surface, a: Rational, b: Rational, points: Vec<PositionedPoint>) -> Result<Self> {
        if !surface.is_valid() {
            return Err(Error::InvalidState(format!(
                "surface {surface:?}: a ruling tag is required exactly on F0"
            )));
        }
        let n = surface.twist();
        let ids: BTreeSet<PointId> = points.iter().map(|p| p.point.id.clone()).collect();
        let is_root: BTreeMap<&PointId, bool> =
            points.iter().map(|p| (&p.point.id, p.point.is_root())).collect();
        let on_section: BTreeMap<&PointId, bool> =
            points.iter().map(|p| (&p.point.id, p.on_negative_section)).collect();
        for p in &points {
            let id = &p.point.id;
            if n.is_none() && !p.position().is_general() {
                return Err(Error::InvalidState(format!(
                    "point {id} carries ruling flags on the plane"
                )));
            }
            if n == Some(0) && p.on_negative_section {
                return Err(Error::InvalidState(format!(
                    "point {id} is flagged on the negative section of F0"
                )));
            }
            if n != Some(0) && p.on_cross_fiber_of.is_some() {
                return Err(Error::InvalidState(format!(
                    "point {id} uses the second ruling, which exists only on F0"
                )));
            }
            for other in [&p.on_fiber_of, &p.on_cross_fiber_of].into_iter().flatten() {
                if !p.point.is_root() {
                    return Err(Error::InvalidState(format!(
                        "fiber relations are for proper points, {id} is infinitely near"
                    )));
                }
                if other == id || !ids.contains(other) || !is_root[other] {
                    return Err(Error::InvalidState(format!(
                        "point {id} shares a fiber with {other}, which is not another proper point"
                    )));
                }
            }
            if p.on_negative_section {
                if let Some(parent) = &p.point.parent {
                    if !on_section.get(parent).copied().unwrap_or(false) {
                        return Err(Error::InvalidState(format!(
                            "{id} is on the section but its parent {parent} is not"
                        )));
                    }
                }
            }
        }

        let fibers = surface::classes(
            ids.iter(),
            points
                .iter()
                .filter_map(|p| p.on_fiber_of.as_ref().map(|o| (&p.point.id, o))),
        );
        let cross = surface::classes(
            ids.iter(),
            points
                .iter()
                .filter_map(|p| p.on_cross_fiber_of.as_ref().map(|o| (&p.point.id, o))),
        );
        let mult: BTreeMap<&PointId, u32> =
            points.iter().map(|p| (&p.point.id, p.point.multiplicity)).collect();
        let rep = |groups: &[BTreeSet<PointId>]| -> BTreeMap<PointId, PointId> {
            let mut out = BTreeMap::new();
            for g in groups {
                let live: Vec<&PointId> = g.iter().filter(|i| mult[*i] > 0).collect();
                if let Some((first, rest)) = live.split_first() {
                    for r in rest {
                        out.insert((*r).clone(), (*first).clone());
                    }
                }
            }
            out
        };
        let fiber_rep = rep(&fibers);
        let cross_rep = rep(&cross);
        for g in &fibers {
            let on_sec = g.iter().filter(|i| on_section[*i]).count();
            if on_sec > 1 {
                return Err(Error::InvalidState(
                    "two points of one fiber cannot both lie on the section".into(),
                ));
            }
            for c in &cross {
                if g.intersection(c).count() > 1 {
                    return Err(Error::InvalidState(
                        "two points share both a fiber and a cross fiber".into(),
                    ));
                }
            }
        }

        let mut positions = BTreeMap::new();
        let mut cluster_points = Vec::with_capacity(points.len());
        for p in points {
            if p.point.multiplicity == 0 {
                cluster_points.push(p.point);
                continue;
            }
            let pos = Position {
                on_negative_section: p.on_negative_section,
                on_fiber_of: fiber_rep.get(&p.point.id).cloned(),
                on_cross_fiber_of: cross_rep.get(&p.point.id).cloned(),
            };
            if !pos.is_general() {
                positions.insert(p.point.id.clone(), pos);
            }
            cluster_points.push(p.point);
        }
        let cluster = Cluster::from_unordered(cluster_points)?.pruned();
        let ms = MarkedSystem {
            surface,
            a,
            b,
            cluster,
            positions,
        };
        ms.check_class()?;
        Ok(ms)
    }

    fn check_class(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidState(msg));
        if !self.a.is_positive() {
            return bad(format!("a = {} must be positive", format_rational(&self.a)));
        }
        match self.surface {
            Surface::P2 => {
                if !self.b.is_zero() {
                    return bad("b must be zero on the plane".into());
                }
                if !(&self.a * Rational::from_integer(3.into())).is_integer() {
                    return bad(format!("3a = 3*{} is not an integer", format_rational(&self.a)));
                }
            }
            Surface::Hirzebruch { n, .. } => {
                let (alpha, beta) = self.section_fiber_coefficients();
                if !alpha.is_integer() || !beta.is_integer() || beta.is_negative() {
                    return bad(format!(
                        "class {}s + {}f on F{n} is not a nonnegative integral class",
                        format_rational(&alpha),
                        format_rational(&beta)
                    ));
                }
            }
        }
        let (sq, lin) = self.identity_residuals();
        if !sq.is_zero() || !lin.is_zero() {
            return bad(format!(
                "identities fail: H^2 - sum nu^2 - 1 = {}, -K.H - sum nu - 3 = {}",
                format_rational(&sq),
                format_rational(&lin)
            ));
        }
        Ok(())
    }

    /// Coefficients `(alpha, beta)` of `H = alpha s + beta f` on `F_N`, using
    /// `-K = 2s + (N+2) f`.
    pub fn section_fiber_coefficients(&self) -> (Rational, Rational) {
        let n = Rational::from_integer(BigInt::from(self.surface.twist().unwrap_or(0)));
        let two = Rational::from_integer(2.into());
        (&two * &self.a, (n + two) * &self.a + &self.b)
    }

    /// `H^2` in the basis `{-K, f}`.
    pub fn self_intersection(&self) -> Rational {
        let (a, b) = (&self.a, &self.b);
        match self.surface {
            Surface::P2 => Rational::from_integer(9.into()) * a * a,
            Surface::Hirzebruch { .. } => {
                Rational::from_integer(8.into()) * a * a + Rational::from_integer(4.into()) * a * b
            }
        }
    }

    /// `-K . H`.
    pub fn anticanonical_degree(&self) -> Rational {
        match self.surface {
            Surface::P2 => Rational::from_integer(9.into()) * &self.a,
            Surface::Hirzebruch { .. } => {
                Rational::from_integer(8.into()) * &self.a + Rational::from_integer(2.into()) * &self.b
            }
        }
    }

    /// `(H^2 - sum nu^2 - 1, -K.H - sum nu - 3)`; both zero on a valid state.
    pub fn identity_residuals(&self) -> (Rational, Rational) {
        let mut sq = BigInt::zero();
        let mut lin = BigInt::zero();
        for m in self.cluster.multiplicities() {
            sq += BigInt::from(m) * BigInt::from(m);
            lin += BigInt::from(m);
        }
        (
            self.self_intersection() - Rational::from_integer(sq) - Rational::one(),
            self.anticanonical_degree() - Rational::from_integer(lin) - Rational::from_integer(3.into()),
        )
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn cluster(&self) -> &Cluster {
        &self.cluster
    }

    pub fn position(&self, id: &PointId) -> Position {
        self.positions.get(id).cloned().unwrap_or_default()
    }

    pub fn positioned_points(&self) -> Vec<PositionedPoint> {
        self.cluster
            .points()
            .iter()
            .map(|p| PositionedPoint::with_position(p.clone(), self.position(&p.id)))
            .collect()
    }

    /// Proper points sharing the fiber through `id`, excluding `id` itself.
    pub fn fiber_mates(&self, id: &PointId) -> BTreeSet<PointId> {
        self.mates(id, |p| p.on_fiber_of.as_ref())
    }

    /// Proper points sharing the second-ruling fiber through `id` on `F_0`.
    pub fn cross_fiber_mates(&self, id: &PointId) -> BTreeSet<PointId> {
        self.mates(id, |p| p.on_cross_fiber_of.as_ref())
    }

    fn mates(&self, id: &PointId, link: impl Fn(&Position) -> Option<&PointId>) -> BTreeSet<PointId> {
        let rep = self.positions.get(id).and_then(&link).unwrap_or(id).clone();
        let mut out: BTreeSet<PointId> = self
            .positions
            .iter()
            .filter(|(_, p)| link(p) == Some(&rep))
            .map(|(k, _)| k.clone())
            .collect();
        out.insert(rep);
        out.remove(id);
        if self.cluster.get(id).is_none() {
            out.clear();
        }
        out
    }

    /// The plane degree `n = 3a`, when the surface is the plane.
    pub fn plane_degree(&self) -> Option<u32> {
        if !self.surface.is_plane() {
            return None;
        }
        as_integer(&(&self.a * Rational::from_integer(3.into())))
            .and_then(|v| u32::try_from(v).ok())
    }

    pub fn to_homaloidal(&self) -> Option<HomaloidalType> {
        self.plane_degree()
            .map(|n| HomaloidalType::new(n, self.cluster.clone()))
    }

    /// Start of the algorithm: the plane with `a = n/3`, `b = 0`.
    pub fn from_homaloidal(t: &HomaloidalType) -> Result<Self> {
        if !t.validate() {
            let (s, l) = t.residuals();
            return Err(Error::NotHomaloidal(format!(
                "{t}: n^2 - 1 - sum nu^2 = {s}, 3n - 3 - sum nu = {l}"
            )));
        }
        MarkedSystem::new(
            Surface::P2,
            Rational::new(BigInt::from(t.n), BigInt::from(3)),
            Rational::zero(),
            t.cluster
                .points()
                .iter()
                .cloned()
                .map(PositionedPoint::general)
                .collect(),
        )
        .map_err(|e| Error::NotHomaloidal(e.to_string()))
    }

    /// Noether's lemma: a proper point with `nu > a` (largest first, then
    /// storage order), else a negative fiber coefficient, else the identity.
    pub fn classify(&self) -> Result<Classification> {
        let mut best: Option<&ClusterPoint> = None;
        for p in self.cluster.roots() {
            if Rational::from_integer(p.multiplicity.into()) > self.a
                && best.is_none_or(|q| p.multiplicity > q.multiplicity)
            {
                best = Some(p);
            }
        }
        if let Some(p) = best {
            return Ok(Classification::MaxSingularity(p.id.clone()));
        }
        if !self.surface.is_plane() && self.b.is_negative() {
            return Ok(Classification::NegativeFiberCoeff);
        }
        if self.surface.is_plane()
            && self.a == Rational::new(1.into(), 3.into())
            && self.cluster.is_empty()
        {
            return Ok(Classification::Isomorphism);
        }
        Err(Error::InvalidState(format!(
            "no maximal singularity and no negative fiber coefficient, yet {} with a = {}, b = {} and {} points is not the identity",
            self.surface,
            format_rational(&self.a),
            format_rational(&self.b),
            self.cluster.len()
        )))
    }

    pub fn sarkisov_degree(&self) -> SarkisovDegree {
        let (lambda, e) = self.cluster.lambda_e();
        SarkisovDegree {
            mu: self.a.clone(),
            lambda,
            e,
        }
    }

    /// `lambda <= mu` and, off the plane, `b >= 0`.
    pub fn noether_fano_certificate(&self) -> bool {
        let (lambda, _) = self.cluster.lambda_e();
        lambda <= self.a && (self.surface.is_plane() || !self.b.is_negative())
    }

    /// Compact text summary, e.g. `F1 a=1/2 b=1/2 [p2:1, p3:1]`.
    pub fn summary(&self) -> String {
        let pts: Vec<String> = self
            .cluster
            .points()
            .iter()
            .map(|p| format!("{}:{}", p.id, p.multiplicity))
            .collect();
        format!(
            "{} a={} b={} [{}]",
            self.surface,
            format_rational(&self.a),
            format_rational(&self.b),
            pts.join(", ")
        )
    }
}

pub fn from_homaloidal(t: &HomaloidalType) -> Result<MarkedSystem> {
    MarkedSystem::from_homaloidal(t)
}

pub fn classify(ms: &MarkedSystem) -> Result<Classification> {
    ms.classify()
}

pub fn sarkisov_degree(ms: &MarkedSystem) -> SarkisovDegree {
    ms.sarkisov_degree()
}

pub fn noether_fano_certificate(ms: &MarkedSystem) -> bool {
    ms.noether_fano_certificate()
}
