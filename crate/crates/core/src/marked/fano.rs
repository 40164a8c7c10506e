//! Threshold checker for maximal singularities of linear systems on Fano
//! threefolds of Picard number one. Only the inequalities are evaluated; no
//! geometry is performed.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use crate::algebra::rational::format_rational;
use crate::algebra::Rational;
use crate::error::{Error, Result};

/// A linear system in `|nH|` on a threefold with `-K = rH`, together with
/// the multiplicities to be tested.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fano3Data {
    n: u64,
    r: u64,
    hcube: u64,
    /// `(deg C, mult_C)` for curves on the threefold.
    curves: Vec<(u64, Rational)>,
    /// `mult_P` for points.
    points: Vec<Rational>,
    /// `(mult along the curve, mult at the point below)` for curves on the
    /// blow-up of a point.
    infinitely_near: Vec<(Rational, Rational)>,
}

impl Fano3Data {
    pub fn new(
        n: u64,
        r: u64,
        hcube: u64,
        curves: Vec<(u64, Rational)>,
        points: Vec<Rational>,
        infinitely_near: Vec<(Rational, Rational)>,
    ) -> Result<Self> {
        if n == 0 || r == 0 || hcube == 0 {
            return Err(Error::InvalidInput("n, r and H^3 must be positive".into()));
        }
        let positive = |q: &Rational| q.is_positive();
        if curves.iter().any(|(d, m)| *d == 0 || !positive(m))
            || !points.iter().all(positive)
            || !infinitely_near.iter().all(|(c, p)| positive(c) && positive(p))
        {
            return Err(Error::InvalidInput(
                "curve degrees and all multiplicities must be positive".into(),
            ));
        }
        Ok(Fano3Data {
            n,
            r,
            hcube,
            curves,
            points,
            infinitely_near,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurveVerdict {
    pub degree: u64,
    #[serde(serialize_with = "ser_rational")]
    pub mult: Rational,
    pub mult_exceeds: bool,
    pub degree_below_bound: bool,
    pub open: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointVerdict {
    #[serde(serialize_with = "ser_rational")]
    pub mult: Rational,
    pub open: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NearCurveVerdict {
    #[serde(serialize_with = "ser_rational")]
    pub curve_mult: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub point_mult: Rational,
    pub open: bool,
}

/// Which of the three kinds of maximal singularity the data leave open.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Fano3Report {
    /// `n/r`, the bound for curves and for infinitely near curves.
    #[serde(serialize_with = "ser_rational")]
    pub curve_threshold: Rational,
    /// `2n/r`, the bound for points.
    #[serde(serialize_with = "ser_rational")]
    pub point_threshold: Rational,
    /// `r^2 H^3`; a maximal curve has degree strictly below it.
    pub curve_degree_bound: u64,
    pub curves: Vec<CurveVerdict>,
    pub points: Vec<PointVerdict>,
    pub infinitely_near: Vec<NearCurveVerdict>,
    pub case1_open: bool,
    pub case2_open: bool,
    pub case3_open: bool,
    /// The infinitely near case comes with no degree bound.
    pub case3_bound: &'static str,
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

pub fn fano3_classify(d: &Fano3Data) -> Fano3Report {
    let curve_threshold = Rational::new(BigInt::from(d.n), BigInt::from(d.r));
    let point_threshold = Rational::new(BigInt::from(2 * d.n), BigInt::from(d.r));
    let curve_degree_bound = d.r * d.r * d.hcube;
    let curves: Vec<CurveVerdict> = d
        .curves
        .iter()
        .map(|(deg, m)| {
            let mult_exceeds = *m > curve_threshold;
            let degree_below_bound = *deg < curve_degree_bound;
            CurveVerdict {
                degree: *deg,
                mult: m.clone(),
                mult_exceeds,
                degree_below_bound,
                open: mult_exceeds && degree_below_bound,
            }
        })
        .collect();
    let points: Vec<PointVerdict> = d
        .points
        .iter()
        .map(|m| PointVerdict {
            mult: m.clone(),
            open: *m > point_threshold,
        })
        .collect();
    let infinitely_near: Vec<NearCurveVerdict> = d
        .infinitely_near
        .iter()
        .map(|(c, p)| NearCurveVerdict {
            curve_mult: c.clone(),
            point_mult: p.clone(),
            open: *c > curve_threshold && *p > curve_threshold,
        })
        .collect();
    Fano3Report {
        case1_open: curves.iter().any(|c| c.open),
        case2_open: points.iter().any(|p| p.open),
        case3_open: infinitely_near.iter().any(|c| c.open),
        curve_threshold,
        point_threshold,
        curve_degree_bound,
        curves,
        points,
        infinitely_near,
        case3_bound: "indeterminate bound",
    }
}
