//! Clusters of base points, proper and infinitely near, with proximity.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebra::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub String);

impl PointId {
    pub fn new(s: impl Into<String>) -> Self {
        PointId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PointId {
    fn from(s: &str) -> Self {
        PointId(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClusterPoint {
    pub id: PointId,
    /// The point this one is infinitely near to; `None` for a proper point.
    pub parent: Option<PointId>,
    /// Points whose exceptional curve passes through this one. Contains the
    /// parent whenever there is one.
    pub proximate_to: BTreeSet<PointId>,
    pub multiplicity: u32,
}

impl ClusterPoint {
    pub fn root(id: impl Into<PointId>, multiplicity: u32) -> Self {
        ClusterPoint {
            id: id.into(),
            parent: None,
            proximate_to: BTreeSet::new(),
            multiplicity,
        }
    }

    /// A first-order neighbour of `parent`, proximate to it alone.
    pub fn child(id: impl Into<PointId>, parent: impl Into<PointId>, multiplicity: u32) -> Self {
        let parent = parent.into();
        ClusterPoint {
            id: id.into(),
            proximate_to: BTreeSet::from([parent.clone()]),
            parent: Some(parent),
            multiplicity,
        }
    }

    /// Adds a further proximity, making the point a satellite.
    pub fn also_proximate_to(mut self, id: impl Into<PointId>) -> Self {
        self.proximate_to.insert(id.into());
        self
    }

    pub fn is_root(&self) -> bool {
        self.parent.is_none()
    }
}

impl From<String> for PointId {
    fn from(s: String) -> Self {
        PointId(s)
    }
}

/// `c = min a_k / b_k`, or the infinite sentinel when no point has positive
/// total multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Threshold {
    Finite(Rational),
    Infinite,
}

/// A validated cluster, stored in topological order (parents first).
#[derive(Clone, Debug)]
pub struct Cluster {
    points: Vec<ClusterPoint>,
    discrepancies: Vec<u64>,
    totals: Vec<u64>,
}

impl PartialEq for Cluster {
    /// Clusters compare as sets of points; storage order is irrelevant.
    fn eq(&self, other: &Self) -> bool {
        self.points.len() == other.points.len() && self.by_id() == other.by_id()
    }
}

impl Eq for Cluster {}

impl Default for Cluster {
    fn default() -> Self {
        Cluster::empty()
    }
}

impl Cluster {
    pub fn empty() -> Self {
        Cluster {
            points: Vec::new(),
            discrepancies: Vec::new(),
            totals: Vec::new(),
        }
    }

    /// Validates a cluster given in topological order.
    pub fn new(points: Vec<ClusterPoint>) -> Result<Self> {
        let mut index: HashMap<&PointId, usize> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            if let Some(parent) = &p.parent {
                if !index.contains_key(parent) {
                    return Err(Error::InvalidCluster(format!(
                        "parent {parent} of {} is unknown or listed after it",
                        p.id
                    )));
                }
                if !p.proximate_to.contains(parent) {
                    return Err(Error::InvalidCluster(format!(
                        "{} must be proximate to its parent {parent}",
                        p.id
                    )));
                }
            } else if !p.proximate_to.is_empty() {
                return Err(Error::InvalidCluster(format!(
                    "proper point {} cannot be proximate to other points",
                    p.id
                )));
            }
            if index.insert(&p.id, i).is_some() {
                return Err(Error::InvalidCluster(format!("duplicate point id {}", p.id)));
            }
        }
        for p in &points {
            let ancestors = ancestors(&points, &index, p);
            for q in &p.proximate_to {
                if !ancestors.contains(q) {
                    return Err(Error::InvalidCluster(format!(
                        "{} is proximate to {q}, which is not one of its ancestors",
                        p.id
                    )));
                }
            }
            if p.proximate_to.len() > 2 {
                return Err(Error::InvalidCluster(format!(
                    "{} lies on more than two exceptional curves",
                    p.id
                )));
            }
            if let Some(parent) = &p.parent {
                let parent_point = &points[index[parent]];
                for q in p.proximate_to.iter().filter(|q| *q != parent) {
                    if !parent_point.proximate_to.contains(q) {
                        return Err(Error::InvalidCluster(format!(
                            "satellite {} is proximate to {q} but its parent {parent} is not",
                            p.id
                        )));
                    }
                }
            }
        }
        // proximity inequality: nu_j >= sum of nu_k over k proximate to j
        let mut load: Vec<u64> = vec![0; points.len()];
        for p in &points {
            for q in &p.proximate_to {
                load[index[q]] += u64::from(p.multiplicity);
            }
        }
        for (p, l) in points.iter().zip(&load) {
            if u64::from(p.multiplicity) < *l {
                return Err(Error::InvalidCluster(format!(
                    "proximity inequality fails at {}: multiplicity {} < {l}",
                    p.id, p.multiplicity
                )));
            }
        }

        let overflow = || Error::InvalidCluster("discrepancy overflow".into());
        let mut a: Vec<u64> = Vec::with_capacity(points.len());
        let mut b: Vec<u64> = Vec::with_capacity(points.len());
        for p in &points {
            let mut ak: u64 = 1;
            let mut bk = u64::from(p.multiplicity);
            for q in &p.proximate_to {
                let j = index[q];
                ak = ak.checked_add(a[j]).ok_or_else(overflow)?;
                bk = bk.checked_add(b[j]).ok_or_else(overflow)?;
            }
            a.push(ak);
            b.push(bk);
        }
        Ok(Cluster {
            points,
            discrepancies: a,
            totals: b,
        })
    }

    /// Validates points given in any order, sorting them topologically while
    /// keeping the input order among independent points.
    pub fn from_unordered(points: Vec<ClusterPoint>) -> Result<Self> {
        let ids: BTreeSet<&PointId> = points.iter().map(|p| &p.id).collect();
        if ids.len() != points.len() {
            return Err(Error::InvalidCluster("duplicate point ids".into()));
        }
        let mut placed: BTreeSet<PointId> = BTreeSet::new();
        let mut remaining = points;
        let mut ordered = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let before = remaining.len();
            let mut rest = Vec::new();
            for p in remaining {
                let ready = p.parent.as_ref().is_none_or(|q| placed.contains(q));
                if ready {
                    placed.insert(p.id.clone());
                    ordered.push(p);
                } else {
                    rest.push(p);
                }
            }
            if rest.len() == before {
                return Err(Error::InvalidCluster(
                    "parent relation is cyclic or refers to missing points".into(),
                ));
            }
            remaining = rest;
        }
        Cluster::new(ordered)
    }

    pub fn points(&self) -> &[ClusterPoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<ClusterPoint> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, id: &PointId) -> Option<&ClusterPoint> {
        self.points.iter().find(|p| &p.id == id)
    }

    pub fn position(&self, id: &PointId) -> Option<usize> {
        self.points.iter().position(|p| &p.id == id)
    }

    pub fn roots(&self) -> impl Iterator<Item = &ClusterPoint> {
        self.points.iter().filter(|p| p.is_root())
    }

    pub fn children_of<'a>(&'a self, id: &'a PointId) -> impl Iterator<Item = &'a ClusterPoint> + 'a {
        self.points
            .iter()
            .filter(move |p| p.parent.as_ref() == Some(id))
    }

    pub fn multiplicities(&self) -> Vec<u32> {
        self.points.iter().map(|p| p.multiplicity).collect()
    }

    /// `a_k = 1 + sum of a_j over the points j that k is proximate to`.
    pub fn discrepancies(&self) -> &[u64] {
        &self.discrepancies
    }

    /// `b_k = nu_k + sum of b_j over the points j that k is proximate to`.
    pub fn total_multiplicities(&self) -> &[u64] {
        &self.totals
    }

    /// `lambda = max b_k / a_k` and the number of points attaining it; both
    /// zero on the empty cluster.
    pub fn lambda_e(&self) -> (Rational, u32) {
        let mut best = Rational::from_integer(BigInt::from(0));
        let mut count = 0;
        for (a, b) in self.discrepancies.iter().zip(&self.totals) {
            let r = Rational::new(BigInt::from(*b), BigInt::from(*a));
            if count == 0 || r > best {
                best = r;
                count = 1;
            } else if r == best {
                count += 1;
            }
        }
        (best, count)
    }

    pub fn canonical_threshold(&self) -> Threshold {
        self.discrepancies
            .iter()
            .zip(&self.totals)
            .filter(|(_, b)| **b > 0)
            .map(|(a, b)| Rational::new(BigInt::from(*a), BigInt::from(*b)))
            .min()
            .map_or(Threshold::Infinite, Threshold::Finite)
    }

    /// Drops points of multiplicity zero. By the proximity inequality their
    /// descendants have multiplicity zero as well, so nothing dangles.
    pub fn pruned(&self) -> Self {
        if self.points.iter().all(|p| p.multiplicity > 0) {
            return self.clone();
        }
        Cluster::new(
            self.points
                .iter()
                .filter(|p| p.multiplicity > 0)
                .cloned()
                .collect(),
        )
        .expect("pruning zero points keeps a valid cluster")
    }

    fn by_id(&self) -> BTreeMap<&PointId, &ClusterPoint> {
        self.points.iter().map(|p| (&p.id, p)).collect()
    }
}

fn ancestors(
    points: &[ClusterPoint],
    index: &HashMap<&PointId, usize>,
    p: &ClusterPoint,
) -> BTreeSet<PointId> {
    let mut out = BTreeSet::new();
    let mut cur = p.parent.clone();
    while let Some(id) = cur {
        cur = points[index[&id]].parent.clone();
        out.insert(id);
    }
    out
}

/// JSON mirror: `{"points":[{"id":"p1","parent":null,"prox":[],"mult":2}]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterJson {
    pub points: Vec<ClusterPointJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterPointJson {
    pub id: String,
    pub parent: Option<String>,
    #[serde(default)]
    pub prox: Vec<String>,
    pub mult: u32,
}

impl From<&Cluster> for ClusterJson {
    fn from(c: &Cluster) -> Self {
        ClusterJson {
            points: c
                .points
                .iter()
                .map(|p| ClusterPointJson {
                    id: p.id.0.clone(),
                    parent: p.parent.as_ref().map(|q| q.0.clone()),
                    prox: p.proximate_to.iter().map(|q| q.0.clone()).collect(),
                    mult: p.multiplicity,
                })
                .collect(),
        }
    }
}

impl TryFrom<ClusterJson> for Cluster {
    type Error = Error;

    /// Input must already be topologically ordered. The parent may be left
    /// out of `prox`; it is implied.
    fn try_from(j: ClusterJson) -> Result<Self> {
        Cluster::new(
            j.points
                .into_iter()
                .map(|p| {
                    let mut prox: BTreeSet<PointId> = p.prox.into_iter().map(PointId).collect();
                    if let Some(parent) = &p.parent {
                        prox.insert(PointId(parent.clone()));
                    }
                    ClusterPoint {
                        id: PointId(p.id),
                        parent: p.parent.map(PointId),
                        proximate_to: prox,
                        multiplicity: p.mult,
                    }
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use proptest::prelude::*;

    fn chain(mults: &[u32]) -> Cluster {
        let mut pts = vec![ClusterPoint::root("p1", mults[0])];
        for (i, m) in mults.iter().enumerate().skip(1) {
            pts.push(ClusterPoint::child(format!("p{}", i + 1), format!("p{i}"), *m));
        }
        Cluster::new(pts).unwrap()
    }

    fn proper(mults: &[u32]) -> Cluster {
        Cluster::new(
            mults
                .iter()
                .enumerate()
                .map(|(i, m)| ClusterPoint::root(format!("p{}", i + 1), *m))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn discrepancy_examples() {
        assert_eq!(proper(&[1]).discrepancies(), &[1]);
        assert_eq!(chain(&[1, 1]).discrepancies(), &[1, 2]);
        assert_eq!(chain(&[1, 1, 1]).discrepancies(), &[1, 2, 3]);
    }

    #[test]
    fn total_multiplicity_examples() {
        assert_eq!(proper(&[2]).total_multiplicities(), &[2]);
        assert_eq!(chain(&[3, 2]).total_multiplicities(), &[3, 5]);
        assert_eq!(proper(&[1, 1, 1]).total_multiplicities(), &[1, 1, 1]);
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(proper(&[1, 1, 1]).lambda_e(), (int(1), 3));
        assert_eq!(proper(&[4]).lambda_e(), (int(4), 1));
        assert_eq!(chain(&[3, 2]).lambda_e(), (int(3), 1));
        assert_eq!(Cluster::empty().lambda_e(), (int(0), 0));
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(proper(&[2]).canonical_threshold(), Threshold::Finite(rat(1, 2)));
        assert_eq!(proper(&[1, 1, 1]).canonical_threshold(), Threshold::Finite(int(1)));
        assert_eq!(Cluster::empty().canonical_threshold(), Threshold::Infinite);
    }

    #[test]
    fn satellite_discrepancy() {
        // p3 lies on the exceptional curves of p1 and p2.
        let c = Cluster::new(vec![
            ClusterPoint::root("p1", 3),
            ClusterPoint::child("p2", "p1", 2),
            ClusterPoint::child("p3", "p2", 1).also_proximate_to("p1"),
        ])
        .unwrap();
        assert_eq!(c.discrepancies(), &[1, 2, 4]);
        assert_eq!(c.total_multiplicities(), &[3, 5, 9]);
    }

    #[test]
    fn rejects_malformed_clusters() {
        let bad_order = vec![ClusterPoint::child("p2", "p1", 1), ClusterPoint::root("p1", 1)];
        assert!(matches!(Cluster::new(bad_order.clone()), Err(Error::InvalidCluster(_))));
        assert!(Cluster::from_unordered(bad_order).is_ok());
        let cyclic = vec![ClusterPoint::child("p1", "p2", 1), ClusterPoint::child("p2", "p1", 1)];
        assert!(matches!(Cluster::from_unordered(cyclic), Err(Error::InvalidCluster(_))));
        let dup = vec![ClusterPoint::root("p1", 1), ClusterPoint::root("p1", 1)];
        assert!(Cluster::new(dup).is_err());
        let over = vec![
            ClusterPoint::root("p1", 1),
            ClusterPoint::child("p2", "p1", 1),
            ClusterPoint::child("p3", "p1", 1),
        ];
        assert!(Cluster::new(over).is_err());
        let not_ancestor = vec![
            ClusterPoint::root("p1", 2),
            ClusterPoint::root("q", 2),
            ClusterPoint::child("p2", "p1", 1).also_proximate_to("q"),
        ];
        assert!(Cluster::new(not_ancestor).is_err());
    }

    #[test]
    fn pruning_and_set_equality() {
        let c = Cluster::new(vec![
            ClusterPoint::root("p1", 0),
            ClusterPoint::child("p2", "p1", 0),
            ClusterPoint::root("q", 2),
        ])
        .unwrap();
        let pruned = c.pruned();
        assert_eq!(pruned, Cluster::empty().with_root("q", 2));
        let swapped = Cluster::new(vec![ClusterPoint::root("b", 1), ClusterPoint::root("a", 1)]).unwrap();
        let straight = Cluster::new(vec![ClusterPoint::root("a", 1), ClusterPoint::root("b", 1)]).unwrap();
        assert_eq!(swapped, straight);
    }

    #[test]
    fn json_round_trip() {
        let c = chain(&[3, 2]);
        let j = ClusterJson::from(&c);
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(
            text,
            r#"{"points":[{"id":"p1","parent":null,"prox":[],"mult":3},{"id":"p2","parent":"p1","prox":["p1"],"mult":2}]}"#
        );
        let back: ClusterJson = serde_json::from_str(
            r#"{"points":[{"id":"p1","parent":null,"prox":[],"mult":3},{"id":"p2","parent":"p1","mult":2}]}"#,
        )
        .unwrap();
        assert_eq!(Cluster::try_from(back).unwrap(), c);
    }

    impl Cluster {
        fn with_root(self, id: &str, m: u32) -> Self {
            let mut pts = self.into_points();
            pts.push(ClusterPoint::root(id, m));
            Cluster::new(pts).unwrap()
        }
    }

    /// Random valid clusters: each new point is either proper, a free child of
    /// an earlier point, or a satellite of a point and its parent, with
    /// multiplicities chosen so that the proximity inequality holds.
    pub(crate) fn arb_cluster() -> impl Strategy<Value = Cluster> {
        prop::collection::vec((0u8..3, any::<prop::sample::Index>(), 0u32..4), 0..8).prop_map(|spec| {
            let mut pts: Vec<ClusterPoint> = Vec::new();
            for (i, (kind, pick, m)) in spec.into_iter().enumerate() {
                let id = format!("p{i}");
                let cand = if pts.is_empty() { None } else { Some(pick.index(pts.len())) };
                let mut p = match (kind, cand) {
                    (1, Some(j)) => ClusterPoint::child(id, pts[j].id.clone(), 0),
                    (2, Some(j)) if pts[j].parent.is_some() && pts[j].proximate_to.len() == 1 => {
                        let grand = pts[j].parent.clone().unwrap();
                        ClusterPoint::child(id, pts[j].id.clone(), 0).also_proximate_to(grand)
                    }
                    _ => ClusterPoint::root(id, 0),
                };
                // Largest multiplicity that keeps every proximity inequality.
                let room = p
                    .proximate_to
                    .iter()
                    .map(|q| {
                        let host = pts.iter().find(|x| &x.id == q).unwrap();
                        let used: u32 = pts
                            .iter()
                            .filter(|x| x.proximate_to.contains(q))
                            .map(|x| x.multiplicity)
                            .sum();
                        host.multiplicity - used
                    })
                    .min()
                    .unwrap_or(u32::MAX);
                p.multiplicity = m.min(room);
                pts.push(p);
            }
            Cluster::new(pts).unwrap()
        })
    }

    proptest! {
        #[test]
        fn lambda_times_threshold_is_one(c in arb_cluster()) {
            let (lambda, _) = c.lambda_e();
            match c.canonical_threshold() {
                Threshold::Finite(t) => prop_assert_eq!(lambda * t, int(1)),
                Threshold::Infinite => prop_assert!(c.multiplicities().iter().all(|m| *m == 0)),
            }
        }

        #[test]
        fn totals_dominate_multiplicities(c in arb_cluster()) {
            let a = c.discrepancies();
            let b = c.total_multiplicities();
            for (k, p) in c.points().iter().enumerate() {
                prop_assert!(a[k] >= 1);
                prop_assert!(b[k] >= u64::from(p.multiplicity));
                let positive_host = p.proximate_to.iter().any(|q| b[c.position(q).unwrap()] > 0);
                prop_assert_eq!(b[k] == u64::from(p.multiplicity), !positive_host);
            }
        }

        #[test]
        fn roots_carry_the_largest_multiplicity(c in arb_cluster()) {
            let global = c.multiplicities().into_iter().max().unwrap_or(0);
            let roots = c.roots().map(|p| p.multiplicity).max().unwrap_or(0);
            prop_assert_eq!(global, roots);
        }

        #[test]
        fn order_does_not_matter(c in arb_cluster()) {
            let mut pts = c.clone().into_points();
            pts.reverse();
            prop_assert_eq!(Cluster::from_unordered(pts).unwrap(), c);
        }
    }
}
