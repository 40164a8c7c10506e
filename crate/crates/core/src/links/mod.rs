//! Elementary links between the plane and Hirzebruch surfaces, the untwisting
//! loop that factors a homaloidal type into links, and its inverse.
//!
//! Every link returns the new state together with the exact link that undoes
//! it, so a trace can be replayed backwards from the identity.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::rational::format_rational;
use crate::algebra::Rational;
use crate::cluster::{ClusterPoint, PointId};
use crate::error::{Error, Result};
use crate::marked::{
    Classification, HomaloidalType, MarkedSystem, PositionedPoint, Ruling, SarkisovDegree, Surface,
};

/// A point of multiplicity zero used as a link center.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreshPoint {
    pub id: PointId,
    pub on_negative_section: bool,
    pub on_fiber_of: Option<PointId>,
    pub on_cross_fiber_of: Option<PointId>,
}

impl FreshPoint {
    pub fn general(id: impl Into<PointId>) -> Self {
        FreshPoint {
            id: id.into(),
            on_negative_section: false,
            on_fiber_of: None,
            on_cross_fiber_of: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Center {
    /// A proper base point of the current cluster.
    Point(PointId),
    Fresh(FreshPoint),
}

impl Center {
    pub fn id(&self) -> &PointId {
        match self {
            Center::Point(id) => id,
            Center::Fresh(f) => &f.id,
        }
    }
}

impl From<&str> for Center {
    fn from(s: &str) -> Self {
        Center::Point(PointId::from(s))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Link {
    /// Blow up a point of the plane, landing on `F_1`.
    A { center: Center },
    /// Contract the negative section of `F_1`; the image point gets `new_point`.
    AInv { new_point: PointId },
    /// Elementary transformation at `center`; the contracted fiber becomes
    /// `new_point`. `landing` names the fibration when the result is `F_0`
    /// (ruling A when absent).
    B {
        center: Center,
        new_point: PointId,
        landing: Option<Ruling>,
    },
    /// Swap the two rulings of `F_0`.
    C,
}

impl Link {
    pub fn name(&self) -> &'static str {
        match self {
            Link::A { .. } => "A",
            Link::AInv { .. } => "AInv",
            Link::B { .. } => "B",
            Link::C => "C",
        }
    }

    pub fn center(&self) -> Option<&PointId> {
        match self {
            Link::A { center } | Link::B { center, .. } => Some(center.id()),
            Link::AInv { .. } | Link::C => None,
        }
    }
}

/// Mutable working copy of a state's points, used while a link is built.
struct Work {
    pts: Vec<PositionedPoint>,
}

impl Work {
    fn new(ms: &MarkedSystem) -> Self {
        Work {
            pts: ms.positioned_points(),
        }
    }

    fn find(&self, id: &PointId) -> Option<&PositionedPoint> {
        self.pts.iter().find(|p| p.id() == id)
    }

    fn contains(&self, id: &PointId) -> bool {
        self.find(id).is_some()
    }

    fn insert_center(&mut self, center: &Center) -> Result<PositionedPoint> {
        match center {
            Center::Point(id) => {
                let p = self
                    .find(id)
                    .ok_or_else(|| Error::NotProperPoint(format!("{id} (no such point)")))?;
                if !p.point.is_root() {
                    return Err(Error::NotProperPoint(id.to_string()));
                }
                Ok(p.clone())
            }
            Center::Fresh(f) => {
                if self.contains(&f.id) {
                    return Err(Error::InvalidInput(format!(
                        "fresh center {} collides with an existing point",
                        f.id
                    )));
                }
                for other in [&f.on_fiber_of, &f.on_cross_fiber_of].into_iter().flatten() {
                    if !self.find(other).is_some_and(|p| p.point.is_root()) {
                        return Err(Error::InvalidInput(format!(
                            "fresh center {} refers to {other}, which is not a proper point",
                            f.id
                        )));
                    }
                }
                let p = PositionedPoint {
                    point: ClusterPoint::root(f.id.clone(), 0),
                    on_negative_section: f.on_negative_section,
                    on_fiber_of: f.on_fiber_of.clone(),
                    on_cross_fiber_of: f.on_cross_fiber_of.clone(),
                };
                self.pts.push(p.clone());
                Ok(p)
            }
        }
    }

    /// All proper points sharing a (cross) fiber with `id`, including `id`.
    fn class_of(&self, id: &PointId, cross: bool) -> BTreeSet<PointId> {
        let link = |p: &PositionedPoint| {
            if cross {
                p.on_cross_fiber_of.clone()
            } else {
                p.on_fiber_of.clone()
            }
        };
        let mut class = BTreeSet::from([id.clone()]);
        loop {
            let before = class.len();
            for p in &self.pts {
                if let Some(o) = link(p) {
                    if class.contains(p.id()) || class.contains(&o) {
                        class.insert(p.id().clone());
                        class.insert(o);
                    }
                }
            }
            if class.len() == before {
                return class;
            }
        }
    }

    fn check_new_id(&self, id: &PointId) -> Result<()> {
        if self.contains(id) {
            return Err(Error::InvalidInput(format!(
                "new point id {id} collides with an existing point"
            )));
        }
        Ok(())
    }
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

fn small(r: &Rational) -> Option<u32> {
    if r.is_integer() && !r.is_negative() {
        r.numer().to_u32()
    } else {
        None
    }
}

fn wrong_surface(expected: &str, found: Surface) -> Error {
    Error::WrongSurface {
        expected: expected.into(),
        found: found.label(),
    }
}

/// Blow-up of a plane point: `a1 = (3a - nu)/2`, `b1 = 3(nu - a)/2`.
pub fn apply_a(ms: &MarkedSystem, center: &Center) -> Result<(MarkedSystem, Link)> {
    if !ms.surface().is_plane() {
        return Err(wrong_surface("P2", ms.surface()));
    }
    if let Center::Fresh(f) = center {
        if f.on_negative_section || f.on_fiber_of.is_some() || f.on_cross_fiber_of.is_some() {
            return Err(Error::InvalidInput("plane points carry no ruling flags".into()));
        }
    }
    let mut work = Work::new(ms);
    let p = work.insert_center(center)?;
    let pid = p.id().clone();
    let nu = Rational::from_integer(p.point.multiplicity.into());
    let a1 = (Rational::from_integer(3.into()) * ms.a() - &nu) * half();
    let b1 = Rational::from_integer(3.into()) * (&nu - ms.a()) * half();

    let mut out = Vec::with_capacity(work.pts.len());
    for x in work.pts.into_iter().filter(|x| x.id() != &pid) {
        let mut pt = x.point;
        let on_section = pt.proximate_to.remove(&pid);
        if pt.parent.as_ref() == Some(&pid) {
            pt.parent = None;
        }
        out.push(PositionedPoint {
            point: pt,
            on_negative_section: on_section,
            on_fiber_of: None,
            on_cross_fiber_of: None,
        });
    }
    let next = MarkedSystem::new(Surface::hirzebruch(1), a1, b1, out)?;
    Ok((next, Link::AInv { new_point: pid }))
}

/// Contraction of the negative section of `F_1` to a plane point of
/// multiplicity `a + b`: `a' = a + b/3`.
pub fn apply_ainv(ms: &MarkedSystem, new_point: &PointId) -> Result<(MarkedSystem, Link)> {
    if ms.surface() != Surface::hirzebruch(1) {
        return Err(wrong_surface("F1", ms.surface()));
    }
    let work = Work::new(ms);
    work.check_new_id(new_point)?;
    let r = ms.a() + ms.b();
    let r_mult = small(&r).ok_or_else(|| {
        Error::InvalidContraction(format!(
            "a + b = {} is not a nonnegative integer",
            format_rational(&r)
        ))
    })?;
    if work.pts.iter().any(|p| p.on_fiber_of.is_some()) {
        return Err(Error::SpecialPosition(
            "two base points share a fiber; the plane image would make them collinear with the contracted point".into(),
        ));
    }
    let on_section: u32 = work
        .pts
        .iter()
        .filter(|p| p.point.is_root() && p.on_negative_section)
        .map(|p| p.point.multiplicity)
        .sum();
    if on_section > r_mult {
        return Err(Error::InvalidContraction(format!(
            "points on the section carry multiplicity {on_section} > a + b = {r_mult}"
        )));
    }
    let a2 = ms.a() + ms.b() / Rational::from_integer(3.into());
    let mut out = vec![PositionedPoint::general(ClusterPoint::root(new_point.clone(), r_mult))];
    for x in work.pts {
        let mut pt = x.point;
        if x.on_negative_section {
            if pt.is_root() {
                pt.parent = Some(new_point.clone());
            }
            pt.proximate_to.insert(new_point.clone());
        }
        out.push(PositionedPoint::general(pt));
    }
    let next = MarkedSystem::new(Surface::P2, a2, Rational::zero(), out)?;
    let inverse_center = if next.cluster().get(new_point).is_some() {
        Center::Point(new_point.clone())
    } else {
        Center::Fresh(FreshPoint::general(new_point.clone()))
    };
    Ok((next, Link::A { center: inverse_center }))
}

/// Elementary transformation of `F_N` at `center`: `a' = a`,
/// `b' = b + a - nu`, and the contracted fiber becomes a point of
/// multiplicity `2a - nu`.
pub fn apply_b(
    ms: &MarkedSystem,
    center: &Center,
    new_point: &PointId,
    landing: Option<Ruling>,
) -> Result<(MarkedSystem, Link)> {
    let Surface::Hirzebruch { n, ruling } = ms.surface() else {
        return Err(wrong_surface("F_N", ms.surface()));
    };
    let mut work = Work::new(ms);
    work.check_new_id(new_point)?;
    if let Center::Fresh(f) = center {
        if &f.id == new_point {
            return Err(Error::InvalidInput("center and new point need distinct ids".into()));
        }
    }
    let p = work.insert_center(center)?;
    let pid = p.id().clone();
    let nu = p.point.multiplicity;
    let two_a = small(&(Rational::from_integer(2.into()) * ms.a()))
        .ok_or_else(|| Error::InvalidState("2a is not an integer".into()))?;
    if nu > two_a {
        return Err(Error::InvalidState(format!(
            "center {pid} has multiplicity {nu} above 2a = {two_a}"
        )));
    }
    let q_mult = two_a - nu;
    if let Some(s) = work
        .pts
        .iter()
        .find(|x| x.point.proximate_to.contains(&pid) && x.point.parent.as_ref() != Some(&pid))
    {
        return Err(Error::SpecialPosition(format!(
            "{} is a satellite of the center {pid}",
            s.id()
        )));
    }
    let mut fiber = work.class_of(&pid, false);
    fiber.remove(&pid);
    let fiber_load: u32 = work
        .pts
        .iter()
        .filter(|x| fiber.contains(x.id()))
        .map(|x| x.point.multiplicity)
        .sum();
    if fiber_load > q_mult {
        return Err(Error::SpecialPosition(format!(
            "points on the fiber through {pid} exceed the multiplicity {q_mult} of the contracted fiber"
        )));
    }
    let mut cross = if n == 0 {
        work.class_of(&pid, true)
    } else {
        BTreeSet::new()
    };
    cross.remove(&pid);

    let target = match (n, p.on_negative_section) {
        (0, _) => 1,
        (_, true) => n + 1,
        (_, false) => n - 1,
    };
    let landing_f0 = target == 0;
    let q_on_section = n > 0 && !p.on_negative_section;

    let mut out = Vec::with_capacity(work.pts.len() + 1);
    let mut q_fiber_mates = Vec::new();
    let mut q_cross_mates = Vec::new();
    for x in work.pts.iter().filter(|x| x.id() != &pid) {
        let mut pt = x.point.clone();
        let has_cross = n == 0 && work.class_of(x.id(), true).len() > 1;
        let mut np = PositionedPoint::general(pt.clone());
        if fiber.contains(x.id()) {
            if has_cross {
                return Err(Error::SpecialPosition(format!(
                    "{} lies on both rulings through points of the contracted fiber",
                    x.id()
                )));
            }
            if landing_f0 && x.on_negative_section {
                return Err(Error::SpecialPosition(format!(
                    "{} would become infinitely near along a fiber of the second ruling",
                    x.id()
                )));
            }
            pt.parent = Some(new_point.clone());
            pt.proximate_to = BTreeSet::from([new_point.clone()]);
            np.point = pt;
            np.on_negative_section = x.on_negative_section;
        } else if pt.parent.as_ref() == Some(&pid) {
            pt.parent = None;
            pt.proximate_to.clear();
            np.point = pt;
            np.on_negative_section = x.on_negative_section;
            np.on_fiber_of = Some(new_point.clone());
            if x.point.multiplicity > 0 {
                q_fiber_mates.push(x.id().clone());
            }
        } else {
            np.on_fiber_of = x.on_fiber_of.clone();
            if n == 0 {
                if cross.contains(x.id()) {
                    np.on_negative_section = true;
                } else if has_cross {
                    return Err(Error::SpecialPosition(format!(
                        "{} shares a fiber of the second ruling away from the center; F1 cannot record it",
                        x.id()
                    )));
                }
            } else if landing_f0 && x.on_negative_section {
                if !x.point.is_root() {
                    return Err(Error::SpecialPosition(format!(
                        "{} is infinitely near along the section, which becomes a fiber of the second ruling",
                        x.id()
                    )));
                }
                np.on_cross_fiber_of = Some(new_point.clone());
                if x.point.multiplicity > 0 {
                    q_cross_mates.push(x.id().clone());
                }
            } else {
                np.on_negative_section = x.on_negative_section;
            }
        }
        out.push(np);
    }
    let q = PositionedPoint {
        point: ClusterPoint::root(new_point.clone(), q_mult),
        on_negative_section: q_on_section && !landing_f0,
        on_fiber_of: None,
        on_cross_fiber_of: None,
    };
    out.push(q);

    let surface = if landing_f0 {
        Surface::f0(landing.unwrap_or(Ruling::A))
    } else {
        Surface::hirzebruch(target)
    };
    let b2 = ms.b() + ms.a() - Rational::from_integer(nu.into());
    let next = MarkedSystem::new(surface, ms.a().clone(), b2, out)?;

    let inverse_center = if q_mult > 0 {
        Center::Point(new_point.clone())
    } else {
        Center::Fresh(FreshPoint {
            id: new_point.clone(),
            on_negative_section: q_on_section && !landing_f0,
            on_fiber_of: q_fiber_mates.into_iter().next(),
            on_cross_fiber_of: q_cross_mates.into_iter().next(),
        })
    };
    let inverse = Link::B {
        center: inverse_center,
        new_point: pid,
        landing: if n == 0 { ruling } else { None },
    };
    Ok((next, inverse))
}

/// Ruling swap of `F_0`: `(a, b) -> (a + b/2, -b)`.
pub fn apply_c(ms: &MarkedSystem) -> Result<(MarkedSystem, Link)> {
    let Surface::Hirzebruch { n: 0, ruling: Some(r) } = ms.surface() else {
        return Err(wrong_surface("F0", ms.surface()));
    };
    let out = ms
        .positioned_points()
        .into_iter()
        .map(|mut p| {
            std::mem::swap(&mut p.on_fiber_of, &mut p.on_cross_fiber_of);
            p
        })
        .collect();
    let a2 = ms.a() + ms.b() * half();
    let b2 = -ms.b().clone();
    let next = MarkedSystem::new(Surface::f0(r.swapped()), a2, b2, out)?;
    Ok((next, Link::C))
}

/// Applies any link, returning the new state and the inverse link.
pub fn apply_link(ms: &MarkedSystem, link: &Link) -> Result<(MarkedSystem, Link)> {
    match link {
        Link::A { center } => apply_a(ms, center),
        Link::AInv { new_point } => apply_ainv(ms, new_point),
        Link::B {
            center,
            new_point,
            landing,
        } => apply_b(ms, center, new_point, *landing),
        Link::C => apply_c(ms),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub link: Link,
    pub state_before: MarkedSystem,
    pub state_after: MarkedSystem,
    /// Degree of `state_after`.
    pub degree: SarkisovDegree,
    pub inverse: Link,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkTrace {
    pub input: HomaloidalType,
    pub steps: Vec<TraceStep>,
}

impl LinkTrace {
    pub fn link_names(&self) -> Vec<&'static str> {
        self.steps.iter().map(|s| s.link.name()).collect()
    }

    pub fn to_json(&self) -> Vec<TraceStepJson> {
        self.steps
            .iter()
            .map(|s| TraceStepJson {
                link: s.link.name(),
                center: s.link.center().map(|c| c.to_string()),
                surface_after: s.state_after.surface().label(),
                a: format_rational(s.state_after.a()),
                b: format_rational(s.state_after.b()),
                degree: (
                    format_rational(&s.degree.mu),
                    format_rational(&s.degree.lambda),
                    s.degree.e,
                ),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStepJson {
    pub link: &'static str,
    pub center: Option<String>,
    pub surface_after: String,
    pub a: String,
    pub b: String,
    pub degree: (String, String, u32),
}

/// Hands out ids `e1, e2, ...` that avoid a reserved set.
struct FreshIds {
    used: BTreeSet<PointId>,
    next: u64,
}

impl FreshIds {
    fn take(&mut self) -> PointId {
        loop {
            self.next += 1;
            let id = PointId(format!("e{}", self.next));
            if self.used.insert(id.clone()) {
                return id;
            }
        }
    }
}

fn violation(msg: String) -> Error {
    Error::InternalInvariantViolation(msg)
}

/// Untwists a homaloidal type down to the identity.
///
/// On the plane the largest point above `a` is blown up; on `F_N` points above
/// `a` are removed by elementary transformations, largest first; once none is
/// left the fiber coefficient is negative and the section is contracted
/// (`N = 1`) or the rulings swapped (`N = 0`).
pub fn factorize(t: &HomaloidalType) -> Result<LinkTrace> {
    let mut state = MarkedSystem::from_homaloidal(t)?;
    let mut ids = FreshIds {
        used: t.cluster.points().iter().map(|p| p.id.clone()).collect(),
        next: 0,
    };
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut degree = state.sarkisov_degree();
    let mut last_plane_degree = state.plane_degree();
    loop {
        let class = state.classify().map_err(|e| violation(format!("classify failed: {e}")))?;
        let certified = state.noether_fano_certificate();
        if certified != (class == Classification::Isomorphism) {
            return Err(violation(format!(
                "certificate {certified} disagrees with classification {class:?} at {}",
                state.summary()
            )));
        }
        let link = match (class, state.surface()) {
            (Classification::Isomorphism, _) => break,
            (Classification::MaxSingularity(p), Surface::P2) => Link::A {
                center: Center::Point(p),
            },
            (Classification::MaxSingularity(p), _) => Link::B {
                center: Center::Point(p),
                new_point: ids.take(),
                landing: None,
            },
            (Classification::NegativeFiberCoeff, Surface::Hirzebruch { n, .. }) => {
                // s.H = (2 - N) a + b must satisfy 0 <= s.H < (2 - N) a, which
                // forces N <= 1.
                let two_minus_n = Rational::from_integer(BigInt::from(2) - BigInt::from(n));
                let s_dot_h = &two_minus_n * state.a() + state.b();
                if s_dot_h.is_negative() || s_dot_h >= two_minus_n * state.a() || n > 1 {
                    return Err(violation(format!(
                        "index bound 0 <= s.H < (2 - N) a fails at {}",
                        state.summary()
                    )));
                }
                if n == 1 {
                    Link::AInv {
                        new_point: ids.take(),
                    }
                } else {
                    Link::C
                }
            }
            (Classification::NegativeFiberCoeff, Surface::P2) => {
                return Err(violation("negative fiber coefficient on the plane".into()))
            }
        };
        let (next, inverse) = apply_link(&state, &link)?;
        let next_degree = next.sarkisov_degree();
        if next_degree >= degree {
            return Err(violation(format!(
                "degree did not decrease: {degree} -> {next_degree} after {}",
                link.name()
            )));
        }
        if let Some(nd) = next.plane_degree() {
            if last_plane_degree.is_some_and(|prev| nd >= prev) {
                return Err(violation(format!(
                    "plane degree did not drop between plane visits: {last_plane_degree:?} -> {nd}"
                )));
            }
            last_plane_degree = Some(nd);
        }
        steps.push(TraceStep {
            link,
            state_before: state,
            state_after: next.clone(),
            degree: next_degree.clone(),
            inverse,
        });
        state = next;
        degree = next_degree;
    }
    Ok(LinkTrace {
        input: t.clone(),
        steps,
    })
}

/// Replays a trace backwards from the identity and returns the type it
/// reconstructs. Every intermediate state must match the recorded one.
pub fn recompose(trace: &LinkTrace) -> Result<HomaloidalType> {
    let mut state = MarkedSystem::from_homaloidal(&HomaloidalType::identity())
        .expect("the identity type is valid");
    if let Some(last) = trace.steps.last() {
        if last.state_after != state {
            return Err(Error::InvalidTrace(format!(
                "trace ends at {} instead of the identity",
                last.state_after.summary()
            )));
        }
    }
    for (i, step) in trace.steps.iter().enumerate().rev() {
        if step.state_after != state {
            return Err(Error::InvalidTrace(format!("step {i} does not start where the next one ends")));
        }
        let (prev, _) = apply_link(&state, &step.inverse)
            .map_err(|e| Error::InvalidTrace(format!("inverse of step {i} failed: {e}")))?;
        if prev != step.state_before {
            return Err(Error::InvalidTrace(format!(
                "inverse of step {i} gives {} but the trace recorded {}",
                prev.summary(),
                step.state_before.summary()
            )));
        }
        state = prev;
    }
    state
        .to_homaloidal()
        .ok_or_else(|| Error::InvalidTrace("replay does not end on the plane".into()))
}

/// The type of `chi . Q` where `Q` is the quadratic map based at the three
/// centers: `n' = 2n - nu_i - nu_j - nu_k`, `nu_i' = n - nu_j - nu_k`.
pub fn compose_quadratic(t: &HomaloidalType, centers: &[Center; 3]) -> Result<HomaloidalType> {
    let ids: BTreeSet<&PointId> = centers.iter().map(Center::id).collect();
    if ids.len() != 3 {
        return Err(Error::InvalidInput("the three centers must be distinct".into()));
    }
    let mut nus = [0u32; 3];
    for (k, c) in centers.iter().enumerate() {
        match c {
            Center::Point(id) => {
                let p = t
                    .cluster
                    .get(id)
                    .ok_or_else(|| Error::NotProperPoint(format!("{id} (no such point)")))?;
                if !p.is_root() {
                    return Err(Error::NotProperPoint(id.to_string()));
                }
                if t.cluster.points().iter().any(|x| x.proximate_to.contains(id)) {
                    return Err(Error::SpecialPosition(format!(
                        "center {id} has infinitely near base points"
                    )));
                }
                nus[k] = p.multiplicity;
            }
            Center::Fresh(f) => {
                if t.cluster.get(&f.id).is_some() {
                    return Err(Error::InvalidInput(format!(
                        "fresh center {} collides with an existing point",
                        f.id
                    )));
                }
            }
        }
    }
    let n = i64::from(t.n);
    let sum: i64 = nus.iter().map(|v| i64::from(*v)).sum();
    let n2 = 2 * n - sum;
    if n2 < 1 {
        return Err(Error::InvalidComposition(format!("resulting degree {n2} is below one")));
    }
    let mut new_mults = [0u32; 3];
    for k in 0..3 {
        let v = n - i64::from(nus[(k + 1) % 3]) - i64::from(nus[(k + 2) % 3]);
        new_mults[k] = u32::try_from(v).map_err(|_| {
            Error::InvalidComposition(format!(
                "two centers carry more than n = {n} in total multiplicity"
            ))
        })?;
    }
    let mut points: Vec<ClusterPoint> = t
        .cluster
        .points()
        .iter()
        .filter(|p| !ids.contains(&p.id))
        .cloned()
        .collect();
    for (c, m) in centers.iter().zip(new_mults) {
        points.push(ClusterPoint::root(c.id().clone(), m));
    }
    let cluster = crate::cluster::Cluster::from_unordered(points)?.pruned();
    let out = HomaloidalType::new(n2 as u32, cluster);
    if t.validate() && !out.validate() {
        return Err(violation(format!("composition of a valid type gave invalid {out}")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
