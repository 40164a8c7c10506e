use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::cluster::{ClusterPoint, PointId};

/// Which of the two rulings of `F_0` is currently the fibration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ruling {
    A,
    B,
}

impl Ruling {
    pub fn swapped(self) -> Self {
        match self {
            Ruling::A => Ruling::B,
            Ruling::B => Ruling::A,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Surface {
    P2,
    /// `F_n`; `ruling` is present exactly when `n = 0`.
    Hirzebruch { n: u32, ruling: Option<Ruling> },
}

impl Surface {
    pub fn hirzebruch(n: u32) -> Self {
        Surface::Hirzebruch {
            n,
            ruling: (n == 0).then_some(Ruling::A),
        }
    }

    pub fn f0(ruling: Ruling) -> Self {
        Surface::Hirzebruch {
            n: 0,
            ruling: Some(ruling),
        }
    }

    pub fn is_plane(&self) -> bool {
        matches!(self, Surface::P2)
    }

    /// `N` for `F_N`, `None` for the plane.
    pub fn twist(&self) -> Option<u32> {
        match self {
            Surface::P2 => None,
            Surface::Hirzebruch { n, .. } => Some(*n),
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            Surface::P2 => true,
            Surface::Hirzebruch { n, ruling } => (*n == 0) == ruling.is_some(),
        }
    }

    /// Stable label: `P2`, `F0a`, `F0b`, `F1`, `F2`, ...
    pub fn label(&self) -> String {
        match self {
            Surface::P2 => "P2".into(),
            Surface::Hirzebruch {
                ruling: Some(Ruling::A),
                ..
            } => "F0a".into(),
            Surface::Hirzebruch {
                ruling: Some(Ruling::B),
                ..
            } => "F0b".into(),
            Surface::Hirzebruch { n, ruling: None } => format!("F{n}"),
        }
    }
}

impl fmt::Display for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Incidence data of a point with the ruling structure of `F_N`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Position {
    /// For a proper point: it lies on the negative section. For an infinitely
    /// near point: it lies on the strict transform of that section.
    pub on_negative_section: bool,
    /// Another proper point on the same fiber.
    pub on_fiber_of: Option<PointId>,
    /// Another proper point on the same fiber of the second ruling of `F_0`.
    pub on_cross_fiber_of: Option<PointId>,
}

impl Position {
    pub fn is_general(&self) -> bool {
        *self == Position::default()
    }

    pub fn on_section() -> Self {
        Position {
            on_negative_section: true,
            ..Position::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositionedPoint {
    pub point: ClusterPoint,
    pub on_negative_section: bool,
    pub on_fiber_of: Option<PointId>,
    pub on_cross_fiber_of: Option<PointId>,
}

impl PositionedPoint {
    pub fn general(point: ClusterPoint) -> Self {
        PositionedPoint {
            point,
            on_negative_section: false,
            on_fiber_of: None,
            on_cross_fiber_of: None,
        }
    }

    pub fn with_position(point: ClusterPoint, pos: Position) -> Self {
        PositionedPoint {
            point,
            on_negative_section: pos.on_negative_section,
            on_fiber_of: pos.on_fiber_of,
            on_cross_fiber_of: pos.on_cross_fiber_of,
        }
    }

    pub fn position(&self) -> Position {
        Position {
            on_negative_section: self.on_negative_section,
            on_fiber_of: self.on_fiber_of.clone(),
            on_cross_fiber_of: self.on_cross_fiber_of.clone(),
        }
    }

    pub fn id(&self) -> &PointId {
        &self.point.id
    }
}

/// Groups ids connected by the given links into classes.
pub(crate) fn classes<'a>(
    ids: impl Iterator<Item = &'a PointId>,
    links: impl Iterator<Item = (&'a PointId, &'a PointId)>,
) -> Vec<BTreeSet<PointId>> {
    let mut parent: BTreeMap<PointId, PointId> = ids.map(|i| (i.clone(), i.clone())).collect();
    fn find(parent: &mut BTreeMap<PointId, PointId>, x: &PointId) -> PointId {
        let mut cur = x.clone();
        loop {
            let next = parent[&cur].clone();
            if next == cur {
                return cur;
            }
            cur = next;
        }
    }
    for (a, b) in links {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            parent.insert(hi, lo);
        }
    }
    let mut groups: BTreeMap<PointId, BTreeSet<PointId>> = BTreeMap::new();
    let keys: Vec<PointId> = parent.keys().cloned().collect();
    for k in keys {
        let r = find(&mut parent, &k);
        groups.entry(r).or_default().insert(k);
    }
    groups.into_values().collect()
}
