//! Seeded random Cremona maps with their types tracked combinatorially.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{compose_with_quadratic, quadratic_from_points, RationalMap, RationalMapJson};
use crate::algebra::{normalize_point, same_point, Matrix3, ProjPoint, Rational};
use crate::cluster::PointId;
use crate::error::{Error, Result};
use crate::links::{compose_quadratic, Center, FreshPoint};
use crate::marked::{HomaloidalType, HomaloidalTypeJson};

/// Attempts allowed for a single quadratic step.
const STEP_BUDGET: usize = 500;

/// A map, its tracked type and the coordinates of its base points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub map: RationalMap,
    pub ty: HomaloidalType,
    pub points: Vec<(PointId, ProjPoint)>,
    /// Centers of the quadratic map composed on the right to reach this
    /// entry from the previous one; `None` for the identity.
    pub centers: Option<[ProjPoint; 3]>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusEntryJson {
    pub map: RationalMapJson,
    #[serde(rename = "type")]
    pub ty: HomaloidalTypeJson,
}

impl CorpusEntry {
    pub fn to_json(&self) -> CorpusEntryJson {
        CorpusEntryJson {
            map: self.map.to_json(),
            ty: self.ty.to_json(),
        }
    }

    pub fn point(&self, id: &PointId) -> Option<&ProjPoint> {
        self.points.iter().find(|(p, _)| p == id).map(|(_, c)| c)
    }
}

fn random_point(rng: &mut ChaCha8Rng, height: i64) -> ProjPoint {
    loop {
        let c: [i64; 3] = std::array::from_fn(|_| rng.random_range(-height..=height));
        if c != [0, 0, 0] {
            return normalize_point(&c.map(|v| Rational::from_integer(v.into()))).expect("nonzero");
        }
    }
}

fn within_height(p: &ProjPoint, height: i64) -> bool {
    let h = num_bigint::BigInt::from(height);
    p.iter().all(|c| c.is_integer() && num_traits::Signed::abs(c.numer()) <= h)
}

fn collinear(a: &ProjPoint, b: &ProjPoint, c: &ProjPoint) -> bool {
    num_traits::Zero::is_zero(&Matrix3::from_columns([a, b, c]).det())
}

/// Composes `k` quadratic involutions at random centers of height at most
/// `height`, starting from the identity. Centers are drawn from the current
/// base points whose coordinates stay within the height bound, or fresh. Returns the `k + 1` maps of the chain, each with its
/// type predicted by the combinatorial rule; the polynomial degree of every
/// map is checked against the prediction. With `max_degree`, steps that
/// would exceed it are redrawn.
pub fn random_corpus(
    seed: u64,
    k: usize,
    height: u64,
    max_degree: Option<u32>,
) -> Result<Vec<CorpusEntry>> {
    if height == 0 {
        return Err(Error::InvalidInput("height must be positive".into()));
    }
    let height = i64::try_from(height).map_err(|_| Error::InvalidInput("height too large".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = CorpusEntry {
        map: RationalMap::identity(),
        ty: HomaloidalType::identity(),
        points: Vec::new(),
        centers: None,
    };
    let mut out = vec![cur.clone()];
    let mut next_id = 1usize;
    for step in 0..k {
        let mut done = false;
        for _ in 0..STEP_BUDGET {
            let mut centers: Vec<(Center, ProjPoint)> = Vec::new();
            let mut fresh_used = next_id;
            let low: Vec<&(PointId, ProjPoint)> = cur
                .points
                .iter()
                .filter(|(_, p)| within_height(p, height))
                .collect();
            for _ in 0..3 {
                let reuse = !low.is_empty() && rng.random_bool(0.6);
                if reuse {
                    let (id, p) = low[rng.random_range(0..low.len())];
                    centers.push((Center::Point(id.clone()), p.clone()));
                } else {
                    let p = random_point(&mut rng, height);
                    let id = PointId(format!("p{fresh_used}"));
                    fresh_used += 1;
                    centers.push((Center::Fresh(FreshPoint::general(id)), p));
                }
            }
            if let Some(entry) = try_step(&cur, &centers, max_degree) {
                cur = entry;
                next_id = fresh_used;
                out.push(cur.clone());
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::CorpusGenerationFailed(format!(
                "no admissible quadratic step {} after {STEP_BUDGET} attempts",
                step + 1
            )));
        }
    }
    Ok(out)
}

fn try_step(
    cur: &CorpusEntry,
    centers: &[(Center, ProjPoint)],
    max_degree: Option<u32>,
) -> Option<CorpusEntry> {
    let pts: Vec<&ProjPoint> = centers.iter().map(|(_, p)| p).collect();
    if collinear(pts[0], pts[1], pts[2]) {
        return None;
    }
    for (c, p) in centers {
        if let Center::Fresh(_) = c {
            if cur.points.iter().any(|(_, q)| same_point(p, q)) {
                return None;
            }
        }
    }
    let center_ids: Vec<&PointId> = centers.iter().map(|(c, _)| c.id()).collect();
    // No other base point on a side of the triangle.
    for (id, q) in &cur.points {
        if center_ids.contains(&id) {
            continue;
        }
        if [(0, 1), (0, 2), (1, 2)]
            .iter()
            .any(|&(i, j)| collinear(pts[i], pts[j], q))
        {
            return None;
        }
    }
    let cs: [Center; 3] = std::array::from_fn(|i| centers[i].0.clone());
    let ty = compose_quadratic(&cur.ty, &cs).ok()?;
    if max_degree.is_some_and(|d| ty.n > d) {
        return None;
    }
    let triple: [ProjPoint; 3] = std::array::from_fn(|i| centers[i].1.clone());
    let map = compose_with_quadratic(&cur.map, &triple).ok()?;
    if map.degree() != ty.n {
        return None;
    }
    let q = quadratic_from_points(&triple[0], &triple[1], &triple[2]).ok()?;
    let mut points = Vec::new();
    for p in ty.cluster.points() {
        let coords = match centers.iter().find(|(c, _)| c.id() == &p.id) {
            Some((_, c)) => c.clone(),
            None => q.apply(&cur.points.iter().find(|(id, _)| id == &p.id)?.1)?,
        };
        points.push((p.id.clone(), coords));
    }
    Some(CorpusEntry {
        map,
        ty,
        points,
        centers: Some(triple),
    })
}
