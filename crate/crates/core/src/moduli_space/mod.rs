//! Marked cycles of total length 1 and their classes modulo reflection.
//!
//! A cycle is drawn on the unit circle. Positions are *turns*: the rational
//! fraction of a counterclockwise revolution measured from `(1, 0)`, so the
//! vertex carrying mark 1 always sits at turn `1/2`, the point `(-1, 0)`.
//! The upper half-circle is `u ∈ (0, 1/2)`.

mod closeness;
mod sampler;

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric_graph::{Edge, Mark, MetricGraph, Vertex};
use crate::rational::{self, frac, half, Rational};

pub use closeness::{
    additivity_witness_check, eps_close, eps_close_tol, in_neighborhood, in_neighborhood_by, x_coord, CloseMode,
    NeighborhoodVerdict, Representative, Status, TOLERANCE,
};
pub use sampler::{sample_neighbor, NeighborSample};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CyclePoint {
    #[serde(with = "crate::rational")]
    pub turn: Rational,
    #[serde(default)]
    pub marks: BTreeSet<Mark>,
}

impl CyclePoint {
    pub fn new(turn: Rational, marks: impl IntoIterator<Item = Mark>) -> Self {
        Self {
            turn,
            marks: marks.into_iter().collect(),
        }
    }

    pub fn is_marked(&self) -> bool {
        !self.marks.is_empty()
    }
}

/// A point of the space of marked unit cycles, in one of its two
/// representatives. Points are kept sorted by turn.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MarkedCycle {
    points: Vec<CyclePoint>,
}

impl MarkedCycle {
    /// Sorts `points` by turn and checks every invariant.
    pub fn new(mut points: Vec<CyclePoint>) -> Result<Self> {
        points.sort();
        let bad = |msg: String| Err(Error::InvalidCycle(msg));
        for w in points.windows(2) {
            if w[0].turn == w[1].turn {
                return bad(format!("two points at turn {}", w[0].turn));
            }
        }
        let mut owner: BTreeMap<Mark, &Rational> = BTreeMap::new();
        for p in &points {
            if p.turn < Rational::zero() || p.turn >= Rational::one() {
                return bad(format!("turn {} is outside [0, 1)", p.turn));
            }
            for &m in &p.marks {
                if m == 0 {
                    return bad("mark 0 is not a positive label".into());
                }
                if owner.insert(m, &p.turn).is_some() {
                    return bad(format!("mark {m} appears twice"));
                }
            }
        }
        match owner.get(&1) {
            None => return bad("mark 1 is missing".into()),
            Some(t) if **t != half() => return bad(format!("mark 1 sits at turn {t}, expected 1/2")),
            _ => {}
        }
        let n = *owner.keys().next_back().expect("mark 1 present");
        if owner.len() as Mark != n {
            let missing = (1..=n).find(|m| !owner.contains_key(m)).expect("gap exists");
            return bad(format!("mark {missing} is missing (marks must be 1..{n})"));
        }
        Ok(Self { points })
    }

    /// Builds from `(turn, marks)` pairs with turns written as `"p/q"`.
    pub fn from_turns(spec: &[(&str, &[Mark])]) -> Result<Self> {
        let points = spec
            .iter()
            .map(|(t, m)| Ok(CyclePoint::new(rational::parse_rational(t)?, m.iter().copied())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub(crate) fn from_sorted(points: Vec<CyclePoint>) -> Self {
        debug_assert!(points.windows(2).all(|w| w[0].turn < w[1].turn));
        Self { points }
    }

    /// Groups `(turn, marks)` entries by turn, uniting mark sets.
    pub(crate) fn collect<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (Rational, BTreeSet<Mark>)>,
    {
        let mut by_turn: BTreeMap<Rational, BTreeSet<Mark>> = BTreeMap::new();
        for (t, marks) in entries {
            by_turn.entry(t).or_default().extend(marks);
        }
        Self::from_sorted(by_turn.into_iter().map(|(turn, marks)| CyclePoint { turn, marks }).collect())
    }

    pub fn points(&self) -> &[CyclePoint] {
        &self.points
    }

    pub fn mark_count(&self) -> Mark {
        self.points.iter().flat_map(|p| p.marks.iter().copied()).max().unwrap_or(0)
    }

    pub fn turn_of_mark(&self, mark: Mark) -> Option<&Rational> {
        self.points.iter().find(|p| p.marks.contains(&mark)).map(|p| &p.turn)
    }

    /// Reflection across the x-axis: `u ↦ (1 - u) mod 1`.
    pub fn reflect(&self) -> MarkedCycle {
        let mut points: Vec<CyclePoint> = self
            .points
            .iter()
            .map(|p| CyclePoint {
                turn: frac(&(Rational::one() - &p.turn)),
                marks: p.marks.clone(),
            })
            .collect();
        points.sort();
        Self { points }
    }

    pub fn canonical(&self) -> ModuliPoint {
        let r = self.reflect();
        if r.points < self.points {
            ModuliPoint(r)
        } else {
            ModuliPoint(self.clone())
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Raw {
            points: Vec<RawPoint>,
        }
        #[derive(Deserialize)]
        struct RawPoint {
            turn: String,
            #[serde(default)]
            marks: Vec<Mark>,
        }
        let raw: Raw = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut points = Vec::with_capacity(raw.points.len());
        for p in raw.points {
            let marks: BTreeSet<Mark> = p.marks.iter().copied().collect();
            if marks.len() != p.marks.len() {
                return Err(Error::Parse(format!("point at turn {} lists a mark twice", p.turn)));
            }
            points.push(CyclePoint {
                turn: rational::parse_rational(&p.turn)?,
                marks,
            });
        }
        Self::new(points)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cycle serializes")
    }
}

impl std::fmt::Display for MarkedCycle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            let marks: Vec<String> = p.marks.iter().map(|m| m.to_string()).collect();
            write!(f, "{}:{{{}}}", p.turn, marks.join(","))?;
        }
        f.write_str("}")
    }
}

/// The canonical representative of a reflection class: whichever of the
/// cycle and its reflection has the smaller turn-ascending encoding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ModuliPoint(MarkedCycle);

impl ModuliPoint {
    pub fn cycle(&self) -> &MarkedCycle {
        &self.0
    }

    pub fn into_cycle(self) -> MarkedCycle {
        self.0
    }

    /// Parses a cycle and canonicalizes it.
    pub fn from_json(s: &str) -> Result<Self> {
        MarkedCycle::from_json(s).map(|c| c.canonical())
    }

    pub fn to_json(&self) -> String {
        self.0.to_json()
    }
}

impl std::ops::Deref for ModuliPoint {
    type Target = MarkedCycle;

    fn deref(&self) -> &MarkedCycle {
        &self.0
    }
}

impl std::fmt::Display for ModuliPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

pub fn reflect(c: &MarkedCycle) -> MarkedCycle {
    c.reflect()
}

pub fn canonical_form(c: &MarkedCycle) -> ModuliPoint {
    c.canonical()
}

pub fn iso_equal(a: &MarkedCycle, b: &MarkedCycle) -> bool {
    a.canonical() == b.canonical()
}

/// Rescales a bridge-free genus-1 graph to a unit cycle.
///
/// Walks the cycle from the mark-1 vertex; each vertex at arc distance `d`
/// lands on turn `1/2 + d / total`. Returns the class and the total length.
pub fn normalize(g: &MetricGraph) -> Result<(ModuliPoint, Rational)> {
    g.ensure_valid()?;
    let not_cycle = |why: &str| Err(Error::Domain(format!("not a bridge-free genus-1 cycle: {why}")));
    if !g.is_connected() {
        return not_cycle("disconnected");
    }
    if g.genus()? != 1 {
        return not_cycle("genus is not 1");
    }
    if let Some(v) = g.vertices.iter().find(|v| g.valency(&v.id) != 2) {
        return not_cycle(&format!("vertex {} has valency {}", v.id, g.valency(&v.id)));
    }
    let Some(start) = g.vertices.iter().find(|v| v.marks.contains(&1)) else {
        return Err(Error::Domain("normalization needs at least one mark".into()));
    };
    let total = g.total_length()?;

    let mut entries = vec![(half(), start.marks.clone())];
    let mut current = start.id.as_str();
    let mut via: Option<&str> = None;
    let mut dist = Rational::zero();
    loop {
        let e = g
            .incident_edges(current)
            .find(|e| Some(e.id.as_str()) != via)
            .expect("valency-2 vertex has a second edge");
        dist += &e.length;
        let next = e.other_end(current).expect("incident edge");
        if next == start.id {
            break;
        }
        let v = g.vertex(next).expect("endpoint exists");
        entries.push((frac(&(half() + &dist / &total)), v.marks.clone()));
        current = next;
        via = Some(e.id.as_str());
    }
    Ok((MarkedCycle::collect(entries).canonical(), total))
}

/// The cycle graph with vertices `v0, v1, …` in turn order and edge `ei`
/// joining `vi` to its successor, of length `gap · total`.
pub fn denormalize(p: &ModuliPoint, total: &Rational) -> Result<MetricGraph> {
    if *total <= Rational::zero() {
        return Err(Error::Domain(format!("total length {total} must be positive")));
    }
    let pts = p.points();
    let k = pts.len();
    let vertices = pts
        .iter()
        .enumerate()
        .map(|(i, q)| Vertex {
            id: format!("v{i}"),
            marks: q.marks.clone(),
        })
        .collect();
    let edges = (0..k)
        .map(|i| {
            let j = (i + 1) % k;
            let mut gap = frac(&(&pts[j].turn - &pts[i].turn));
            if gap.is_zero() {
                gap = Rational::one();
            }
            Edge {
                id: format!("e{i}"),
                ends: [format!("v{i}"), format!("v{j}")],
                length: gap * total,
            }
        })
        .collect();
    Ok(MetricGraph { vertices, edges })
}

/// A vertex sits at `(1, 0)` and every other vertex is marked.
pub fn is_in_y(p: &MarkedCycle) -> bool {
    p.points.iter().any(|q| q.turn.is_zero()) && p.points.iter().all(|q| q.turn.is_zero() || q.is_marked())
}

/// Forgets an unmarked vertex at `(1, 0)`.
pub fn to_tropical_point(p: &ModuliPoint) -> Result<ModuliPoint> {
    if !is_in_y(p) {
        return Err(Error::Domain(format!("{p} is not in the retract subspace")));
    }
    let points = p.points();
    if points.len() > 1 && !points[0].is_marked() {
        debug_assert!(points[0].turn.is_zero());
        return Ok(MarkedCycle::from_sorted(points[1..].to_vec()).canonical());
    }
    Ok(p.clone())
}

/// Every vertex is marked (stability on a cycle, where valency is 2).
pub fn is_tropical_point(p: &MarkedCycle) -> bool {
    p.points.iter().all(CyclePoint::is_marked)
}
