//! ε-closeness of circle points and membership in ε-neighborhoods.
//!
//! Turn arithmetic is exact. Only the final comparisons of x-coordinates run
//! in `f64`; a strict inequality decided within the tolerance of equality is
//! reported as [`Status::Boundary`] rather than guessed.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{MarkedCycle, ModuliPoint};
use crate::metric_graph::Mark;
use crate::rational::{frac, half, rational, to_f64, Rational};

pub const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CloseMode {
    /// The strip is centered on the first point only.
    Paper,
    /// The strip condition must hold around both points.
    #[default]
    Symmetric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Inside,
    Outside,
    Boundary,
}

impl Status {
    /// Three-valued conjunction.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Outside, _) | (_, Status::Outside) => Status::Outside,
            (Status::Boundary, _) | (_, Status::Boundary) => Status::Boundary,
            _ => Status::Inside,
        }
    }

    /// Three-valued disjunction.
    pub fn or(self, other: Status) -> Status {
        match (self, other) {
            (Status::Inside, _) | (_, Status::Inside) => Status::Inside,
            (Status::Boundary, _) | (_, Status::Boundary) => Status::Boundary,
            _ => Status::Outside,
        }
    }

    fn all(it: impl IntoIterator<Item = Status>) -> Status {
        let mut acc = Status::Inside;
        for s in it {
            acc = acc.and(s);
            if acc == Status::Outside {
                break;
            }
        }
        acc
    }

    fn any(it: impl IntoIterator<Item = Status>) -> Status {
        let mut acc = Status::Outside;
        for s in it {
            acc = acc.or(s);
            if acc == Status::Inside {
                break;
            }
        }
        acc
    }

    /// `margin > 0` decided with tolerance `tol`.
    fn positive(margin: f64, tol: f64) -> Status {
        if margin > tol {
            Status::Inside
        } else if margin < -tol {
            Status::Outside
        } else {
            Status::Boundary
        }
    }
}

/// `cos(2πu)`.
///
/// Evaluated as `sin(2π(1/4 - f))` with `f` the exact fold of `u` into
/// `[0, 1/2]`, so `x(u) = x(1 - u)` and `x(1/2 - u) = -x(u)` hold bitwise
/// and `x(1/4) = 0` exactly.
pub fn x_coord(u: &Rational) -> f64 {
    let u = frac(u);
    let folded = if u > half() { Rational::one() - u } else { u };
    let g = rational(1, 4) - folded;
    (TAU * to_f64(&g)).sin()
}

/// A circle point with the quantities every closeness query needs.
pub(crate) struct Site<'a> {
    turn: &'a Rational,
    x: f64,
    /// Counterclockwise turn distance to `0` and to `1/2`.
    to_zero: Rational,
    to_half: Rational,
}

impl<'a> Site<'a> {
    pub(crate) fn new(turn: &'a Rational) -> Self {
        Site {
            turn,
            x: x_coord(turn),
            to_zero: frac(&-turn),
            to_half: frac(&(half() - turn)),
        }
    }

    /// `[min, max]` of the x-coordinate over the counterclockwise arc of
    /// `length` turns from `self` to `other`.
    fn x_range(&self, other: &Site, length: &Rational) -> (f64, f64) {
        let mut lo = self.x.min(other.x);
        let mut hi = self.x.max(other.x);
        if self.to_zero <= *length {
            hi = 1.0;
        }
        if self.to_half <= *length {
            lo = -1.0;
        }
        (lo, hi)
    }
}

fn strip_status(range: (f64, f64), center: f64, eps: f64, tol: f64) -> Status {
    let (lo, hi) = range;
    Status::positive(center + eps - hi, tol).and(Status::positive(lo - (center - eps), tol))
}

pub fn eps_close(a: &Rational, b: &Rational, eps: f64, mode: CloseMode) -> Status {
    eps_close_tol(a, b, eps, mode, TOLERANCE)
}

/// Whether the shortest arc between turns `a` and `b` stays inside the
/// vertical strip of half-width `eps` around `x(a)` (and, in symmetric mode,
/// around `x(b)` too). When both arcs have length exactly 1/2 either may be
/// used.
pub fn eps_close_tol(a: &Rational, b: &Rational, eps: f64, mode: CloseMode, tol: f64) -> Status {
    if a == b {
        return Status::Inside;
    }
    close_sites(&Site::new(a), &Site::new(b), eps, mode, tol)
}

pub(crate) fn close_sites(a: &Site, b: &Site, eps: f64, mode: CloseMode, tol: f64) -> Status {
    if a.turn == b.turn {
        return Status::Inside;
    }
    let forward = frac(&(b.turn - a.turn));
    let backward = Rational::one() - &forward;
    let judge = |range: (f64, f64)| {
        let around_a = strip_status(range, a.x, eps, tol);
        match mode {
            CloseMode::Paper => around_a,
            CloseMode::Symmetric => around_a.and(strip_status(range, b.x, eps, tol)),
        }
    };
    match forward.cmp(&backward) {
        Ordering::Less => judge(a.x_range(b, &forward)),
        Ordering::Greater => judge(b.x_range(a, &backward)),
        Ordering::Equal => judge(a.x_range(b, &forward)).or(judge(b.x_range(a, &backward))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representative {
    Plain,
    Reflected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodVerdict {
    pub status: Status,
    /// The representative of `y` that satisfied all three conditions.
    pub witness: Option<Representative>,
}

impl NeighborhoodVerdict {
    pub fn is_inside(&self) -> bool {
        self.status == Status::Inside
    }
}

/// Whether `y ∈ N_eps(x)`.
pub fn in_neighborhood(x: &ModuliPoint, y: &ModuliPoint, eps: f64, mode: CloseMode) -> NeighborhoodVerdict {
    membership(x, y, eps, &|a, b, e| close_sites(a, b, e, mode, TOLERANCE))
}

/// Membership with a caller-supplied closeness predicate
/// `close(center, other, eps)`.
///
/// `x`'s canonical representative is held fixed and both representatives
/// of `y` are tried; reflecting both graphs at once changes nothing.
pub fn in_neighborhood_by(
    x: &ModuliPoint,
    y: &ModuliPoint,
    eps: f64,
    close: &dyn Fn(&Rational, &Rational, f64) -> Status,
) -> NeighborhoodVerdict {
    membership(x, y, eps, &|a, b, e| close(a.turn, b.turn, e))
}

type SiteClose<'c> = dyn Fn(&Site, &Site, f64) -> Status + 'c;

fn membership(x: &ModuliPoint, y: &ModuliPoint, eps: f64, close: &SiteClose) -> NeighborhoodVerdict {
    let g = Sited::new(x.cycle());
    let reflected = y.cycle().reflect();
    let mut best = Status::Outside;
    for (rep, h) in [(Representative::Plain, y.cycle()), (Representative::Reflected, &reflected)] {
        let status = conditions(&g, &Sited::new(h), eps, close);
        if status == Status::Inside {
            return NeighborhoodVerdict {
                status,
                witness: Some(rep),
            };
        }
        best = best.or(status);
    }
    NeighborhoodVerdict {
        status: best,
        witness: None,
    }
}

struct Sited<'a> {
    sites: Vec<Site<'a>>,
    /// `(mark, index into sites)`, sorted by mark.
    marks: Vec<(Mark, usize)>,
}

impl<'a> Sited<'a> {
    fn new(c: &'a MarkedCycle) -> Self {
        let sites = c.points().iter().map(|p| Site::new(&p.turn)).collect();
        let mut marks: Vec<(Mark, usize)> = c
            .points()
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.marks.iter().map(move |&m| (m, i)))
            .collect();
        marks.sort_unstable();
        Sited { sites, marks }
    }
}

fn conditions(g: &Sited, h: &Sited, eps: f64, close: &SiteClose) -> Status {
    if g.marks.len() != h.marks.len() || g.marks.iter().zip(&h.marks).any(|(a, b)| a.0 != b.0) {
        return Status::Outside;
    }
    // (1) equally labelled vertices
    let labelled = Status::all(
        g.marks
            .iter()
            .zip(&h.marks)
            .map(|(&(_, i), &(_, j))| close(&g.sites[i], &h.sites[j], eps)),
    );
    if labelled == Status::Outside {
        return labelled;
    }
    // (2) every vertex of H has a partner in G
    let h_covered = Status::all(
        h.sites
            .iter()
            .map(|p| Status::any(g.sites.iter().map(|q| close(p, q, eps)))),
    );
    if h_covered == Status::Outside {
        return h_covered;
    }
    // (3) every vertex of G has a partner in H
    let g_covered = Status::all(
        g.sites
            .iter()
            .map(|q| Status::any(h.sites.iter().map(|p| close(q, p, eps)))),
    );
    labelled.and(h_covered).and(g_covered)
}

/// `y ∈ N_eps2(x)` and `z ∈ N_eps1(y)` imply `z ∈ N_{eps1+eps2}(x)`
/// (symmetric closeness). Vacuously true when the premise fails.
pub fn additivity_witness_check(x: &ModuliPoint, y: &ModuliPoint, z: &ModuliPoint, eps1: f64, eps2: f64) -> bool {
    let mode = CloseMode::Symmetric;
    if !in_neighborhood(x, y, eps2, mode).is_inside() || !in_neighborhood(y, z, eps1, mode).is_inside() {
        return true;
    }
    in_neighborhood(x, z, eps1 + eps2, mode).is_inside()
}
