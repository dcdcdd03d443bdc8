//! Seeded generator of nearby points: vertices are moved, split and merged
//! the way an ε-neighborhood allows, and every draw is checked against the
//! membership predicate before it is handed out.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::closeness::{eps_close_tol, in_neighborhood, CloseMode, Status};
use super::{MarkedCycle, ModuliPoint};
use crate::error::{Error, Result};
use crate::metric_graph::Mark;
use crate::rational::{frac, from_f64_with_den, half, Rational};

/// Turn displacements are multiples of `1 / STEP_DEN`.
const STEP_DEN: u64 = 1 << 20;
/// Moves are accepted with this much slack below `alpha`.
const MOVE_FRACTION: f64 = 0.9;
const MOVE_TOLERANCE: f64 = 1e-9;
/// Resolution of the stopping fractions tried by [`NeighborSample::midpoint`].
const GRID: u32 = 1024;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Particle {
    origin: Rational,
    /// Signed turn displacement along the shorter arc, `|d| <= 1/2`.
    displacement: Rational,
    marks: BTreeSet<Mark>,
}

/// A drawn deformation of a point: every vertex of the source spawns one or
/// more particles, each displaced along a short arc.
#[derive(Clone, Debug)]
pub struct NeighborSample {
    particles: Vec<Particle>,
}

impl NeighborSample {
    /// Deterministic in `(x, alpha, seed)`.
    pub fn draw(x: &ModuliPoint, alpha: f64, seed: u64) -> NeighborSample {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let limit = MOVE_FRACTION * alpha;
        let mut particles: Vec<Particle> = Vec::new();
        let mut pinned: Vec<bool> = Vec::new();

        for p in x.points() {
            let mut groups: Vec<BTreeSet<Mark>> = vec![p.marks.clone()];
            if p.marks.len() >= 2 && rng.random_bool(0.4) {
                let k = rng.random_range(2..=p.marks.len().min(3));
                let mut marks: Vec<Mark> = p.marks.iter().copied().collect();
                marks.shuffle(&mut rng);
                groups = vec![BTreeSet::new(); k];
                for (i, m) in marks.into_iter().enumerate() {
                    let g = if i < k { i } else { rng.random_range(0..k) };
                    groups[g].insert(m);
                }
            }
            if rng.random_bool(0.2) {
                groups.push(BTreeSet::new());
            }
            for marks in groups {
                pinned.push(marks.contains(&1));
                particles.push(Particle {
                    origin: p.turn.clone(),
                    displacement: Rational::zero(),
                    marks,
                });
            }
        }

        for (particle, &fixed) in particles.iter_mut().zip(&pinned) {
            if fixed || !rng.random_bool(0.8) {
                continue;
            }
            let scale = [0.02, 0.1, 0.3][rng.random_range(0..3)];
            let mut step = rng.random_range(-1.0..1.0) * alpha * scale;
            for _ in 0..40 {
                let d = from_f64_with_den(step.clamp(-0.25, 0.25), STEP_DEN);
                if d.is_zero() {
                    break;
                }
                let target = frac(&(&particle.origin + &d));
                if eps_close_tol(&particle.origin, &target, limit, CloseMode::Symmetric, MOVE_TOLERANCE)
                    == Status::Inside
                {
                    particle.displacement = d;
                    break;
                }
                step /= 2.0;
            }
        }

        let n = particles.len();
        for i in 0..n {
            if pinned[i] || n < 2 || !rng.random_bool(0.1) {
                continue;
            }
            let j = rng.random_range(0..n);
            if j == i {
                continue;
            }
            let target = particles[j].turn();
            let origin = &particles[i].origin;
            if eps_close_tol(origin, &target, limit, CloseMode::Symmetric, MOVE_TOLERANCE) == Status::Inside {
                particles[i].displacement = signed_gap(origin, &target);
            }
        }

        NeighborSample { particles }
    }

    /// The point reached when every displacement is scaled by `lambda`.
    pub fn realize(&self, lambda: &Rational) -> ModuliPoint {
        MarkedCycle::collect(
            self.particles
                .iter()
                .map(|p| (frac(&(&p.origin + &p.displacement * lambda)), p.marks.clone())),
        )
        .canonical()
    }

    pub fn endpoint(&self) -> ModuliPoint {
        self.realize(&Rational::one())
    }

    /// An intermediate point `m` with `m ∈ N_near(source)` and
    /// `endpoint ∈ N_far(m)`: each particle stops at a fraction of its
    /// displacement, searched on a 1/1024 grid nearest the proportional share
    /// `near / (near + far)`. `None` if some particle admits no such stop.
    pub fn midpoint(&self, near: f64, far: f64) -> Option<ModuliPoint> {
        let share = near / (near + far);
        let mut grid: Vec<u32> = (0..=GRID).collect();
        grid.sort_by(|a, b| {
            let (da, db) = ((*a as f64 / GRID as f64 - share).abs(), (*b as f64 / GRID as f64 - share).abs());
            da.total_cmp(&db)
        });
        let ok = |a: &Rational, b: &Rational, eps: f64| {
            eps_close_tol(a, b, eps, CloseMode::Symmetric, MOVE_TOLERANCE) == Status::Inside
        };
        let mut entries = Vec::with_capacity(self.particles.len());
        for p in &self.particles {
            let end = p.turn();
            let stop = grid.iter().find_map(|&k| {
                let lambda = Rational::new(k.into(), GRID.into());
                let m = frac(&(&p.origin + &p.displacement * lambda));
                (ok(&p.origin, &m, near) && ok(&m, &end, far)).then_some(m)
            })?;
            entries.push((stop, p.marks.clone()));
        }
        Some(MarkedCycle::collect(entries).canonical())
    }
}

impl Particle {
    fn turn(&self) -> Rational {
        frac(&(&self.origin + &self.displacement))
    }
}

/// Signed turn difference `to - from` along the shorter arc.
fn signed_gap(from: &Rational, to: &Rational) -> Rational {
    let d = frac(&(to - from));
    if d > half() {
        d - Rational::one()
    } else {
        d
    }
}

/// Draws a point of `N_alpha(x)`, self-checked with the symmetric predicate.
pub fn sample_neighbor(x: &ModuliPoint, alpha: f64, seed: u64) -> Result<ModuliPoint> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Precondition(format!("alpha must be positive, got {alpha}")));
    }
    let y = NeighborSample::draw(x, alpha, seed).endpoint();
    let verdict = in_neighborhood(x, &y, alpha, CloseMode::Symmetric);
    if !verdict.is_inside() {
        return Err(Error::Generator(format!(
            "sampled {y} is {:?} with respect to N_{alpha}({x})",
            verdict.status
        )));
    }
    Ok(y)
}
