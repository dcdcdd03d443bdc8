//! Seeded random instances for property checks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::metric_graph::{Edge, Mark, MetricGraph, Vertex};
use crate::moduli_space::{CyclePoint, MarkedCycle, ModuliPoint};
use crate::rational::{half, int, rational, Rational};
use crate::scanning::ScanParameter;

fn random_turn<R: Rng>(rng: &mut R) -> Rational {
    let den = [2, 3, 4, 5, 6, 8, 12, 16, 24, 36, 60, 97, 360][rng.random_range(0..13)];
    rational(rng.random_range(0..den), den)
}

fn random_length<R: Rng>(rng: &mut R) -> Rational {
    let den = rng.random_range(1..=12);
    rational(rng.random_range(1..=3 * den), den)
}

/// Spreads marks `first..=n` over `slots` places; returns one set per slot.
fn spread_marks<R: Rng>(rng: &mut R, slots: usize, first: Mark, n: Mark) -> Vec<BTreeSet<Mark>> {
    let mut sets = vec![BTreeSet::new(); slots];
    for m in first..=n {
        sets[rng.random_range(0..slots)].insert(m);
    }
    sets
}

/// A point with at most `max_vertices` vertices and `1..=max_marks` marks.
pub fn moduli_point<R: Rng>(rng: &mut R, max_vertices: usize, max_marks: Mark) -> ModuliPoint {
    let n = rng.random_range(1..=max_marks.max(1));
    let k = rng.random_range(1..=max_vertices.max(1));
    let mut turns: BTreeSet<Rational> = BTreeSet::new();
    turns.insert(half());
    let mut tries = 0;
    while turns.len() < k && tries < 100 {
        turns.insert(random_turn(rng));
        tries += 1;
    }
    let turns: Vec<Rational> = turns.into_iter().collect();
    let anchor = turns.iter().position(|t| *t == half()).expect("anchor inserted");
    let mut marks = spread_marks(rng, turns.len(), 2, n);
    marks[anchor].insert(1);
    let points = turns
        .into_iter()
        .zip(marks)
        .map(|(turn, marks)| CyclePoint { turn, marks })
        .collect();
    MarkedCycle::new(points).expect("generated cycle is valid").canonical()
}

pub fn scan_parameter<R: Rng>(rng: &mut R) -> ScanParameter {
    if rng.random_bool(0.1) {
        return ScanParameter::new([int(0), half(), rational(1, 4)][rng.random_range(0..3)].clone()).unwrap();
    }
    let den = rng.random_range(2..=720);
    ScanParameter::new(rational(rng.random_range(0..=den / 2), den)).unwrap()
}

fn shuffled_ids<R: Rng>(rng: &mut R, prefix: &str, count: usize) -> Vec<String> {
    let mut ids: Vec<String> = (0..count).map(|i| format!("{prefix}{i}")).collect();
    ids.shuffle(rng);
    ids
}

/// A connected multigraph with loops and parallel edges allowed.
pub fn connected_multigraph<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize, max_marks: Mark) -> MetricGraph {
    let v = rng.random_range(1..=max_vertices.max(1));
    let min_edges = v - 1;
    let e = rng.random_range(min_edges..=max_edges.max(min_edges));
    let vids = shuffled_ids(rng, "v", v);
    let eids = shuffled_ids(rng, "e", e);
    let mut edges = Vec::with_capacity(e);
    for i in 1..v {
        let j = rng.random_range(0..i);
        edges.push((i, j));
    }
    while edges.len() < e {
        edges.push((rng.random_range(0..v), rng.random_range(0..v)));
    }
    edges.shuffle(rng);
    let n = rng.random_range(0..=max_marks);
    let marks = spread_marks(rng, v, 1, n);
    MetricGraph {
        vertices: vids.iter().zip(marks).map(|(id, marks)| Vertex { id: id.clone(), marks }).collect(),
        edges: edges
            .into_iter()
            .zip(eids)
            .map(|((a, b), id)| Edge::new(id, vids[a].clone(), vids[b].clone(), random_length(rng)))
            .collect(),
    }
}

/// A cycle on `1..=cycle_len` vertices with trees hanging off it, `n ≥ 1`.
pub fn genus_one_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_marks: Mark) -> MetricGraph {
    let total = rng.random_range(1..=max_vertices.max(1));
    let on_cycle = rng.random_range(1..=total);
    let vids = shuffled_ids(rng, "v", total);
    let mut pairs = Vec::new();
    for i in 0..on_cycle {
        pairs.push((i, (i + 1) % on_cycle));
    }
    for i in on_cycle..total {
        pairs.push((i, rng.random_range(0..i)));
    }
    let eids = shuffled_ids(rng, "e", pairs.len());
    let n = rng.random_range(1..=max_marks.max(1));
    let marks = spread_marks(rng, total, 1, n);
    MetricGraph {
        vertices: vids.iter().zip(marks).map(|(id, marks)| Vertex { id: id.clone(), marks }).collect(),
        edges: pairs
            .into_iter()
            .zip(eids)
            .map(|((a, b), id)| {
                let (a, b) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
                Edge::new(id, vids[a].clone(), vids[b].clone(), random_length(rng))
            })
            .collect(),
    }
}

/// A bridge-free genus-1 graph: a plain cycle, `n ≥ 1`.
pub fn cycle_graph<R: Rng>(rng: &mut R, max_vertices: usize, max_marks: Mark) -> MetricGraph {
    let k = rng.random_range(1..=max_vertices.max(1));
    let vids = shuffled_ids(rng, "v", k);
    let eids = shuffled_ids(rng, "e", k);
    let n = rng.random_range(1..=max_marks.max(1));
    let marks = spread_marks(rng, k, 1, n);
    let mut edges: Vec<Edge> = (0..k)
        .map(|i| {
            let (a, b) = (i, (i + 1) % k);
            let (a, b) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
            Edge::new(eids[i].clone(), vids[a].clone(), vids[b].clone(), random_length(rng))
        })
        .collect();
    edges.shuffle(rng);
    MetricGraph {
        vertices: vids.iter().zip(marks).map(|(id, marks)| Vertex { id: id.clone(), marks }).collect(),
        edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_instances_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p = moduli_point(&mut rng, 8, 5);
            assert!(p.points().len() <= 8);
            let g = connected_multigraph(&mut rng, 8, 12, 5);
            assert!(g.validate().is_empty());
            assert!(g.is_connected());
            assert!(g.edges.len() <= 12);
            let h = genus_one_graph(&mut rng, 8, 5);
            assert!(h.validate().is_empty());
            assert!(h.is_connected());
            assert_eq!(h.genus().unwrap(), 1);
            let c = cycle_graph(&mut rng, 8, 5);
            assert_eq!(c.genus().unwrap(), 1);
            assert!(c.vertices.iter().all(|v| c.valency(&v.id) == 2));
        }
    }
}
