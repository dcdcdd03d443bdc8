//! Bridges, the shrinking-bridges deformation, tropical stability and the
//! candidate retraction onto stable graphs.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::metric_graph::{Edge, MetricGraph};
use crate::rational::Rational;

/// Edges whose removal increases the number of connected components.
///
/// Low-link DFS over the multigraph. The tree edge is skipped by edge index
/// rather than by parent vertex, so parallel edges are never reported.
pub fn find_bridges(g: &MetricGraph) -> BTreeSet<String> {
    let index: HashMap<&str, usize> = g.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
    let n = g.vertices.len();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (k, e) in g.edges.iter().enumerate() {
        let (Some(&a), Some(&b)) = (index.get(e.ends[0].as_str()), index.get(e.ends[1].as_str())) else {
            continue;
        };
        if a != b {
            adj[a].push((b, k));
            adj[b].push((a, k));
        }
    }

    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut clock = 0;
    let mut bridges = BTreeSet::new();
    // (vertex, edge used to enter it, next adjacency slot)
    let mut stack: Vec<(usize, Option<usize>, usize)> = Vec::new();

    for root in 0..n {
        if disc[root] != UNSEEN {
            continue;
        }
        disc[root] = clock;
        low[root] = clock;
        clock += 1;
        stack.push((root, None, 0));
        while let Some(top) = stack.last_mut() {
            let (v, via, slot) = *top;
            if slot < adj[v].len() {
                top.2 += 1;
                let (u, k) = adj[v][slot];
                if Some(k) == via {
                    continue;
                }
                if disc[u] == UNSEEN {
                    disc[u] = clock;
                    low[u] = clock;
                    clock += 1;
                    stack.push((u, Some(k), 0));
                } else {
                    low[v] = low[v].min(disc[u]);
                }
            } else {
                stack.pop();
                if let (Some(&(parent, _, _)), Some(k)) = (stack.last(), via) {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > disc[parent] {
                        bridges.insert(g.edges[k].id.clone());
                    }
                }
            }
        }
    }
    bridges
}

/// Shrinks every bridge linearly to `(1 - tau)` of its length; at `tau = 1`
/// the bridges are contracted (in id order) and the result is bridge-free.
pub fn shrink_bridges(g: &MetricGraph, tau: &Rational) -> Result<MetricGraph> {
    g.ensure_valid()?;
    if *tau < Rational::zero() || *tau > Rational::one() {
        return Err(Error::Domain(format!("shrink time {tau} is outside [0, 1]")));
    }
    let bridges = find_bridges(g);
    if tau.is_one() {
        let mut h = g.clone();
        for id in &bridges {
            h = h.contract_unchecked(id);
        }
        return Ok(h);
    }
    let factor = Rational::one() - tau;
    let mut h = g.clone();
    for e in h.edges.iter_mut().filter(|e| bridges.contains(&e.id)) {
        e.length = &e.length * &factor;
    }
    Ok(h)
}

/// Every vertex has valency plus number of marks at least 3.
pub fn is_tropically_stable(g: &MetricGraph) -> bool {
    g.vertices.iter().all(|v| g.valency(&v.id) + v.marks.len() >= 3)
}

/// Applies the two rewriting rules until neither applies:
/// contract the edge at every leaf carrying at most one mark, then delete
/// every unmarked valency-2 vertex that has no loop, fusing its two edges.
/// Each pass handles candidates in id order.
pub fn conjectured_retract(g: &MetricGraph) -> Result<MetricGraph> {
    g.ensure_valid()?;
    if !g.is_connected() {
        return Err(Error::Precondition("conjectured retraction needs a connected graph".into()));
    }
    let mut h = g.clone();
    loop {
        let mut changed = false;

        for id in sorted_ids(&h) {
            let Some(v) = h.vertex(&id) else { continue };
            if v.marks.len() <= 1 && h.valency(&id) == 1 {
                let e = h.incident_edges(&id).next().expect("leaf has an edge").id.clone();
                h = h.contract_unchecked(&e);
                changed = true;
            }
        }

        for id in sorted_ids(&h) {
            let Some(v) = h.vertex(&id) else { continue };
            if !v.marks.is_empty() || h.valency(&id) != 2 {
                continue;
            }
            let incident: Vec<&Edge> = h.incident_edges(&id).collect();
            if incident.len() != 2 {
                // a single loop: the vertex is all that holds the cycle
                continue;
            }
            h = fuse_at(&h, &id, incident[0].id.clone(), incident[1].id.clone());
            changed = true;
        }

        if !changed {
            return Ok(h);
        }
    }
}

fn sorted_ids(g: &MetricGraph) -> Vec<String> {
    let mut ids: Vec<String> = g.vertices.iter().map(|v| v.id.clone()).collect();
    ids.sort();
    ids
}

/// Removes valency-2 vertex `v` and replaces its edges `e1`, `e2` with one
/// edge of summed length carrying the smaller id.
fn fuse_at(g: &MetricGraph, v: &str, e1: String, e2: String) -> MetricGraph {
    let first = g.edge(&e1).expect("edge exists");
    let second = g.edge(&e2).expect("edge exists");
    let a = first.other_end(v).expect("incident").to_string();
    let b = second.other_end(v).expect("incident").to_string();
    let fused = Edge {
        id: e1.clone().min(e2.clone()),
        ends: [a, b],
        length: &first.length + &second.length,
    };
    let edges = g
        .edges
        .iter()
        .filter_map(|e| {
            if e.id == fused.id {
                Some(fused.clone())
            } else if e.id == e1 || e.id == e2 {
                None
            } else {
                Some(e.clone())
            }
        })
        .collect();
    let vertices = g.vertices.iter().filter(|x| x.id != v).cloned().collect();
    MetricGraph { vertices, edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_graph::{edge, Vertex};
    use crate::rational::{int, rational};

    fn ids(v: &[&str]) -> BTreeSet<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    /// Component count after deleting each edge in turn.
    fn brute_force_bridges(g: &MetricGraph) -> BTreeSet<String> {
        let base = g.component_count();
        g.edges
            .iter()
            .filter(|e| {
                let mut h = g.clone();
                h.edges.retain(|x| x.id != e.id);
                h.component_count() > base
            })
            .map(|e| e.id.clone())
            .collect()
    }

    fn dumbbell() -> MetricGraph {
        MetricGraph::new(
            vec![Vertex::new("a", [1]), Vertex::new("b", [2])],
            vec![edge("la", "a", "a", 1, 1), edge("br", "a", "b", 2, 1), edge("lb", "b", "b", 1, 1)],
        )
    }

    #[test]
    fn bridges_examples() {
        let path = MetricGraph::new(
            vec![Vertex::new("a", []), Vertex::new("b", []), Vertex::new("c", [])],
            vec![edge("e1", "a", "b", 1, 1), edge("e2", "b", "c", 1, 1)],
        );
        assert_eq!(find_bridges(&path), ids(&["e1", "e2"]));

        let tri = MetricGraph::new(
            vec![Vertex::new("a", []), Vertex::new("b", []), Vertex::new("c", [])],
            vec![edge("e1", "a", "b", 1, 1), edge("e2", "b", "c", 1, 1), edge("e3", "c", "a", 1, 1)],
        );
        assert!(find_bridges(&tri).is_empty());

        let lollipop = MetricGraph::new(
            vec![Vertex::new("a", []), Vertex::new("b", [])],
            vec![edge("l", "a", "a", 1, 1), edge("p", "a", "b", 1, 1)],
        );
        assert_eq!(find_bridges(&lollipop), ids(&["p"]));

        let parallel = MetricGraph::new(
            vec![Vertex::new("a", []), Vertex::new("b", [])],
            vec![edge("p1", "a", "b", 1, 1), edge("p2", "a", "b", 1, 1)],
        );
        assert!(find_bridges(&parallel).is_empty());
    }

    #[test]
    fn bridges_match_brute_force_on_dumbbell_and_forest() {
        let g = dumbbell();
        assert_eq!(find_bridges(&g), brute_force_bridges(&g));
        let forest = MetricGraph::new(
            ["a", "b", "c", "d", "e"].iter().map(|id| Vertex::new(*id, [])).collect(),
            vec![edge("x", "a", "b", 1, 1), edge("y", "c", "d", 1, 1), edge("z", "d", "e", 1, 1), edge("w", "e", "c", 1, 1)],
        );
        assert_eq!(find_bridges(&forest), ids(&["x"]));
        assert_eq!(find_bridges(&forest), brute_force_bridges(&forest));
    }

    #[test]
    fn shrink_half_way() {
        let g = dumbbell();
        let h = shrink_bridges(&g, &rational(1, 2)).unwrap();
        assert_eq!(h.edge("br").unwrap().length, int(1));
        assert_eq!(h.edge("la").unwrap().length, int(1));
        assert_eq!(brute_force_bridges(&h), ids(&["br"]));
    }

    #[test]
    fn shrink_to_end_contracts() {
        let h = shrink_bridges(&dumbbell(), &int(1)).unwrap();
        assert_eq!(h.vertices, vec![Vertex::new("a", [1, 2])]);
        assert_eq!(h.edges.len(), 2);
        assert!(h.edges.iter().all(|e| e.is_loop()));
        assert!(find_bridges(&h).is_empty());
        assert_eq!(h.genus().unwrap(), 2);
    }

    #[test]
    fn shrink_is_identity_without_bridges() {
        let g = MetricGraph::new(
            vec![Vertex::new("a", [1]), Vertex::new("b", [])],
            vec![edge("e1", "a", "b", 1, 3), edge("e2", "a", "b", 2, 3)],
        );
        for tau in [int(0), rational(1, 3), int(1)] {
            assert_eq!(shrink_bridges(&g, &tau).unwrap(), g);
        }
    }

    #[test]
    fn shrink_rejects_bad_time() {
        assert!(matches!(shrink_bridges(&dumbbell(), &rational(3, 2)), Err(Error::Domain(_))));
        assert!(matches!(shrink_bridges(&dumbbell(), &rational(-1, 2)), Err(Error::Domain(_))));
    }

    #[test]
    fn stability_examples() {
        let marked = MetricGraph::new(vec![Vertex::new("a", [1])], vec![edge("e", "a", "a", 1, 1)]);
        assert!(is_tropically_stable(&marked));
        let bare = MetricGraph::new(vec![Vertex::new("a", [])], vec![edge("e", "a", "a", 1, 1)]);
        assert!(!is_tropically_stable(&bare));
        let two = MetricGraph::new(
            vec![Vertex::new("a", [1]), Vertex::new("b", [2])],
            vec![edge("e1", "a", "b", 1, 1), edge("e2", "a", "b", 1, 1)],
        );
        assert!(is_tropically_stable(&two));
    }

    fn marked_triangle() -> MetricGraph {
        MetricGraph::new(
            vec![Vertex::new("a", [1]), Vertex::new("b", [2]), Vertex::new("c", [3])],
            vec![edge("e1", "a", "b", 1, 3), edge("e2", "b", "c", 1, 3), edge("e3", "c", "a", 1, 3)],
        )
    }

    #[test]
    fn retract_contracts_unmarked_leaf() {
        let base = marked_triangle();
        let mut g = base.clone();
        g.vertices.push(Vertex::new("z", []));
        g.edges.push(edge("t", "a", "z", 1, 5));
        let h = conjectured_retract(&g).unwrap();
        assert_eq!(h, base);
        // the single rule application reached a fixpoint
        assert_eq!(conjectured_retract(&h).unwrap(), h);
    }

    #[test]
    fn retract_deletes_unmarked_valency_two() {
        let g = MetricGraph::new(
            vec![Vertex::new("a", [1]), Vertex::new("m", []), Vertex::new("b", [2])],
            vec![edge("e1", "a", "m", 1, 4), edge("e2", "m", "b", 1, 4), edge("e3", "b", "a", 1, 2)],
        );
        let h = conjectured_retract(&g).unwrap();
        assert_eq!(h.vertices.len(), 2);
        assert_eq!(h.edge("e1").unwrap().length, rational(1, 2));
        assert_eq!(h.edge("e1").unwrap().ends, ["a".to_string(), "b".to_string()]);
        assert!(h.edge("e2").is_none());
        assert_eq!(h.total_length().unwrap(), g.total_length().unwrap());
    }

    #[test]
    fn retract_keeps_stable_leaf() {
        let mut g = marked_triangle();
        g.vertices.push(Vertex::new("z", [4, 5]));
        g.edges.push(edge("t", "a", "z", 1, 5));
        assert_eq!(conjectured_retract(&g).unwrap(), g);
    }

    #[test]
    fn retract_keeps_lone_loop_vertex() {
        let g = MetricGraph::new(vec![Vertex::new("a", [])], vec![edge("e", "a", "a", 1, 1)]);
        assert_eq!(conjectured_retract(&g).unwrap(), g);
    }

    #[test]
    fn retract_two_gon_becomes_loop() {
        let g = MetricGraph::new(
            vec![Vertex::new("a", [1]), Vertex::new("b", [])],
            vec![edge("e1", "a", "b", 1, 3), edge("e2", "b", "a", 2, 3)],
        );
        let h = conjectured_retract(&g).unwrap();
        assert_eq!(h.vertices, vec![Vertex::new("a", [1])]);
        assert_eq!(h.edges, vec![edge("e1", "a", "a", 1, 1)]);
    }

    #[test]
    fn retract_folds_chain_of_single_marks() {
        // the tail a - x - y folds onto the cycle vertex one leaf at a time
        let mut g = marked_triangle();
        g.vertices.push(Vertex::new("x", []));
        g.vertices.push(Vertex::new("y", [4]));
        g.edges.push(edge("t1", "a", "x", 1, 5));
        g.edges.push(edge("t2", "x", "y", 1, 5));
        let h = conjectured_retract(&g).unwrap();
        assert_eq!(h.vertices.len(), 3);
        assert_eq!(h.vertex("a").unwrap().marks, [1, 4].into_iter().collect());
        assert!(is_tropically_stable(&h));
        assert_eq!(h.genus().unwrap(), 1);
    }

    #[test]
    fn retract_stops_at_doubly_marked_leaf() {
        let mut g = marked_triangle();
        g.vertices.push(Vertex::new("x", [4]));
        g.vertices.push(Vertex::new("y", [5]));
        g.edges.push(edge("t1", "a", "x", 1, 5));
        g.edges.push(edge("t2", "x", "y", 1, 5));
        let h = conjectured_retract(&g).unwrap();
        assert_eq!(h.vertices.len(), 4);
        assert_eq!(h.vertex("x").unwrap().marks, [4, 5].into_iter().collect());
        assert!(is_tropically_stable(&h));
    }

    #[test]
    fn retract_requires_connected() {
        let g = MetricGraph::new(vec![Vertex::new("a", [1]), Vertex::new("b", [])], vec![]);
        assert!(matches!(conjectured_retract(&g), Err(Error::Precondition(_))));
    }
}
