//! Finite metric multigraphs whose vertices carry mark sets.
//!
//! Loops and parallel edges are allowed. Every edge has a strictly positive
//! rational length, and the labels `1..=n` are spread over the vertices so
//! that each label sits on exactly one vertex.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub type Mark = u32;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    #[serde(default)]
    pub marks: BTreeSet<Mark>,
}

impl Vertex {
    pub fn new(id: impl Into<String>, marks: impl IntoIterator<Item = Mark>) -> Self {
        Self {
            id: id.into(),
            marks: marks.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub ends: [String; 2],
    #[serde(with = "crate::rational")]
    pub length: Rational,
}

impl Edge {
    pub fn new(id: impl Into<String>, a: impl Into<String>, b: impl Into<String>, length: Rational) -> Self {
        Self {
            id: id.into(),
            ends: [a.into(), b.into()],
            length,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.ends[0] == self.ends[1]
    }

    /// The endpoint opposite to `v` (for a loop, `v` itself).
    pub fn other_end(&self, v: &str) -> Option<&str> {
        if self.ends[0] == v {
            Some(&self.ends[1])
        } else if self.ends[1] == v {
            Some(&self.ends[0])
        } else {
            None
        }
    }
}

/// A single invariant violation, tagged with a machine-readable code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "code")]
pub enum Violation {
    NonPositiveLength { edge: String },
    DuplicateVertexId { id: String },
    DuplicateEdgeId { id: String },
    UnknownEndpoint { edge: String, vertex: String },
    InvalidMark { mark: Mark },
    DuplicateMark { mark: Mark },
    MissingMark { mark: Mark },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositiveLength { edge } => write!(f, "edge {edge} has non-positive length"),
            Violation::DuplicateVertexId { id } => write!(f, "vertex id {id} is used twice"),
            Violation::DuplicateEdgeId { id } => write!(f, "edge id {id} is used twice"),
            Violation::UnknownEndpoint { edge, vertex } => {
                write!(f, "edge {edge} references unknown vertex {vertex}")
            }
            Violation::InvalidMark { mark } => write!(f, "mark {mark} is not a positive label"),
            Violation::DuplicateMark { mark } => write!(f, "mark {mark} appears on more than one vertex"),
            Violation::MissingMark { mark } => write!(f, "mark {mark} is missing (marks must be 1..n)"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl MetricGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Self {
        Self { vertices, edges }
    }

    /// Every invariant violation, in a stable order. Empty iff the graph is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v.id.as_str()) {
                out.push(Violation::DuplicateVertexId { id: v.id.clone() });
            }
        }
        let mut seen_edges = BTreeSet::new();
        for e in &self.edges {
            if !seen_edges.insert(e.id.as_str()) {
                out.push(Violation::DuplicateEdgeId { id: e.id.clone() });
            }
            if e.length <= Rational::zero() {
                out.push(Violation::NonPositiveLength { edge: e.id.clone() });
            }
            for end in &e.ends {
                if !seen.contains(end.as_str()) {
                    out.push(Violation::UnknownEndpoint {
                        edge: e.id.clone(),
                        vertex: end.clone(),
                    });
                }
            }
        }
        let mut owners: BTreeMap<Mark, usize> = BTreeMap::new();
        for v in &self.vertices {
            for &m in &v.marks {
                *owners.entry(m).or_default() += 1;
            }
        }
        for (&m, &count) in &owners {
            if m == 0 {
                out.push(Violation::InvalidMark { mark: m });
            } else if count > 1 {
                out.push(Violation::DuplicateMark { mark: m });
            }
        }
        let n = owners.keys().next_back().copied().unwrap_or(0);
        for m in 1..=n {
            if !owners.contains_key(&m) {
                out.push(Violation::MissingMark { mark: m });
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(v))
        }
    }

    /// The number of marks `n`, i.e. the largest label present.
    pub fn mark_count(&self) -> Mark {
        self.vertices
            .iter()
            .filter_map(|v| v.marks.iter().next_back().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    /// Number of edge ends at `id`; a loop counts twice.
    pub fn valency(&self, id: &str) -> usize {
        self.edges
            .iter()
            .map(|e| e.ends.iter().filter(|end| *end == id).count())
            .sum()
    }

    /// Edges touching `id`, in edge-list order (loops once).
    pub fn incident_edges<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.ends[0] == id || e.ends[1] == id)
    }

    /// Connected components as lists of vertex ids, each in vertex-list
    /// order, ordered by their first vertex.
    pub fn components(&self) -> Vec<Vec<String>> {
        let index = self.index();
        let mut dsu = Dsu::new(self.vertices.len());
        for e in &self.edges {
            if let (Some(&a), Some(&b)) = (index.get(e.ends[0].as_str()), index.get(e.ends[1].as_str())) {
                dsu.union(a, b);
            }
        }
        let mut groups: Vec<Vec<String>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let root = dsu.find(i);
            let k = *slot.entry(root).or_insert_with(|| {
                groups.push(Vec::new());
                groups.len() - 1
            });
            groups[k].push(v.id.clone());
        }
        groups
    }

    pub fn component_count(&self) -> usize {
        self.components().len()
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() <= 1
    }

    /// First Betti number `|E| - |V| + #components`.
    pub fn genus(&self) -> Result<usize> {
        self.ensure_valid()?;
        Ok(self.edges.len() + self.component_count() - self.vertices.len())
    }

    pub fn total_length(&self) -> Result<Rational> {
        self.ensure_valid()?;
        if self.edges.is_empty() {
            return Err(Error::Domain("total length of an edgeless graph".into()));
        }
        Ok(self.edges.iter().map(|e| &e.length).sum())
    }

    /// Contracts a non-loop edge. The merged vertex keeps the
    /// lexicographically smaller id and the union of both mark sets.
    pub fn contract_edge(&self, edge_id: &str) -> Result<MetricGraph> {
        self.ensure_valid()?;
        let e = self
            .edge(edge_id)
            .ok_or_else(|| Error::Domain(format!("no edge with id {edge_id}")))?;
        if e.is_loop() {
            return Err(Error::Domain(format!("edge {edge_id} is a loop; contracting it would change the genus")));
        }
        Ok(self.contract_unchecked(edge_id))
    }

    /// Contraction without validation; `edge_id` must name a non-loop edge.
    pub(crate) fn contract_unchecked(&self, edge_id: &str) -> MetricGraph {
        let e = self.edge(edge_id).expect("edge exists");
        let (keep, gone) = if e.ends[0] <= e.ends[1] {
            (e.ends[0].clone(), e.ends[1].clone())
        } else {
            (e.ends[1].clone(), e.ends[0].clone())
        };
        let gone_marks = self.vertex(&gone).map(|v| v.marks.clone()).unwrap_or_default();
        let vertices = self
            .vertices
            .iter()
            .filter(|v| v.id != gone)
            .map(|v| {
                let mut v = v.clone();
                if v.id == keep {
                    v.marks.extend(gone_marks.iter().copied());
                }
                v
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|x| x.id != edge_id)
            .map(|x| {
                let mut x = x.clone();
                for end in x.ends.iter_mut() {
                    if *end == gone {
                        *end = keep.clone();
                    }
                }
                x
            })
            .collect();
        MetricGraph { vertices, edges }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    /// Parses the JSON graph format. Structural invariants are not checked
    /// here; use [`MetricGraph::validate`].
    pub fn from_json(s: &str) -> Result<MetricGraph> {
        #[derive(Deserialize)]
        struct RawVertex {
            id: String,
            #[serde(default)]
            marks: Vec<Mark>,
        }
        #[derive(Deserialize)]
        struct RawGraph {
            vertices: Vec<RawVertex>,
            #[serde(default)]
            edges: Vec<Edge>,
        }
        let raw: RawGraph = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut vertices = Vec::with_capacity(raw.vertices.len());
        for v in raw.vertices {
            let marks: BTreeSet<Mark> = v.marks.iter().copied().collect();
            if marks.len() != v.marks.len() {
                return Err(Error::Parse(format!("vertex {} lists a mark twice", v.id)));
            }
            vertices.push(Vertex { id: v.id, marks });
        }
        Ok(MetricGraph { vertices, edges: raw.edges })
    }

    fn index(&self) -> HashMap<&str, usize> {
        self.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect()
    }
}

/// Union-find over `0..n`.
pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Convenience for building edges from integer ratios in tests and fixtures.
pub fn edge(id: &str, a: &str, b: &str, num: i64, den: i64) -> Edge {
    Edge::new(id, a, b, rational::rational(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_graph() -> MetricGraph {
        MetricGraph::new(vec![Vertex::new("a", [1])], vec![edge("e", "a", "a", 1, 1)])
    }

    fn triangle() -> MetricGraph {
        MetricGraph::new(
            vec![Vertex::new("a", []), Vertex::new("b", []), Vertex::new("c", [])],
            vec![
                edge("e1", "a", "b", 1, 2),
                edge("e2", "b", "c", 1, 3),
                edge("e3", "c", "a", 1, 6),
            ],
        )
    }

    #[test]
    fn validate_examples() {
        assert!(loop_graph().validate().is_empty());

        let mut g = loop_graph();
        g.edges[0].length = rational::int(0);
        assert_eq!(g.validate(), vec![Violation::NonPositiveLength { edge: "e".into() }]);

        let g = MetricGraph::new(
            vec![Vertex::new("a", [1, 2]), Vertex::new("b", [2])],
            vec![edge("e", "a", "b", 1, 1)],
        );
        assert_eq!(g.validate(), vec![Violation::DuplicateMark { mark: 2 }]);
    }

    #[test]
    fn validate_structural_codes() {
        let g = MetricGraph::new(
            vec![Vertex::new("a", [0, 3]), Vertex::new("a", [])],
            vec![edge("e", "a", "z", -1, 2), edge("e", "a", "a", 1, 1)],
        );
        let v = g.validate();
        assert!(v.contains(&Violation::DuplicateVertexId { id: "a".into() }));
        assert!(v.contains(&Violation::DuplicateEdgeId { id: "e".into() }));
        assert!(v.contains(&Violation::NonPositiveLength { edge: "e".into() }));
        assert!(v.contains(&Violation::UnknownEndpoint { edge: "e".into(), vertex: "z".into() }));
        assert!(v.contains(&Violation::InvalidMark { mark: 0 }));
        assert!(v.contains(&Violation::MissingMark { mark: 1 }));
        assert!(v.contains(&Violation::MissingMark { mark: 2 }));
    }

    #[test]
    fn genus_examples() {
        assert_eq!(loop_graph().genus().unwrap(), 1);
        assert_eq!(triangle().genus().unwrap(), 1);
        let theta = MetricGraph::new(
            vec![Vertex::new("a", []), Vertex::new("b", [])],
            vec![edge("e1", "a", "b", 1, 1), edge("e2", "a", "b", 1, 1), edge("e3", "a", "b", 1, 1)],
        );
        assert_eq!(theta.genus().unwrap(), 2);
        let path = MetricGraph::new(
            ["a", "b", "c", "d"].iter().map(|id| Vertex::new(*id, [])).collect(),
            vec![edge("e1", "a", "b", 1, 1), edge("e2", "b", "c", 1, 1), edge("e3", "c", "d", 1, 1)],
        );
        assert_eq!(path.genus().unwrap(), 0);
    }

    #[test]
    fn genus_rejects_invalid() {
        let mut g = loop_graph();
        g.edges[0].length = rational::int(-1);
        assert!(matches!(g.genus(), Err(Error::InvalidGraph(_))));
    }

    #[test]
    fn connectivity_examples() {
        assert!(triangle().is_connected());
        let two_loops = MetricGraph::new(
            vec![Vertex::new("a", []), Vertex::new("b", [])],
            vec![edge("e1", "a", "a", 1, 1), edge("e2", "b", "b", 1, 1)],
        );
        assert!(!two_loops.is_connected());
        assert_eq!(two_loops.components(), vec![vec!["a".to_string()], vec!["b".to_string()]]);
        let lone = MetricGraph::new(vec![Vertex::new("a", [])], vec![]);
        assert!(lone.is_connected());
    }

    #[test]
    fn total_length_examples() {
        let g = MetricGraph::new(vec![Vertex::new("a", [])], vec![edge("e", "a", "a", 3, 2)]);
        assert_eq!(g.total_length().unwrap(), rational::rational(3, 2));
        assert_eq!(triangle().total_length().unwrap(), rational::int(1));
        let two = MetricGraph::new(
            vec![Vertex::new("a", []), Vertex::new("b", [])],
            vec![edge("e1", "a", "b", 1, 1), edge("e2", "a", "b", 1, 1)],
        );
        assert_eq!(two.total_length().unwrap(), rational::int(2));
        let lone = MetricGraph::new(vec![Vertex::new("a", [])], vec![]);
        assert!(matches!(lone.total_length(), Err(Error::Domain(_))));
    }

    #[test]
    fn contract_merges_marks_and_keeps_smaller_id() {
        let g = MetricGraph::new(
            vec![Vertex::new("b", [2]), Vertex::new("a", [1])],
            vec![edge("e", "b", "a", 1, 1)],
        );
        let h = g.contract_edge("e").unwrap();
        assert_eq!(h.vertices, vec![Vertex::new("a", [1, 2])]);
        assert!(h.edges.is_empty());
    }

    #[test]
    fn contract_triangle_edge_gives_two_gon() {
        let h = triangle().contract_edge("e1").unwrap();
        assert_eq!(h.vertices.len(), 2);
        assert_eq!(h.edges.len(), 2);
        assert!(h.edges.iter().all(|e| !e.is_loop()));
        assert_eq!(h.genus().unwrap(), 1);
    }

    #[test]
    fn contract_loop_is_domain_error() {
        assert!(matches!(loop_graph().contract_edge("e"), Err(Error::Domain(_))));
        assert!(matches!(loop_graph().contract_edge("nope"), Err(Error::Domain(_))));
    }

    #[test]
    fn json_format_field_names() {
        let s = r#"{ "vertices": [ { "id": "a", "marks": [1,3] }, { "id": "b", "marks": [2] } ],
                     "edges": [ { "id": "e1", "ends": ["a","b"], "length": "3/2" },
                                { "id": "e2", "ends": ["b","a"], "length": "2" } ] }"#;
        let g = MetricGraph::from_json(s).unwrap();
        assert!(g.validate().is_empty());
        assert_eq!(g.edges[0].length, rational::rational(3, 2));
        assert_eq!(g.mark_count(), 3);
        let v: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(v["edges"][0]["length"], "3/2");
        assert_eq!(v["edges"][1]["length"], "2");
        assert_eq!(v["vertices"][0]["marks"], serde_json::json!([1, 3]));
    }

    #[test]
    fn json_rejects_repeated_mark_in_vertex() {
        let s = r#"{ "vertices": [ { "id": "a", "marks": [1,1] } ], "edges": [] }"#;
        assert!(matches!(MetricGraph::from_json(s), Err(Error::Parse(_))));
        let s = r#"{ "vertices": [ { "id": "a", "marks": [1] } ], "edges": [ { "id": "e", "ends": ["a","a"], "length": "1/0" } ] }"#;
        assert!(matches!(MetricGraph::from_json(s), Err(Error::Parse(_))));
    }
}
