//! Directed graphs with singular vertices.
//!
//! A [`Graph`] holds a finite set of vertices and edges. Vertices declared as
//! infinite emitters additionally carry an [`EdgeIndexDescriptor`], an
//! eventually periodic description of the ranges of their countably many
//! out-edges `e_0^v, e_1^v, ...`. Only finitely many of those edges are
//! materialized at a time; the materialized edges of an emitter are its
//! out-edges in the order they appear in the edge list.
//!
//! Graphs may be built in an invalid state (e.g. from JSON); [`Graph::validate`]
//! reports every invariant violation and the operations that need a valid
//! graph check it first.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

string_id!(
    /// Identifier of a vertex.
    VertexId
);
string_id!(
    /// Identifier of an edge.
    EdgeId
);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub src: VertexId,
    pub dst: VertexId,
}

/// Ranges of the out-edges of an infinite emitter: `prefix` first, then
/// `cycle` repeated forever.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeIndexDescriptor {
    pub prefix: Vec<VertexId>,
    pub cycle: Vec<VertexId>,
}

impl EdgeIndexDescriptor {
    pub fn new(prefix: Vec<VertexId>, cycle: Vec<VertexId>) -> Self {
        Self { prefix, cycle }
    }

    /// All edges go to the same vertex.
    pub fn constant(range: impl Into<VertexId>) -> Self {
        Self {
            prefix: Vec::new(),
            cycle: vec![range.into()],
        }
    }

    /// Range of `e_n^v`. `None` only when the cycle is empty (an invalid descriptor).
    pub fn range_at(&self, n: usize) -> Option<&VertexId> {
        if n < self.prefix.len() {
            Some(&self.prefix[n])
        } else if self.cycle.is_empty() {
            None
        } else {
            Some(&self.cycle[(n - self.prefix.len()) % self.cycle.len()])
        }
    }

    fn mentioned(&self) -> impl Iterator<Item = &VertexId> {
        self.prefix.iter().chain(self.cycle.iter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexClass {
    Regular,
    Sink,
    InfiniteEmitter,
}

impl VertexClass {
    pub fn is_singular(self) -> bool {
        !matches!(self, VertexClass::Regular)
    }
}

impl fmt::Display for VertexClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VertexClass::Regular => "regular",
            VertexClass::Sink => "sink",
            VertexClass::InfiniteEmitter => "infinite_emitter",
        })
    }
}

/// A single invariant violation found by [`Graph::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateVertex {
        vertex: VertexId,
    },
    DuplicateEdge {
        edge: EdgeId,
    },
    UnknownSource {
        edge: EdgeId,
        vertex: VertexId,
    },
    UnknownRange {
        edge: EdgeId,
        vertex: VertexId,
    },
    UnknownEmitter {
        vertex: VertexId,
    },
    EmptyCycle {
        emitter: VertexId,
    },
    DescriptorUnknownVertex {
        emitter: VertexId,
        vertex: VertexId,
    },
    RangeMismatch {
        emitter: VertexId,
        edge: EdgeId,
        index: usize,
        expected: VertexId,
        found: VertexId,
    },
    MaterializedCountMismatch {
        emitter: VertexId,
        declared: usize,
        listed: usize,
    },
    UnknownBoundary {
        vertex: VertexId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateVertex { vertex } => write!(f, "duplicate vertex `{vertex}`"),
            Violation::DuplicateEdge { edge } => write!(f, "duplicate edge `{edge}`"),
            Violation::UnknownSource { edge, vertex } => {
                write!(f, "edge `{edge}` has unknown source `{vertex}`")
            }
            Violation::UnknownRange { edge, vertex } => {
                write!(f, "edge `{edge}` has unknown range `{vertex}`")
            }
            Violation::UnknownEmitter { vertex } => {
                write!(f, "infinite emitter `{vertex}` is not a vertex")
            }
            Violation::EmptyCycle { emitter } => {
                write!(f, "descriptor of `{emitter}` has an empty cycle")
            }
            Violation::DescriptorUnknownVertex { emitter, vertex } => {
                write!(f, "descriptor of `{emitter}` names unknown vertex `{vertex}`")
            }
            Violation::RangeMismatch {
                emitter,
                edge,
                index,
                expected,
                found,
            } => write!(
                f,
                "edge `{edge}` (index {index} of `{emitter}`) has range `{found}`, descriptor says `{expected}`"
            ),
            Violation::MaterializedCountMismatch {
                emitter,
                declared,
                listed,
            } => write!(
                f,
                "`{emitter}` declares {declared} materialized edges but {listed} are listed"
            ),
            Violation::UnknownBoundary { vertex } => {
                write!(f, "boundary annotation on unknown vertex `{vertex}`")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
    emitters: BTreeMap<VertexId, EdgeIndexDescriptor>,
    boundary: BTreeSet<VertexId>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, v: impl Into<VertexId>) -> &mut Self {
        self.vertices.push(v.into());
        self
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<EdgeId>,
        src: impl Into<VertexId>,
        dst: impl Into<VertexId>,
    ) -> &mut Self {
        self.edges.push(Edge {
            id: id.into(),
            src: src.into(),
            dst: dst.into(),
        });
        self
    }

    /// Declares `v` an infinite emitter. Existing edges out of `v` become its
    /// materialized edges, in list order.
    pub fn set_infinite_emitter(
        &mut self,
        v: impl Into<VertexId>,
        descriptor: EdgeIndexDescriptor,
    ) -> &mut Self {
        self.emitters.insert(v.into(), descriptor);
        self
    }

    pub fn mark_boundary(&mut self, v: impl Into<VertexId>) -> &mut Self {
        self.boundary.insert(v.into());
        self
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_vertex(&self, v: &VertexId) -> bool {
        self.vertices.contains(v)
    }

    pub fn edge(&self, id: &EdgeId) -> Option<&Edge> {
        self.edges.iter().find(|e| &e.id == id)
    }

    pub fn descriptor(&self, v: &VertexId) -> Option<&EdgeIndexDescriptor> {
        self.emitters.get(v)
    }

    pub fn infinite_emitters(&self) -> impl Iterator<Item = (&VertexId, &EdgeIndexDescriptor)> {
        self.emitters.iter()
    }

    pub fn is_boundary(&self, v: &VertexId) -> bool {
        self.boundary.contains(v)
    }

    pub fn boundary(&self) -> &BTreeSet<VertexId> {
        &self.boundary
    }

    fn out_edges_unchecked<'a>(&'a self, v: &'a VertexId) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| &e.src == v)
    }

    /// Materialized out-edges of `v` in index order.
    pub fn out_edges(&self, v: &VertexId) -> Result<Vec<&Edge>> {
        if !self.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
        Ok(self.edges.iter().filter(|e| &e.src == v).collect())
    }

    pub fn vertex_class(&self, v: &VertexId) -> Result<VertexClass> {
        if !self.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
        Ok(self.class_unchecked(v))
    }

    fn class_unchecked(&self, v: &VertexId) -> VertexClass {
        if self.emitters.contains_key(v) {
            VertexClass::InfiniteEmitter
        } else if self.out_edges_unchecked(v).next().is_none() {
            VertexClass::Sink
        } else {
            VertexClass::Regular
        }
    }

    /// Number of materialized edges out of `v`.
    pub fn materialized_count(&self, v: &VertexId) -> usize {
        self.out_edges_unchecked(v).count()
    }

    /// Position of edge `id` among the out-edges of its source.
    pub fn edge_index(&self, id: &EdgeId) -> Option<usize> {
        let edge = self.edge(id)?;
        self.out_edges_unchecked(&edge.src)
            .position(|e| &e.id == id)
    }

    pub fn sinks(&self) -> Vec<VertexId> {
        self.vertices
            .iter()
            .filter(|v| self.class_unchecked(v) == VertexClass::Sink)
            .cloned()
            .collect()
    }

    pub fn is_row_finite(&self) -> bool {
        self.emitters.is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let mut seen = HashSet::new();
        for v in &self.vertices {
            if !seen.insert(v) {
                violations.push(Violation::DuplicateVertex { vertex: v.clone() });
            }
        }
        let mut seen_edges = HashSet::new();
        for e in &self.edges {
            if !seen_edges.insert(&e.id) {
                violations.push(Violation::DuplicateEdge { edge: e.id.clone() });
            }
            if !seen.contains(&e.src) {
                violations.push(Violation::UnknownSource {
                    edge: e.id.clone(),
                    vertex: e.src.clone(),
                });
            }
            if !seen.contains(&e.dst) {
                violations.push(Violation::UnknownRange {
                    edge: e.id.clone(),
                    vertex: e.dst.clone(),
                });
            }
        }
        for (v, d) in &self.emitters {
            if !seen.contains(v) {
                violations.push(Violation::UnknownEmitter { vertex: v.clone() });
            }
            if d.cycle.is_empty() {
                violations.push(Violation::EmptyCycle { emitter: v.clone() });
            }
            for w in d.mentioned() {
                if !seen.contains(w) {
                    violations.push(Violation::DescriptorUnknownVertex {
                        emitter: v.clone(),
                        vertex: w.clone(),
                    });
                }
            }
            for (index, e) in self.out_edges_unchecked(v).enumerate() {
                if let Some(expected) = d.range_at(index) {
                    if expected != &e.dst {
                        violations.push(Violation::RangeMismatch {
                            emitter: v.clone(),
                            edge: e.id.clone(),
                            index,
                            expected: expected.clone(),
                            found: e.dst.clone(),
                        });
                    }
                }
            }
        }
        for v in &self.boundary {
            if !seen.contains(v) {
                violations.push(Violation::UnknownBoundary { vertex: v.clone() });
            }
        }
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(report))
        }
    }

    /// Returns a copy with the first `k` edges of infinite emitter `v`
    /// instantiated. New edges are named `e{n}^{v}`.
    pub fn materialize_edges(&self, v: &VertexId, k: usize) -> Result<Graph> {
        let descriptor = self
            .emitters
            .get(v)
            .ok_or_else(|| Error::NotInfiniteEmitter(v.clone()))?;
        let current = self.materialized_count(v);
        if k < current {
            return Err(Error::MaterializationShrink {
                vertex: v.clone(),
                current,
                requested: k,
            });
        }
        let mut out = self.clone();
        let mut taken: HashSet<EdgeId> = self.edges.iter().map(|e| e.id.clone()).collect();
        for n in current..k {
            let dst = descriptor
                .range_at(n)
                .ok_or_else(|| Error::InvalidGraph(self.validate()))?
                .clone();
            let mut id = EdgeId::new(format!("e{n}^{v}"));
            while taken.contains(&id) {
                id = EdgeId::new(format!("{id}'"));
            }
            taken.insert(id.clone());
            out.edges.push(Edge {
                id,
                src: v.clone(),
                dst,
            });
        }
        Ok(out)
    }

    /// Materializes every infinite emitter up to at least `k` edges.
    pub fn materialize_all(&self, k: usize) -> Result<Graph> {
        let mut out = self.clone();
        let emitters: Vec<VertexId> = self.emitters.keys().cloned().collect();
        for v in emitters {
            let target = k.max(out.materialized_count(&v));
            out = out.materialize_edges(&v, target)?;
        }
        Ok(out)
    }

    pub fn from_json_str(s: &str) -> Result<Graph> {
        let doc: GraphDoc = serde_json::from_str(s)?;
        doc.into_graph()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(GraphDoc::from_graph(self)).expect("graph serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&GraphDoc::from_graph(self)).expect("graph serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum VertexDoc {
    Plain(VertexId),
    Annotated {
        id: VertexId,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        boundary: bool,
    },
}

#[derive(Serialize, Deserialize)]
struct EmitterDoc {
    #[serde(default)]
    prefix: Vec<VertexId>,
    cycle: Vec<VertexId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    materialized: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<VertexDoc>,
    #[serde(default)]
    edges: Vec<Edge>,
    #[serde(default)]
    infinite_emitters: BTreeMap<VertexId, EmitterDoc>,
}

impl GraphDoc {
    fn into_graph(self) -> Result<Graph> {
        let mut g = Graph::new();
        for v in self.vertices {
            match v {
                VertexDoc::Plain(id) => {
                    g.add_vertex(id);
                }
                VertexDoc::Annotated { id, boundary } => {
                    if boundary {
                        g.mark_boundary(id.clone());
                    }
                    g.add_vertex(id);
                }
            }
        }
        g.edges = self.edges;
        let mut declared = Vec::new();
        for (v, doc) in self.infinite_emitters {
            if let Some(k) = doc.materialized {
                declared.push((v.clone(), k));
            }
            g.set_infinite_emitter(v, EdgeIndexDescriptor::new(doc.prefix, doc.cycle));
        }
        for (v, k) in declared {
            let listed = g.materialized_count(&v);
            if k < listed {
                return Err(Error::InvalidGraph(ValidationReport {
                    violations: vec![Violation::MaterializedCountMismatch {
                        emitter: v,
                        declared: k,
                        listed,
                    }],
                }));
            }
            if k > listed {
                let report = g.validate();
                if !report.is_empty() {
                    return Err(Error::InvalidGraph(report));
                }
                g = g.materialize_edges(&v, k)?;
            }
        }
        Ok(g)
    }

    fn from_graph(g: &Graph) -> Self {
        GraphDoc {
            vertices: g
                .vertices
                .iter()
                .map(|v| {
                    if g.boundary.contains(v) {
                        VertexDoc::Annotated {
                            id: v.clone(),
                            boundary: true,
                        }
                    } else {
                        VertexDoc::Plain(v.clone())
                    }
                })
                .collect(),
            edges: g.edges.clone(),
            infinite_emitters: g
                .emitters
                .iter()
                .map(|(v, d)| {
                    (
                        v.clone(),
                        EmitterDoc {
                            prefix: d.prefix.clone(),
                            cycle: d.cycle.clone(),
                            materialized: Some(g.materialized_count(v)),
                        },
                    )
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn emitter_graph() -> Graph {
        let mut g = Graph::new();
        g.add_vertex("v").add_vertex("u").add_vertex("w");
        g.set_infinite_emitter(
            "v",
            EdgeIndexDescriptor::new(vec![vid("u")], vec![vid("w")]),
        );
        g
    }

    #[test]
    fn unknown_range_is_reported() {
        let mut g = Graph::new();
        g.add_vertex("v").add_edge("e", "v", "nowhere");
        let report = g.validate();
        assert_eq!(
            report.violations,
            vec![Violation::UnknownRange {
                edge: EdgeId::from("e"),
                vertex: vid("nowhere")
            }]
        );
    }

    #[test]
    fn single_sink_is_valid() {
        let mut g = Graph::new();
        g.add_vertex("v");
        assert!(g.validate().is_empty());
        assert_eq!(g.vertex_class(&vid("v")).unwrap(), VertexClass::Sink);
    }

    #[test]
    fn descriptor_mismatch_names_index() {
        let mut g = emitter_graph();
        g.add_edge("a", "v", "u").add_edge("b", "v", "u");
        let report = g.validate();
        assert_eq!(report.violations.len(), 1);
        match &report.violations[0] {
            Violation::RangeMismatch { index, edge, .. } => {
                assert_eq!(*index, 1);
                assert_eq!(edge.as_str(), "b");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn duplicate_ids_are_reported() {
        let mut g = Graph::new();
        g.add_vertex("v")
            .add_vertex("v")
            .add_edge("e", "v", "v")
            .add_edge("e", "v", "v");
        let report = g.validate();
        assert!(report
            .violations
            .contains(&Violation::DuplicateVertex { vertex: vid("v") }));
        assert!(report
            .violations
            .contains(&Violation::DuplicateEdge { edge: "e".into() }));
    }

    #[test]
    fn classification() {
        let mut g = emitter_graph();
        g.add_vertex("r").add_edge("x", "r", "u");
        assert_eq!(
            g.vertex_class(&vid("v")).unwrap(),
            VertexClass::InfiniteEmitter
        );
        assert_eq!(g.vertex_class(&vid("r")).unwrap(), VertexClass::Regular);
        assert_eq!(g.vertex_class(&vid("u")).unwrap(), VertexClass::Sink);
        assert!(matches!(
            g.vertex_class(&vid("zz")),
            Err(Error::UnknownVertex(_))
        ));
    }

    #[test]
    fn materialize_constant_cycle() {
        let mut g = Graph::new();
        g.add_vertex("v").add_vertex("w");
        g.set_infinite_emitter("v", EdgeIndexDescriptor::constant("w"));
        let g3 = g.materialize_edges(&vid("v"), 3).unwrap();
        let out = g3.out_edges(&vid("v")).unwrap();
        let ids: Vec<_> = out.iter().map(|e| e.id.as_str()).collect();
        assert_eq!(ids, ["e0^v", "e1^v", "e2^v"]);
        assert!(out.iter().all(|e| e.dst == vid("w")));
        assert!(g3.validate().is_empty());
    }

    #[test]
    fn materialize_prefix_then_cycle() {
        let g = emitter_graph().materialize_edges(&vid("v"), 2).unwrap();
        let dsts: Vec<_> = g
            .out_edges(&vid("v"))
            .unwrap()
            .iter()
            .map(|e| e.dst.clone())
            .collect();
        assert_eq!(dsts, vec![vid("u"), vid("w")]);
    }

    #[test]
    fn materialize_is_idempotent_and_refuses_shrink() {
        let g = emitter_graph().materialize_edges(&vid("v"), 2).unwrap();
        assert_eq!(g.materialize_edges(&vid("v"), 2).unwrap(), g);
        assert!(matches!(
            g.materialize_edges(&vid("v"), 1),
            Err(Error::MaterializationShrink {
                current: 2,
                requested: 1,
                ..
            })
        ));
        assert!(matches!(
            g.materialize_edges(&vid("u"), 1),
            Err(Error::NotInfiniteEmitter(_))
        ));
    }

    #[test]
    fn emitter_without_edges_stays_singular() {
        let g = emitter_graph();
        assert_eq!(
            g.vertex_class(&vid("v")).unwrap(),
            VertexClass::InfiniteEmitter
        );
        assert!(g.out_edges(&vid("v")).unwrap().is_empty());
    }

    #[test]
    fn out_edges_keep_list_order() {
        let mut g = Graph::new();
        g.add_vertex("v").add_vertex("w");
        g.add_edge("f", "v", "w").add_edge("e", "v", "w");
        let ids: Vec<_> = g
            .out_edges(&vid("v"))
            .unwrap()
            .iter()
            .map(|e| e.id.to_string())
            .collect();
        assert_eq!(ids, ["f", "e"]);
        assert_eq!(g.edge_index(&"e".into()), Some(1));
        assert!(g.out_edges(&vid("w")).unwrap().is_empty());
    }

    #[test]
    fn json_round_trip_with_materialization() {
        let src = r#"{
            "vertices": ["v", "w", {"id": "b", "boundary": true}],
            "edges": [{"id": "x", "src": "v", "dst": "w"}],
            "infinite_emitters": {"v": {"prefix": [], "cycle": ["w"], "materialized": 3}}
        }"#;
        let g = Graph::from_json_str(src).unwrap();
        assert_eq!(g.materialized_count(&vid("v")), 3);
        assert!(g.is_boundary(&vid("b")));
        let back = Graph::from_json_str(&g.to_json_string()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn json_declared_count_below_listed_is_rejected() {
        let src = r#"{
            "vertices": ["v", "w"],
            "edges": [{"id": "x", "src": "v", "dst": "w"}, {"id": "y", "src": "v", "dst": "w"}],
            "infinite_emitters": {"v": {"cycle": ["w"], "materialized": 1}}
        }"#;
        assert!(matches!(
            Graph::from_json_str(src),
            Err(Error::InvalidGraph(_))
        ));
    }
}
