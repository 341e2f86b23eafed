//! Path counting on finite acyclic row-finite graphs. There the graph monoid
//! is free on the sinks and `a_v` corresponds to the vector counting paths
//! from `v` to each sink, which gives ground truth for the word engine.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ck::GraphMorphism;
use crate::engine::RewriteSystem;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::monoid::{Generator, MonoidElement};

/// Element of the free commutative monoid on the sinks.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SinkVector(BTreeMap<VertexId, u64>);

impl SinkVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(sink: VertexId) -> Self {
        Self(BTreeMap::from([(sink, 1)]))
    }

    pub fn get(&self, sink: &VertexId) -> u64 {
        self.0.get(sink).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VertexId, u64)> {
        self.0.iter().map(|(v, &n)| (v, n))
    }

    pub fn checked_add(&self, other: &SinkVector) -> Result<SinkVector> {
        let mut out = self.0.clone();
        for (v, n) in other.iter() {
            let slot = out.entry(v.clone()).or_insert(0);
            *slot = slot.checked_add(n).ok_or(Error::Overflow)?;
        }
        Ok(Self(out))
    }

    pub fn checked_scale(&self, n: u64) -> Result<SinkVector> {
        if n == 0 {
            return Ok(Self::zero());
        }
        let mut out = BTreeMap::new();
        for (v, m) in self.iter() {
            out.insert(v.clone(), m.checked_mul(n).ok_or(Error::Overflow)?);
        }
        Ok(Self(out))
    }
}

impl FromIterator<(VertexId, u64)> for SinkVector {
    fn from_iter<I: IntoIterator<Item = (VertexId, u64)>>(iter: I) -> Self {
        Self(iter.into_iter().filter(|(_, n)| *n > 0).collect())
    }
}

impl fmt::Display for SinkVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, n)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}: {n}")?;
        }
        f.write_str("}")
    }
}

/// Memoized path counts for one graph.
pub struct PathCounter<'g> {
    graph: &'g Graph,
    memo: HashMap<VertexId, SinkVector>,
}

#[derive(Clone, Copy, PartialEq)]
enum Mark {
    Open,
    Done,
}

impl<'g> PathCounter<'g> {
    pub fn new(g: &'g Graph) -> Result<Self> {
        g.ensure_valid()?;
        if let Some((v, _)) = g.infinite_emitters().next() {
            return Err(Error::NotRowFinite(v.clone()));
        }
        Ok(PathCounter {
            graph: g,
            memo: HashMap::new(),
        })
    }

    /// Number of paths from `v` to each sink; a sink reaches itself by the
    /// empty path.
    pub fn count(&mut self, v: &VertexId) -> Result<SinkVector> {
        if !self.graph.has_vertex(v) {
            return Err(Error::UnknownVertex(v.clone()));
        }
        if let Some(c) = self.memo.get(v) {
            return Ok(c.clone());
        }
        let mut marks: HashMap<VertexId, Mark> = HashMap::new();
        // iterative post-order so deep chains cannot overflow the stack
        let mut stack = vec![(v.clone(), false)];
        while let Some((x, expanded)) = stack.pop() {
            if self.memo.contains_key(&x) {
                continue;
            }
            let succ: Vec<VertexId> = self
                .graph
                .out_edges(&x)?
                .iter()
                .map(|e| e.dst.clone())
                .collect();
            if expanded {
                let value = if succ.is_empty() {
                    SinkVector::unit(x.clone())
                } else {
                    let mut acc = SinkVector::zero();
                    for y in &succ {
                        acc = acc.checked_add(&self.memo[y])?;
                    }
                    acc
                };
                self.memo.insert(x.clone(), value);
                marks.insert(x, Mark::Done);
                continue;
            }
            match marks.get(&x) {
                Some(Mark::Open) => return Err(Error::NotAcyclic(x)),
                Some(Mark::Done) => continue,
                None => {}
            }
            marks.insert(x.clone(), Mark::Open);
            stack.push((x, true));
            for y in succ.into_iter().rev() {
                if self.memo.contains_key(&y) {
                    continue;
                }
                if marks.get(&y) == Some(&Mark::Open) {
                    return Err(Error::NotAcyclic(y));
                }
                stack.push((y, false));
            }
        }
        Ok(self.memo[v].clone())
    }

    /// Additive extension of [`PathCounter::count`] to vertex-generator
    /// elements.
    pub fn gamma(&mut self, x: &MonoidElement) -> Result<SinkVector> {
        let mut out = SinkVector::zero();
        for (g, n) in x.terms() {
            let Generator::Vertex(v) = g else {
                return Err(Error::CofiniteGenerator(g.clone()));
            };
            out = out.checked_add(&self.count(v)?.checked_scale(n)?)?;
        }
        Ok(out)
    }
}

pub fn path_count(g: &Graph, v: &VertexId) -> Result<SinkVector> {
    PathCounter::new(g)?.count(v)
}

pub fn gamma_acyclic(g: &Graph, x: &MonoidElement) -> Result<SinkVector> {
    PathCounter::new(g)?.gamma(x)
}

/// Graph acyclicity check that does not require a row-finite graph.
pub fn is_acyclic(g: &Graph) -> bool {
    let mut counter = PathCounter {
        graph: g,
        memo: HashMap::new(),
    };
    g.vertices()
        .iter()
        .all(|v| !matches!(counter.count(v), Err(Error::NotAcyclic(_))))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub lhs: MonoidElement,
    pub rhs: MonoidElement,
    pub engine_equal: bool,
    pub oracle_equal: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub agreements: usize,
    pub discrepancies: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub examples: Vec<Discrepancy>,
}

/// Compares the word engine's decision with equality of sink vectors on every
/// pair.
pub fn cross_check(
    g: &Graph,
    system: &RewriteSystem,
    pairs: &[(MonoidElement, MonoidElement)],
) -> Result<CrossCheckReport> {
    let mut counter = PathCounter::new(g)?;
    let mut report = CrossCheckReport::default();
    for (u, v) in pairs {
        let engine_equal = system.normal_form(u)? == system.normal_form(v)?;
        let oracle_equal = counter.gamma(u)? == counter.gamma(v)?;
        if engine_equal == oracle_equal {
            report.agreements += 1;
        } else {
            report.discrepancies += 1;
            report.examples.push(Discrepancy {
                lhs: u.clone(),
                rhs: v.clone(),
                engine_equal,
                oracle_equal,
            });
        }
    }
    Ok(report)
}

/// The linear map on sink vectors induced by a morphism of acyclic graphs:
/// the unit vector of a source sink `s` goes to the path counts of its image.
pub fn sink_transfer(m: &GraphMorphism, x: &SinkVector) -> Result<SinkVector> {
    let mut counter = PathCounter::new(m.target())?;
    let mut out = SinkVector::zero();
    for (s, n) in x.iter() {
        let image = m
            .vertex_image(s)
            .ok_or_else(|| Error::UnknownVertex(s.clone()))?;
        out = out.checked_add(&counter.count(image)?.checked_scale(n)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{complete, DEFAULT_BUDGET};
    use crate::monoid::Presentation;

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }

    fn a(v: &str) -> MonoidElement {
        MonoidElement::vertex(v)
    }

    fn diamond() -> Graph {
        let mut g = Graph::new();
        g.add_vertex("v")
            .add_vertex("w1")
            .add_vertex("w2")
            .add_vertex("u");
        g.add_edge("e1", "v", "w1")
            .add_edge("e2", "v", "w2")
            .add_edge("f1", "w1", "u")
            .add_edge("f2", "w2", "u");
        g
    }

    fn sv(entries: &[(&str, u64)]) -> SinkVector {
        entries.iter().map(|(v, n)| (vid(v), *n)).collect()
    }

    #[test]
    fn path_counts() {
        let g = diamond();
        assert_eq!(path_count(&g, &vid("u")).unwrap(), sv(&[("u", 1)]));
        assert_eq!(path_count(&g, &vid("w1")).unwrap(), sv(&[("u", 1)]));
        // v -> w1 -> u and v -> w2 -> u
        assert_eq!(path_count(&g, &vid("v")).unwrap(), sv(&[("u", 2)]));
        let mut single = Graph::new();
        single
            .add_vertex("v")
            .add_vertex("w")
            .add_edge("e", "v", "w");
        assert_eq!(path_count(&single, &vid("v")).unwrap(), sv(&[("w", 1)]));
    }

    #[test]
    fn gamma_is_additive() {
        let g = diamond();
        assert_eq!(
            gamma_acyclic(&g, &a("v").scale(2)).unwrap(),
            sv(&[("u", 4)])
        );
        assert_eq!(
            gamma_acyclic(&g, &MonoidElement::zero()).unwrap(),
            SinkVector::zero()
        );
        assert_eq!(gamma_acyclic(&g, &a("u")).unwrap(), sv(&[("u", 1)]));
    }

    #[test]
    fn rejects_cycles_emitters_and_cofinite_generators() {
        let mut loop_graph = Graph::new();
        loop_graph.add_vertex("v").add_vertex("w");
        loop_graph.add_edge("e", "v", "w").add_edge("f", "w", "v");
        assert!(matches!(
            path_count(&loop_graph, &vid("v")),
            Err(Error::NotAcyclic(_))
        ));
        assert!(!is_acyclic(&loop_graph));
        assert!(is_acyclic(&diamond()));

        let mut emitter = Graph::new();
        emitter.add_vertex("v").add_vertex("w");
        emitter.set_infinite_emitter("v", crate::graph::EdgeIndexDescriptor::constant("w"));
        assert!(matches!(
            path_count(&emitter, &vid("w")),
            Err(Error::NotRowFinite(_))
        ));

        let x = MonoidElement::generator(Generator::cofinite("v", ["e"]));
        assert!(matches!(
            gamma_acyclic(&diamond(), &x),
            Err(Error::CofiniteGenerator(_))
        ));
    }

    #[test]
    fn overflow_is_reported() {
        // 64 stacked diamonds: 2^64 paths
        let mut g = Graph::new();
        g.add_vertex("x0");
        for i in 0..64 {
            let (top, l, r, bottom) = (
                format!("x{i}"),
                format!("l{i}"),
                format!("r{i}"),
                format!("x{}", i + 1),
            );
            g.add_vertex(l.as_str())
                .add_vertex(r.as_str())
                .add_vertex(bottom.as_str());
            g.add_edge(format!("a{i}"), top.as_str(), l.as_str())
                .add_edge(format!("b{i}"), top.as_str(), r.as_str())
                .add_edge(format!("c{i}"), l.as_str(), bottom.as_str())
                .add_edge(format!("d{i}"), r.as_str(), bottom.as_str());
        }
        assert!(matches!(path_count(&g, &vid("x0")), Err(Error::Overflow)));
        assert_eq!(path_count(&g, &vid("x1")).unwrap(), sv(&[("x64", 1 << 63)]));
    }

    #[test]
    fn cross_check_diamond() {
        let g = diamond();
        let rs = complete(&Presentation::from_graph(&g).unwrap(), DEFAULT_BUDGET).unwrap();
        let pairs = vec![
            (a("v"), a("u").scale(2)),
            (a("w1"), a("w2")),
            (a("v"), a("u")),
        ];
        let report = cross_check(&g, &rs, &pairs).unwrap();
        assert_eq!(report.agreements, 3);
        assert_eq!(report.discrepancies, 0);
        assert!(rs.equal(&a("v"), &a("u").scale(2)).unwrap().equal);
        assert!(!rs.equal(&a("v"), &a("u")).unwrap().equal);
    }

    #[test]
    fn transfer_along_inclusion() {
        // sink u of the diamond gains two edges to new sinks in the target
        let e = diamond();
        let mut f = diamond();
        f.add_vertex("p")
            .add_vertex("q")
            .add_edge("g1", "u", "p")
            .add_edge("g2", "u", "q");
        let m = GraphMorphism::inclusion(&e, &f).unwrap();
        let image = sink_transfer(&m, &sv(&[("u", 3)])).unwrap();
        assert_eq!(image, sv(&[("p", 3), ("q", 3)]));
    }

    #[test]
    fn sink_vector_json() {
        assert_eq!(
            serde_json::to_string(&sv(&[("u", 2)])).unwrap(),
            r#"{"u":2}"#
        );
    }
}
