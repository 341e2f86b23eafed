//! Truncated desingularization of a graph and the monoid isomorphisms between
//! the graph monoid of `E` and that of its desingularization `F`.
//!
//! Every singular vertex `v` of `E` grows a tail `w_0(v) -> w_1(v) -> ...`
//! (edges `g_n^v`). Out-edges of a regular vertex `v` become `f_n^v` leaving
//! `w_0(v)`; the `n`-th edge of an infinite emitter leaves `w_n(v)` instead.
//! The tails are cut at level `N`; the last vertex `w_N(v)` of each tail is a
//! boundary vertex with no out-edges, so no relation is imposed on it and every
//! relation of the truncated graph also holds in the infinite one.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexClass, VertexId};
use crate::monoid::{Generator, MonoidElement};

pub fn tail_vertex(v: &VertexId, n: usize) -> VertexId {
    VertexId::new(format!("w{n}({v})"))
}

fn f_edge(v: &VertexId, n: usize) -> EdgeId {
    EdgeId::new(format!("f{n}^{v}"))
}

fn g_edge(v: &VertexId, n: usize) -> EdgeId {
    EdgeId::new(format!("g{n}^{v}"))
}

#[derive(Clone, Debug)]
pub struct Desingularization {
    source: Graph,
    level: usize,
    graph: Graph,
    tails: BTreeMap<VertexId, (VertexId, usize)>,
}

/// Builds `F_N` for a valid graph `g` and level `N >= 1`.
pub fn desingularize(g: &Graph, level: usize) -> Result<Desingularization> {
    g.ensure_valid()?;
    if level == 0 {
        return Err(Error::TruncationTooSmall { level, required: 1 });
    }
    let mut f = Graph::new();
    let mut tails = BTreeMap::new();
    let mut classes = Vec::with_capacity(g.vertices().len());
    for v in g.vertices() {
        let class = g.vertex_class(v)?;
        classes.push((v, class));
        let top = if class.is_singular() { level } else { 0 };
        for n in 0..=top {
            let w = tail_vertex(v, n);
            tails.insert(w.clone(), (v.clone(), n));
            f.add_vertex(w);
        }
        if class.is_singular() {
            f.mark_boundary(tail_vertex(v, level));
        }
    }
    for (v, class) in classes {
        match class {
            VertexClass::Regular => {
                for (n, e) in g.out_edges(v)?.iter().enumerate() {
                    f.add_edge(f_edge(v, n), tail_vertex(v, 0), tail_vertex(&e.dst, 0));
                }
            }
            VertexClass::Sink => {
                for n in 0..level {
                    f.add_edge(g_edge(v, n), tail_vertex(v, n), tail_vertex(v, n + 1));
                }
            }
            VertexClass::InfiniteEmitter => {
                let d = g.descriptor(v).expect("emitter has descriptor");
                for n in 0..level {
                    let range = d.range_at(n).expect("validated descriptor");
                    f.add_edge(f_edge(v, n), tail_vertex(v, n), tail_vertex(range, 0));
                    f.add_edge(g_edge(v, n), tail_vertex(v, n), tail_vertex(v, n + 1));
                }
            }
        }
    }
    Ok(Desingularization {
        source: g.clone(),
        level,
        graph: f,
        tails,
    })
}

/// Smallest safe truncation level for `x`: largest edge index among its
/// cofinite generators plus two, and at least two.
pub fn required_truncation(g: &Graph, x: &MonoidElement) -> Result<usize> {
    let mut level = 2;
    for (gen, _) in x.terms() {
        if let Generator::Cofinite { edges, .. } = gen {
            for e in edges {
                let n = g
                    .edge_index(e)
                    .ok_or_else(|| Error::UnknownEdge(e.clone()))?;
                level = level.max(n + 2);
            }
        }
    }
    Ok(level)
}

impl Desingularization {
    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// The truncated, row-finite graph `F_N`.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// `(v, n)` with `w = w_n(v)`.
    pub fn tail_of(&self, w: &VertexId) -> Option<(&VertexId, usize)> {
        self.tails.get(w).map(|(v, n)| (v, *n))
    }

    fn phi_generator(&self, gen: &Generator, whole: &MonoidElement) -> Result<MonoidElement> {
        match gen {
            Generator::Vertex(v) => {
                if !self.source.has_vertex(v) {
                    return Err(Error::UnknownVertex(v.clone()));
                }
                Ok(MonoidElement::vertex(tail_vertex(v, 0)))
            }
            Generator::Cofinite { vertex, .. } => {
                let canonical = gen.canonical_in(&self.source)?;
                let Generator::Cofinite { edges, .. } = &canonical else {
                    unreachable!()
                };
                let indices: Vec<usize> = edges
                    .iter()
                    .map(|e| self.source.edge_index(e).expect("canonical edge"))
                    .collect();
                let n = *indices.iter().max().expect("non-empty S");
                if n + 1 > self.level {
                    return Err(Error::TruncationTooSmall {
                        level: self.level,
                        required: required_truncation(&self.source, whole)?,
                    });
                }
                let out = self.source.out_edges(vertex)?;
                let mut image = MonoidElement::vertex(tail_vertex(vertex, n + 1));
                for (i, e) in out.iter().enumerate().take(n + 1) {
                    if !indices.contains(&i) {
                        image += MonoidElement::vertex(tail_vertex(&e.dst, 0));
                    }
                }
                Ok(image)
            }
        }
    }

    /// The isomorphism from the monoid of `E` to that of `F`, on elements
    /// whose cofinite generators fit below the truncation level.
    pub fn phi(&self, x: &MonoidElement) -> Result<MonoidElement> {
        let mut out = MonoidElement::zero();
        for (gen, n) in x.terms() {
            out += self.phi_generator(gen, x)?.scale(n);
        }
        Ok(out)
    }

    fn psi_generator(&self, gen: &Generator) -> Result<MonoidElement> {
        let Generator::Vertex(w) = gen else {
            return Err(Error::UnknownGenerator(gen.clone()));
        };
        let (v, n) = self
            .tail_of(w)
            .ok_or_else(|| Error::UnknownGenerator(gen.clone()))?;
        if n == 0 {
            return Ok(MonoidElement::vertex(v.clone()));
        }
        match self.source.vertex_class(v)? {
            VertexClass::Sink => Ok(MonoidElement::vertex(v.clone())),
            VertexClass::InfiniteEmitter => {
                let out = self.source.out_edges(v)?;
                if out.len() < n {
                    return Err(Error::UnmaterializedPrefix {
                        vertex: v.clone(),
                        index: n,
                        needed: n,
                        materialized: out.len(),
                    });
                }
                Ok(MonoidElement::generator(Generator::Cofinite {
                    vertex: v.clone(),
                    edges: out[..n].iter().map(|e| e.id.clone()).collect(),
                }))
            }
            VertexClass::Regular => unreachable!("regular vertices have no tail"),
        }
    }

    /// The inverse isomorphism, from the monoid of `F` back to that of `E`.
    pub fn psi(&self, y: &MonoidElement) -> Result<MonoidElement> {
        let mut out = MonoidElement::zero();
        for (gen, n) in y.terms() {
            out += self.psi_generator(gen)?.scale(n);
        }
        Ok(out)
    }
}
