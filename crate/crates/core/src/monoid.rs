//! Generators, free commutative monoid elements and the defining presentation
//! of the graph monoid of a graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexClass, VertexId};

/// Largest number of materialized edges per infinite emitter for which the
/// presentation is built (the alphabet grows as `2^k`).
pub const MAX_MATERIALIZED: usize = 12;

/// A generator of the graph monoid: `a_v` for a vertex, or `a_{v,S}` for an
/// infinite emitter `v` and a non-empty finite set `S` of its edges.
///
/// The derived order is the canonical generator order: vertex generators
/// first, then cofinite generators, lexicographic within each kind.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "GeneratorDoc", try_from = "GeneratorDoc")]
pub enum Generator {
    Vertex(VertexId),
    Cofinite {
        vertex: VertexId,
        edges: Vec<EdgeId>,
    },
}

impl Generator {
    pub fn vertex(v: impl Into<VertexId>) -> Self {
        Generator::Vertex(v.into())
    }

    pub fn cofinite<E: Into<EdgeId>>(
        v: impl Into<VertexId>,
        edges: impl IntoIterator<Item = E>,
    ) -> Self {
        Generator::Cofinite {
            vertex: v.into(),
            edges: edges.into_iter().map(Into::into).collect(),
        }
    }

    pub fn base_vertex(&self) -> &VertexId {
        match self {
            Generator::Vertex(v) => v,
            Generator::Cofinite { vertex, .. } => vertex,
        }
    }

    pub fn is_cofinite(&self) -> bool {
        matches!(self, Generator::Cofinite { .. })
    }

    /// Order-insensitive lookup key.
    fn key(&self) -> GenKey {
        match self {
            Generator::Vertex(v) => GenKey::Vertex(v.clone()),
            Generator::Cofinite { vertex, edges } => {
                GenKey::Cofinite(vertex.clone(), edges.iter().cloned().collect())
            }
        }
    }

    /// Checks this generator against `g` and sorts `S` by edge index.
    pub fn canonical_in(&self, g: &Graph) -> Result<Generator> {
        match self {
            Generator::Vertex(v) => {
                if !g.has_vertex(v) {
                    return Err(Error::UnknownVertex(v.clone()));
                }
                Ok(self.clone())
            }
            Generator::Cofinite { vertex, edges } => {
                if g.vertex_class(vertex)? != VertexClass::InfiniteEmitter {
                    return Err(Error::InvalidGenerator(format!(
                        "{self}: `{vertex}` is not an infinite emitter"
                    )));
                }
                if edges.is_empty() {
                    return Err(Error::InvalidGenerator(format!("{self}: empty edge set")));
                }
                let mut indexed = Vec::with_capacity(edges.len());
                for e in edges {
                    let edge = g.edge(e).ok_or_else(|| Error::UnknownEdge(e.clone()))?;
                    if &edge.src != vertex {
                        return Err(Error::InvalidGenerator(format!(
                            "{self}: edge `{e}` does not leave `{vertex}`"
                        )));
                    }
                    indexed.push((g.edge_index(e).expect("edge exists"), e.clone()));
                }
                indexed.sort();
                indexed.dedup();
                if indexed.len() != edges.len() {
                    return Err(Error::InvalidGenerator(format!("{self}: repeated edge")));
                }
                Ok(Generator::Cofinite {
                    vertex: vertex.clone(),
                    edges: indexed.into_iter().map(|(_, e)| e).collect(),
                })
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Vertex(v) => write!(f, "a({v})"),
            Generator::Cofinite { vertex, edges } => {
                write!(f, "a({vertex};")?;
                for (i, e) in edges.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum GenKey {
    Vertex(VertexId),
    Cofinite(VertexId, BTreeSet<EdgeId>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind")]
enum GeneratorDoc {
    #[serde(rename = "v")]
    Vertex { v: VertexId },
    #[serde(rename = "vS")]
    Cofinite {
        v: VertexId,
        #[serde(rename = "S")]
        s: Vec<EdgeId>,
    },
}

impl From<Generator> for GeneratorDoc {
    fn from(g: Generator) -> Self {
        match g {
            Generator::Vertex(v) => GeneratorDoc::Vertex { v },
            Generator::Cofinite { vertex, edges } => GeneratorDoc::Cofinite {
                v: vertex,
                s: edges,
            },
        }
    }
}

impl TryFrom<GeneratorDoc> for Generator {
    type Error = String;

    fn try_from(doc: GeneratorDoc) -> std::result::Result<Self, String> {
        match doc {
            GeneratorDoc::Vertex { v } => Ok(Generator::Vertex(v)),
            GeneratorDoc::Cofinite { v, s } => {
                if s.is_empty() {
                    Err(format!("cofinite generator of `{v}` with empty S"))
                } else {
                    Ok(Generator::Cofinite {
                        vertex: v,
                        edges: s,
                    })
                }
            }
        }
    }
}

/// Element of the free commutative monoid on generators: a finite exponent map
/// with no zero entries. The empty map is `0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "ElementDoc", from = "ElementDoc")]
pub struct MonoidElement(BTreeMap<Generator, u64>);

impl MonoidElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn generator(g: Generator) -> Self {
        Self::times(g, 1)
    }

    pub fn times(g: Generator, n: u64) -> Self {
        let mut m = BTreeMap::new();
        if n > 0 {
            m.insert(g, n);
        }
        Self(m)
    }

    pub fn vertex(v: impl Into<VertexId>) -> Self {
        Self::generator(Generator::vertex(v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn multiplicity(&self, g: &Generator) -> u64 {
        self.0.get(g).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Generator, u64)> {
        self.0.iter().map(|(g, &n)| (g, n))
    }

    pub fn support(&self) -> impl Iterator<Item = &Generator> {
        self.0.keys()
    }

    pub fn add_term(&mut self, g: Generator, n: u64) {
        if n > 0 {
            *self.0.entry(g).or_insert(0) += n;
        }
    }

    pub fn scale(&self, n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        Self(self.0.iter().map(|(g, &m)| (g.clone(), m * n)).collect())
    }

    /// Re-expresses this element in `g`'s canonical generator forms.
    pub fn canonical_in(&self, g: &Graph) -> Result<Self> {
        let mut out = Self::zero();
        for (gen, n) in self.terms() {
            out.add_term(gen.canonical_in(g)?, n);
        }
        Ok(out)
    }
}

/// Pointwise exponent sum.
pub fn elem_add(x: &MonoidElement, y: &MonoidElement) -> MonoidElement {
    x.clone() + y.clone()
}

impl Add for MonoidElement {
    type Output = MonoidElement;

    fn add(mut self, rhs: MonoidElement) -> MonoidElement {
        self += rhs;
        self
    }
}

impl AddAssign for MonoidElement {
    fn add_assign(&mut self, rhs: MonoidElement) {
        for (g, n) in rhs.0 {
            self.add_term(g, n);
        }
    }
}

impl std::iter::Sum for MonoidElement {
    fn sum<I: Iterator<Item = MonoidElement>>(iter: I) -> Self {
        iter.fold(MonoidElement::zero(), Add::add)
    }
}

impl From<Generator> for MonoidElement {
    fn from(g: Generator) -> Self {
        MonoidElement::generator(g)
    }
}

impl fmt::Display for MonoidElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (g, n)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if n == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{n}*{g}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    gen: Generator,
    mult: u64,
}

#[derive(Serialize, Deserialize)]
struct ElementDoc {
    terms: Vec<TermDoc>,
}

impl From<MonoidElement> for ElementDoc {
    fn from(x: MonoidElement) -> Self {
        ElementDoc {
            terms: x
                .0
                .into_iter()
                .map(|(gen, mult)| TermDoc { gen, mult })
                .collect(),
        }
    }
}

impl From<ElementDoc> for MonoidElement {
    fn from(doc: ElementDoc) -> Self {
        let mut x = MonoidElement::zero();
        for t in doc.terms {
            x.add_term(t.gen, t.mult);
        }
        x
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type")]
pub enum RelationKind {
    /// `a_v = sum of a_{r(e)}` at a regular vertex.
    #[serde(rename = "regular")]
    Regular { vertex: VertexId },
    /// `a_{v,S} + sum_{e in S} a_{r(e)} = a_v`.
    #[serde(rename = "cofinite")]
    Cofinite { vertex: VertexId, set: Vec<EdgeId> },
    /// `a_{v,S} + sum_{S\T} = a_{v,T} + sum_{T\S}`, stored once per unordered pair.
    #[serde(rename = "exchange")]
    Exchange {
        vertex: VertexId,
        left: Vec<EdgeId>,
        right: Vec<EdgeId>,
    },
    #[serde(rename = "given")]
    Given,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub lhs: MonoidElement,
    pub rhs: MonoidElement,
    pub kind: RelationKind,
}

/// A finitely presented commutative monoid.
#[derive(Clone, Debug)]
pub struct Presentation {
    alphabet: Vec<Generator>,
    relations: Vec<Relation>,
    lookup: HashMap<GenKey, usize>,
}

impl Presentation {
    /// Generic presentation. The alphabet is sorted into canonical order.
    pub fn new(alphabet: Vec<Generator>, relations: Vec<Relation>) -> Result<Self> {
        let mut alphabet = alphabet;
        alphabet.sort();
        alphabet.dedup();
        let mut lookup = HashMap::with_capacity(alphabet.len());
        for (i, g) in alphabet.iter().enumerate() {
            if lookup.insert(g.key(), i).is_some() {
                return Err(Error::InvalidPresentation(format!(
                    "generator {g} listed twice with different edge orders"
                )));
            }
        }
        let mut p = Presentation {
            alphabet,
            relations: Vec::new(),
            lookup,
        };
        let mut canonical = Vec::with_capacity(relations.len());
        for (i, r) in relations.into_iter().enumerate() {
            if r.lhs.is_zero() || r.rhs.is_zero() {
                return Err(Error::InvalidPresentation(format!(
                    "relation {i} has a zero side"
                )));
            }
            canonical.push(Relation {
                lhs: p.canonicalize(&r.lhs)?,
                rhs: p.canonicalize(&r.rhs)?,
                kind: r.kind,
            });
        }
        p.relations = canonical;
        Ok(p)
    }

    /// The presentation of the graph monoid of `g` over its materialized edges.
    pub fn from_graph(g: &Graph) -> Result<Self> {
        Presentation::new(generators(g)?, relations(g)?)
    }

    pub fn alphabet(&self) -> &[Generator] {
        &self.alphabet
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn index_of(&self, g: &Generator) -> Option<usize> {
        self.lookup.get(&g.key()).copied()
    }

    pub fn contains(&self, g: &Generator) -> bool {
        self.index_of(g).is_some()
    }

    /// Rewrites `x` using this alphabet's spelling of each generator.
    pub fn canonicalize(&self, x: &MonoidElement) -> Result<MonoidElement> {
        let mut out = MonoidElement::zero();
        for (g, n) in x.terms() {
            let i = self
                .index_of(g)
                .ok_or_else(|| Error::UnknownGenerator(g.clone()))?;
            out.add_term(self.alphabet[i].clone(), n);
        }
        Ok(out)
    }
}

/// Cofinite subsets of the materialized edges of `v`, each sorted by index,
/// enumerated by bitmask.
fn edge_subsets(g: &Graph, v: &VertexId) -> Result<Vec<Vec<EdgeId>>> {
    let out: Vec<EdgeId> = g.out_edges(v)?.into_iter().map(|e| e.id.clone()).collect();
    if out.len() > MAX_MATERIALIZED {
        return Err(Error::TooManyMaterializedEdges {
            vertex: v.clone(),
            count: out.len(),
            max: MAX_MATERIALIZED,
        });
    }
    Ok((1u32..(1u32 << out.len()))
        .map(|mask| {
            out.iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, e)| e.clone())
                .collect()
        })
        .collect())
}

/// Every element of degree at most `max_degree` over `alphabet`, zero
/// included, in a fixed order.
pub fn elements_up_to_degree(alphabet: &[Generator], max_degree: u64) -> Vec<MonoidElement> {
    fn extend(
        alphabet: &[Generator],
        from: usize,
        left: u64,
        current: &MonoidElement,
        out: &mut Vec<MonoidElement>,
    ) {
        out.push(current.clone());
        if left == 0 {
            return;
        }
        for i in from..alphabet.len() {
            let mut next = current.clone();
            next.add_term(alphabet[i].clone(), 1);
            extend(alphabet, i, left - 1, &next, out);
        }
    }
    let mut out = Vec::new();
    extend(alphabet, 0, max_degree, &MonoidElement::zero(), &mut out);
    out
}

/// The generator alphabet of the graph monoid of `g`, in canonical order.
pub fn generators(g: &Graph) -> Result<Vec<Generator>> {
    g.ensure_valid()?;
    let mut gens: Vec<Generator> = g
        .vertices()
        .iter()
        .cloned()
        .map(Generator::Vertex)
        .collect();
    for (v, _) in g.infinite_emitters() {
        for s in edge_subsets(g, v)? {
            gens.push(Generator::Cofinite {
                vertex: v.clone(),
                edges: s,
            });
        }
    }
    gens.sort();
    Ok(gens)
}

fn range_sum<'a>(g: &Graph, edges: impl IntoIterator<Item = &'a EdgeId>) -> MonoidElement {
    edges
        .into_iter()
        .map(|e| MonoidElement::vertex(g.edge(e).expect("validated edge").dst.clone()))
        .sum()
}

/// Defining relations of the graph monoid of `g`.
pub fn relations(g: &Graph) -> Result<Vec<Relation>> {
    g.ensure_valid()?;
    let mut rels = Vec::new();
    let mut vertices: Vec<&VertexId> = g.vertices().iter().collect();
    vertices.sort();
    for v in vertices {
        match g.vertex_class(v)? {
            VertexClass::Sink => {}
            VertexClass::Regular => {
                let out = g.out_edges(v)?;
                rels.push(Relation {
                    lhs: MonoidElement::vertex(v.clone()),
                    rhs: range_sum(g, out.iter().map(|e| &e.id)),
                    kind: RelationKind::Regular { vertex: v.clone() },
                });
            }
            VertexClass::InfiniteEmitter => {
                let subsets = edge_subsets(g, v)?;
                for s in &subsets {
                    rels.push(Relation {
                        lhs: MonoidElement::generator(Generator::cofinite(v.clone(), s.clone()))
                            + range_sum(g, s),
                        rhs: MonoidElement::vertex(v.clone()),
                        kind: RelationKind::Cofinite {
                            vertex: v.clone(),
                            set: s.clone(),
                        },
                    });
                }
                let mut ordered: Vec<&Vec<EdgeId>> = subsets.iter().collect();
                ordered.sort();
                for (i, s) in ordered.iter().enumerate() {
                    for t in &ordered[i + 1..] {
                        let s_minus_t = s.iter().filter(|e| !t.contains(e));
                        let t_minus_s = t.iter().filter(|e| !s.contains(e));
                        rels.push(Relation {
                            lhs: MonoidElement::generator(Generator::cofinite(
                                v.clone(),
                                (*s).clone(),
                            )) + range_sum(g, s_minus_t),
                            rhs: MonoidElement::generator(Generator::cofinite(
                                v.clone(),
                                (*t).clone(),
                            )) + range_sum(g, t_minus_s),
                            kind: RelationKind::Exchange {
                                vertex: v.clone(),
                                left: (*s).clone(),
                                right: (*t).clone(),
                            },
                        });
                    }
                }
            }
        }
    }
    Ok(rels)
}

/// A map defined on generators, extended additively.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorMap(BTreeMap<Generator, MonoidElement>);

impl GeneratorMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn identity(alphabet: &[Generator]) -> Self {
        Self(
            alphabet
                .iter()
                .map(|g| (g.clone(), MonoidElement::generator(g.clone())))
                .collect(),
        )
    }

    pub fn insert(&mut self, g: Generator, image: MonoidElement) {
        self.0.insert(g, image);
    }

    pub fn get(&self, g: &Generator) -> Option<&MonoidElement> {
        self.0.get(g)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Generator, &MonoidElement)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Generator> {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: &MonoidElement) -> Result<MonoidElement> {
        apply_generator_map(self, x)
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &GeneratorMap) -> Result<GeneratorMap> {
        let mut out = GeneratorMap::new();
        for (g, image) in self.iter() {
            out.insert(g.clone(), then.apply(image)?);
        }
        Ok(out)
    }
}

impl FromIterator<(Generator, MonoidElement)> for GeneratorMap {
    fn from_iter<I: IntoIterator<Item = (Generator, MonoidElement)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

/// Additive extension of `m`: `sum n_g * g  ↦  sum n_g * m(g)`.
pub fn apply_generator_map(m: &GeneratorMap, x: &MonoidElement) -> Result<MonoidElement> {
    let mut out = MonoidElement::zero();
    for (g, n) in x.terms() {
        let image = m.get(g).ok_or_else(|| Error::UnknownGenerator(g.clone()))?;
        out += image.scale(n);
    }
    Ok(out)
}
