//! CK-morphisms of graphs, the monoid maps they induce, and colimits of finite
//! chains of graphs and of monoids.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::engine::{complete, RewriteSystem};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, VertexClass, VertexId};
use crate::monoid::{
    elements_up_to_degree, generators, Generator, GeneratorMap, MonoidElement, Presentation,
};

/// A graph morphism given by explicit vertex and edge maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMorphism {
    source: Graph,
    target: Graph,
    vertex_map: BTreeMap<VertexId, VertexId>,
    edge_map: BTreeMap<EdgeId, EdgeId>,
}

#[derive(Serialize, Deserialize)]
struct MorphismDoc {
    vertex_map: BTreeMap<VertexId, VertexId>,
    edge_map: BTreeMap<EdgeId, EdgeId>,
}

impl GraphMorphism {
    /// Checks that the maps are total on `source`, land in `target`, and
    /// commute with source and range.
    pub fn new(
        source: Graph,
        target: Graph,
        vertex_map: BTreeMap<VertexId, VertexId>,
        edge_map: BTreeMap<EdgeId, EdgeId>,
    ) -> Result<Self> {
        source.ensure_valid()?;
        target.ensure_valid()?;
        let mut problems = Vec::new();
        for v in source.vertices() {
            match vertex_map.get(v) {
                None => problems.push(format!("vertex `{v}` has no image")),
                Some(w) if !target.has_vertex(w) => problems.push(format!(
                    "image `{w}` of vertex `{v}` is not a target vertex"
                )),
                Some(_) => {}
            }
        }
        for v in vertex_map.keys() {
            if !source.has_vertex(v) {
                problems.push(format!("vertex map mentions unknown vertex `{v}`"));
            }
        }
        for e in source.edges() {
            let Some(image) = edge_map.get(&e.id) else {
                problems.push(format!("edge `{}` has no image", e.id));
                continue;
            };
            let Some(f) = target.edge(image) else {
                problems.push(format!(
                    "image `{image}` of edge `{}` is not a target edge",
                    e.id
                ));
                continue;
            };
            if vertex_map.get(&e.src) != Some(&f.src) {
                problems.push(format!(
                    "edge `{}`: source of `{image}` is not the image of `{}`",
                    e.id, e.src
                ));
            }
            if vertex_map.get(&e.dst) != Some(&f.dst) {
                problems.push(format!(
                    "edge `{}`: range of `{image}` is not the image of `{}`",
                    e.id, e.dst
                ));
            }
        }
        for e in edge_map.keys() {
            if source.edge(e).is_none() {
                problems.push(format!("edge map mentions unknown edge `{e}`"));
            }
        }
        if !problems.is_empty() {
            return Err(Error::NotAGraphMorphism(problems));
        }
        Ok(GraphMorphism {
            source,
            target,
            vertex_map,
            edge_map,
        })
    }

    pub fn identity(g: &Graph) -> Result<Self> {
        Self::inclusion(g, g)
    }

    /// The morphism sending every vertex and edge of `source` to the one with
    /// the same id in `target`.
    pub fn inclusion(source: &Graph, target: &Graph) -> Result<Self> {
        let vertex_map = source
            .vertices()
            .iter()
            .map(|v| (v.clone(), v.clone()))
            .collect();
        let edge_map = source
            .edges()
            .iter()
            .map(|e| (e.id.clone(), e.id.clone()))
            .collect();
        Self::new(source.clone(), target.clone(), vertex_map, edge_map)
    }

    pub fn from_json_str(source: &Graph, target: &Graph, s: &str) -> Result<Self> {
        let doc: MorphismDoc = serde_json::from_str(s)?;
        Self::from_doc(source, target, doc)
    }

    fn from_doc(source: &Graph, target: &Graph, doc: MorphismDoc) -> Result<Self> {
        Self::new(source.clone(), target.clone(), doc.vertex_map, doc.edge_map)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(MorphismDoc {
            vertex_map: self.vertex_map.clone(),
            edge_map: self.edge_map.clone(),
        })
        .expect("morphism serializes")
    }

    pub fn source(&self) -> &Graph {
        &self.source
    }

    pub fn target(&self) -> &Graph {
        &self.target
    }

    pub fn vertex_image(&self, v: &VertexId) -> Option<&VertexId> {
        self.vertex_map.get(v)
    }

    pub fn edge_image(&self, e: &EdgeId) -> Option<&EdgeId> {
        self.edge_map.get(e)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &GraphMorphism) -> Result<GraphMorphism> {
        if self.target != next.source {
            return Err(Error::IncoherentSystem(
                "composed morphisms do not share the middle graph".into(),
            ));
        }
        let vertex_map = self
            .vertex_map
            .iter()
            .map(|(v, w)| (v.clone(), next.vertex_map[w].clone()))
            .collect();
        let edge_map = self
            .edge_map
            .iter()
            .map(|(e, f)| (e.clone(), next.edge_map[f].clone()))
            .collect();
        GraphMorphism::new(
            self.source.clone(),
            next.target.clone(),
            vertex_map,
            edge_map,
        )
    }
}

/// `second ∘ first`.
pub fn compose(first: &GraphMorphism, second: &GraphMorphism) -> Result<GraphMorphism> {
    first.then(second)
}

/// A reason a graph morphism fails to be a CK-morphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CkViolation {
    VertexCollision {
        image: VertexId,
        sources: Vec<VertexId>,
    },
    EdgeCollision {
        image: EdgeId,
        sources: Vec<EdgeId>,
    },
    /// Out-edges of the image of a regular vertex missed by the edge map.
    NotBijective {
        vertex: VertexId,
        image: VertexId,
        uncovered: Vec<EdgeId>,
    },
    RegularToInfiniteEmitter {
        vertex: VertexId,
        image: VertexId,
    },
    EmitterNotPreserved {
        vertex: VertexId,
        image: VertexId,
    },
}

impl fmt::Display for CkViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |items: &[_]| -> String {
            items
                .iter()
                .map(|x: &String| format!("`{x}`"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        match self {
            CkViolation::VertexCollision { image, sources } => {
                let s: Vec<String> = sources.iter().map(ToString::to_string).collect();
                write!(f, "vertices {} all map to `{image}`", list(&s))
            }
            CkViolation::EdgeCollision { image, sources } => {
                let s: Vec<String> = sources.iter().map(ToString::to_string).collect();
                write!(f, "edges {} all map to `{image}`", list(&s))
            }
            CkViolation::NotBijective {
                vertex,
                image,
                uncovered,
            } => {
                let s: Vec<String> = uncovered.iter().map(ToString::to_string).collect();
                write!(
                    f,
                    "regular vertex `{vertex}`: out-edges {} of `{image}` are not images",
                    list(&s)
                )
            }
            CkViolation::RegularToInfiniteEmitter { vertex, image } => {
                write!(
                    f,
                    "regular vertex `{vertex}` maps to infinite emitter `{image}`"
                )
            }
            CkViolation::EmitterNotPreserved { vertex, image } => {
                write!(
                    f,
                    "infinite emitter `{vertex}` maps to `{image}`, which is not one"
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CkReport {
    pub is_ck: bool,
    pub violations: Vec<CkViolation>,
}

fn collisions<K: Ord + Clone, V: Ord + Clone>(map: &BTreeMap<K, V>) -> Vec<(V, Vec<K>)> {
    let mut by_image: BTreeMap<&V, Vec<K>> = BTreeMap::new();
    for (k, v) in map {
        by_image.entry(v).or_default().push(k.clone());
    }
    by_image
        .into_iter()
        .filter(|(_, ks)| ks.len() > 1)
        .map(|(v, ks)| (v.clone(), ks))
        .collect()
}

/// Injective on vertices and edges, a bijection on out-edges at every regular
/// vertex, and infinite emitters sent to infinite emitters.
pub fn is_ck_morphism(m: &GraphMorphism) -> Result<CkReport> {
    let mut violations = Vec::new();
    for (image, sources) in collisions(&m.vertex_map) {
        violations.push(CkViolation::VertexCollision { image, sources });
    }
    for (image, sources) in collisions(&m.edge_map) {
        violations.push(CkViolation::EdgeCollision { image, sources });
    }
    for v in m.source.vertices() {
        let image = &m.vertex_map[v];
        let target_class = m.target.vertex_class(image)?;
        match m.source.vertex_class(v)? {
            VertexClass::Sink => {}
            VertexClass::Regular => {
                if target_class == VertexClass::InfiniteEmitter {
                    violations.push(CkViolation::RegularToInfiniteEmitter {
                        vertex: v.clone(),
                        image: image.clone(),
                    });
                    continue;
                }
                let hit: BTreeSet<&EdgeId> = m
                    .source
                    .out_edges(v)?
                    .iter()
                    .map(|e| &m.edge_map[&e.id])
                    .collect();
                let uncovered: Vec<EdgeId> = m
                    .target
                    .out_edges(image)?
                    .iter()
                    .filter(|f| !hit.contains(&f.id))
                    .map(|f| f.id.clone())
                    .collect();
                if !uncovered.is_empty() {
                    violations.push(CkViolation::NotBijective {
                        vertex: v.clone(),
                        image: image.clone(),
                        uncovered,
                    });
                }
            }
            VertexClass::InfiniteEmitter => {
                if target_class != VertexClass::InfiniteEmitter {
                    violations.push(CkViolation::EmitterNotPreserved {
                        vertex: v.clone(),
                        image: image.clone(),
                    });
                }
            }
        }
    }
    Ok(CkReport {
        is_ck: violations.is_empty(),
        violations,
    })
}

/// `a_v ↦ b_{η(v)}` and `a_{v,S} ↦ b_{η(v),η(S)}` on the whole alphabet of
/// the source. Refuses morphisms that are not CK.
pub fn induced_monoid_morphism(m: &GraphMorphism) -> Result<GeneratorMap> {
    let report = is_ck_morphism(m)?;
    if !report.is_ck {
        return Err(Error::NotCkMorphism(report.violations));
    }
    let mut map = GeneratorMap::new();
    for g in generators(&m.source)? {
        let image = match &g {
            Generator::Vertex(v) => Generator::Vertex(m.vertex_map[v].clone()),
            Generator::Cofinite { vertex, edges } => Generator::Cofinite {
                vertex: m.vertex_map[vertex].clone(),
                edges: edges.iter().map(|e| m.edge_map[e].clone()).collect(),
            }
            .canonical_in(&m.target)?,
        };
        map.insert(g, MonoidElement::generator(image));
    }
    Ok(map)
}

/// A finite chain `E_0 -> E_1 -> ... -> E_k` of CK-morphisms.
#[derive(Clone, Debug)]
pub struct GraphChain {
    graphs: Vec<Graph>,
    morphisms: Vec<GraphMorphism>,
}

#[derive(Deserialize)]
struct SystemDoc {
    graphs: Vec<serde_json::Value>,
    morphisms: Vec<MorphismDoc>,
}

impl GraphChain {
    pub fn new(graphs: Vec<Graph>, morphisms: Vec<GraphMorphism>) -> Result<Self> {
        if graphs.is_empty() {
            return Err(Error::IncoherentSystem(
                "a chain needs at least one graph".into(),
            ));
        }
        if morphisms.len() + 1 != graphs.len() {
            return Err(Error::IncoherentSystem(format!(
                "{} graphs need {} connecting morphisms, got {}",
                graphs.len(),
                graphs.len() - 1,
                morphisms.len()
            )));
        }
        for (i, m) in morphisms.iter().enumerate() {
            if m.source != graphs[i] || m.target != graphs[i + 1] {
                return Err(Error::IncoherentSystem(format!(
                    "morphism {i} does not go from graph {i} to graph {}",
                    i + 1
                )));
            }
            let report = is_ck_morphism(m)?;
            if !report.is_ck {
                return Err(Error::NotCkMorphism(report.violations));
            }
        }
        for g in &graphs {
            g.ensure_valid()?;
        }
        Ok(GraphChain { graphs, morphisms })
    }

    /// `g` with the infinite emitter `v` materialized to each count in turn,
    /// linked by same-name inclusions.
    pub fn materializing(g: &Graph, v: &VertexId, counts: &[usize]) -> Result<Self> {
        let graphs = counts
            .iter()
            .map(|&k| g.materialize_edges(v, k))
            .collect::<Result<Vec<_>>>()?;
        let morphisms = graphs
            .windows(2)
            .map(|w| GraphMorphism::inclusion(&w[0], &w[1]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(graphs, morphisms)
    }

    /// Parses `{"graphs": [...], "morphisms": [...]}` with morphism `i`
    /// going from graph `i` to graph `i + 1`.
    pub fn from_json_str(s: &str) -> Result<Self> {
        let doc: SystemDoc = serde_json::from_str(s)?;
        let graphs = doc
            .graphs
            .iter()
            .map(|v| Graph::from_json_str(&v.to_string()))
            .collect::<Result<Vec<_>>>()?;
        if doc.morphisms.len() + 1 != graphs.len() {
            return Err(Error::IncoherentSystem(format!(
                "{} graphs need {} connecting morphisms, got {}",
                graphs.len(),
                graphs.len().saturating_sub(1),
                doc.morphisms.len()
            )));
        }
        let morphisms = doc
            .morphisms
            .into_iter()
            .enumerate()
            .map(|(i, m)| GraphMorphism::from_doc(&graphs[i], &graphs[i + 1], m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(graphs, morphisms)
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn morphisms(&self) -> &[GraphMorphism] {
        &self.morphisms
    }

    pub fn top(&self) -> &Graph {
        self.graphs.last().expect("chain is non-empty")
    }

    /// The composite `E_i -> E_j` for `i <= j`.
    pub fn connecting(&self, i: usize, j: usize) -> Result<GraphMorphism> {
        if i > j || j >= self.graphs.len() {
            return Err(Error::IncoherentSystem(format!(
                "no connecting morphism from {i} to {j}"
            )));
        }
        let mut m = GraphMorphism::identity(&self.graphs[i])?;
        for step in &self.morphisms[i..j] {
            m = m.then(step)?;
        }
        Ok(m)
    }
}

/// The colimit of a finite chain: its top graph with the canonical maps.
#[derive(Clone, Debug)]
pub struct GraphColimit {
    pub graph: Graph,
    pub injections: Vec<GraphMorphism>,
}

pub fn colimit_graph(chain: &GraphChain) -> Result<GraphColimit> {
    let top = chain.len() - 1;
    let injections = (0..chain.len())
        .map(|i| chain.connecting(i, top))
        .collect::<Result<Vec<_>>>()?;
    Ok(GraphColimit {
        graph: chain.top().clone(),
        injections,
    })
}

/// A finite chain of completed presentations with connecting generator maps.
#[derive(Clone, Debug)]
pub struct MonoidChain {
    levels: Vec<RewriteSystem>,
    maps: Vec<GeneratorMap>,
}

impl MonoidChain {
    /// Completes every level and checks that each map is defined on the whole
    /// alphabet of its level and sends every relation to an equal pair.
    pub fn new(
        presentations: Vec<Presentation>,
        maps: Vec<GeneratorMap>,
        budget: usize,
    ) -> Result<Self> {
        if presentations.is_empty() || maps.len() + 1 != presentations.len() {
            return Err(Error::IncoherentSystem(format!(
                "{} levels need {} connecting maps, got {}",
                presentations.len(),
                presentations.len().saturating_sub(1),
                maps.len()
            )));
        }
        let levels = presentations
            .iter()
            .map(|p| complete(p, budget))
            .collect::<Result<Vec<_>>>()?;
        let mut canonical_maps = Vec::with_capacity(maps.len());
        for (i, map) in maps.iter().enumerate() {
            let (from, to) = (&presentations[i], &presentations[i + 1]);
            let domain: BTreeSet<&Generator> = map.domain().collect();
            if domain.len() != from.alphabet().len()
                || !from.alphabet().iter().all(|g| domain.contains(g))
            {
                return Err(Error::IncoherentSystem(format!(
                    "map {i} is not defined exactly on the generators of level {i}"
                )));
            }
            let mut canonical = GeneratorMap::new();
            for (g, image) in map.iter() {
                let image = to.canonicalize(image).map_err(|e| {
                    Error::IncoherentSystem(format!(
                        "map {i}: image of {g} is not in level {}: {e}",
                        i + 1
                    ))
                })?;
                canonical.insert(g.clone(), image);
            }
            for r in from.relations() {
                let l = canonical.apply(&r.lhs)?;
                let rr = canonical.apply(&r.rhs)?;
                if levels[i + 1].normal_form(&l)? != levels[i + 1].normal_form(&rr)? {
                    return Err(Error::IncoherentSystem(format!(
                        "map {i} sends relation {} = {} to an unequal pair",
                        r.lhs, r.rhs
                    )));
                }
            }
            canonical_maps.push(canonical);
        }
        Ok(MonoidChain {
            levels,
            maps: canonical_maps,
        })
    }

    /// Graph monoids of a chain with the maps induced by its morphisms.
    pub fn from_graph_chain(chain: &GraphChain, budget: usize) -> Result<Self> {
        let presentations = chain
            .graphs()
            .iter()
            .map(Presentation::from_graph)
            .collect::<Result<Vec<_>>>()?;
        let maps = chain
            .morphisms()
            .iter()
            .map(induced_monoid_morphism)
            .collect::<Result<Vec<_>>>()?;
        Self::new(presentations, maps, budget)
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn level(&self, i: usize) -> &RewriteSystem {
        &self.levels[i]
    }

    pub fn map(&self, i: usize) -> &GeneratorMap {
        &self.maps[i]
    }

    /// `μ_ij` for `i <= j`.
    pub fn connecting(&self, i: usize, j: usize) -> Result<GeneratorMap> {
        if i > j || j >= self.levels.len() {
            return Err(Error::IncoherentSystem(format!(
                "no connecting map from {i} to {j}"
            )));
        }
        let mut m = GeneratorMap::identity(self.levels[i].presentation().alphabet());
        for step in &self.maps[i..j] {
            m = m.then(step)?;
        }
        Ok(m)
    }

    /// `μ_ij(x)`.
    pub fn push(&self, x: &MonoidElement, i: usize, j: usize) -> Result<MonoidElement> {
        if i > j || j >= self.levels.len() {
            return Err(Error::IncoherentSystem(format!(
                "no connecting map from {i} to {j}"
            )));
        }
        let mut x = x.clone();
        for step in &self.maps[i..j] {
            x = step.apply(&x)?;
        }
        Ok(x)
    }
}

/// The class of `rep` at `level` in the colimit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LimitElement {
    pub level: usize,
    pub rep: MonoidElement,
}

/// The colimit of a monoid chain, realized as pairs `(i, s)` up to
/// `(i, s) ≡ (j, t)` iff `μ_ik(s) ≈ μ_jk(t)` at some level `k >= i, j`.
#[derive(Clone, Debug)]
pub struct MonoidColimit {
    chain: MonoidChain,
}

pub fn colimit_monoid(chain: MonoidChain) -> MonoidColimit {
    MonoidColimit { chain }
}

impl MonoidColimit {
    pub fn chain(&self) -> &MonoidChain {
        &self.chain
    }

    pub fn top_level(&self) -> usize {
        self.chain.len() - 1
    }

    /// `μ_{i,∞}(x)`.
    pub fn inject(&self, level: usize, x: &MonoidElement) -> Result<LimitElement> {
        if level >= self.chain.len() {
            return Err(Error::IncoherentSystem(format!("no level {level}")));
        }
        let rep = self.chain.level(level).presentation().canonicalize(x)?;
        Ok(LimitElement { level, rep })
    }

    /// First level at which the two elements become equal, if any.
    pub fn equivalence_level(&self, a: &LimitElement, b: &LimitElement) -> Result<Option<usize>> {
        let start = a.level.max(b.level);
        let mut x = self.chain.push(&a.rep, a.level, start)?;
        let mut y = self.chain.push(&b.rep, b.level, start)?;
        for k in start..self.chain.len() {
            if k > start {
                x = self.chain.map(k - 1).apply(&x)?;
                y = self.chain.map(k - 1).apply(&y)?;
            }
            let level = self.chain.level(k);
            if level.normal_form(&x)? == level.normal_form(&y)? {
                return Ok(Some(k));
            }
        }
        Ok(None)
    }

    pub fn equivalent(&self, a: &LimitElement, b: &LimitElement) -> Result<bool> {
        Ok(self.equivalence_level(a, b)?.is_some())
    }

    /// A canonical label of the class of `a`: the normal form of its image at
    /// the top level.
    pub fn class_key(&self, a: &LimitElement) -> Result<MonoidElement> {
        let top = self.top_level();
        let x = self.chain.push(&a.rep, a.level, top)?;
        self.chain.level(top).normal_form(&x)
    }

    pub fn add(&self, a: &LimitElement, b: &LimitElement) -> Result<LimitElement> {
        let level = a.level.max(b.level);
        let rep =
            self.chain.push(&a.rep, a.level, level)? + self.chain.push(&b.rep, b.level, level)?;
        Ok(LimitElement { level, rep })
    }
}

/// The map out of the colimit induced by a compatible family `ψ_i`.
#[derive(Clone, Debug)]
pub struct UniversalMap {
    maps: Vec<GeneratorMap>,
}

impl UniversalMap {
    /// `ψ((i, s)) = ψ_i(s)`.
    pub fn apply(&self, a: &LimitElement) -> Result<MonoidElement> {
        self.maps
            .get(a.level)
            .ok_or_else(|| Error::IncoherentSystem(format!("no level {}", a.level)))?
            .apply(&a.rep)
    }

    pub fn component(&self, i: usize) -> &GeneratorMap {
        &self.maps[i]
    }
}

/// Checks `ψ_i ≈ ψ_j ∘ μ_ij` in `target` on every generator of every level
/// `i <= j` and returns the induced map.
pub fn universal_map(
    colimit: &MonoidColimit,
    family: Vec<GeneratorMap>,
    target: &RewriteSystem,
) -> Result<UniversalMap> {
    let chain = colimit.chain();
    if family.len() != chain.len() {
        return Err(Error::IncoherentSystem(format!(
            "{} levels need {} maps, got {}",
            chain.len(),
            chain.len(),
            family.len()
        )));
    }
    for i in 0..chain.len() {
        for g in chain.level(i).presentation().alphabet() {
            let direct = family[i]
                .get(g)
                .ok_or_else(|| Error::IncoherentSystem(format!("map {i} is undefined on {g}")))?;
            let direct = target.normal_form(direct)?;
            let mut x = MonoidElement::generator(g.clone());
            for (j, map) in family.iter().enumerate().skip(i) {
                if j > i {
                    x = chain.map(j - 1).apply(&x)?;
                }
                if target.normal_form(&map.apply(&x)?)? != direct {
                    return Err(Error::IncompatibleFamily {
                        lower: i,
                        upper: j,
                        generator: g.clone(),
                    });
                }
            }
        }
    }
    Ok(UniversalMap { maps: family })
}

/// Two elements on which the limit and the limit graph's monoid disagree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuityCounterexample {
    pub left: LimitElement,
    pub right: LimitElement,
    pub equal_in_limit: bool,
    pub equal_at_top: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuityReport {
    pub levels: usize,
    pub max_degree: u64,
    pub elements_checked: usize,
    pub classes: usize,
    pub compatible: bool,
    pub counterexamples: Vec<ContinuityCounterexample>,
    /// Pairs of one level that are unequal there but equal in the limit.
    pub level_collapses: usize,
    pub generators_checked: usize,
    pub unhit_generators: Vec<Generator>,
}

impl ContinuityReport {
    pub fn passed(&self) -> bool {
        self.compatible && self.counterexamples.is_empty() && self.unhit_generators.is_empty()
    }
}

/// Compares the colimit of the graph monoids of `chain` with the graph monoid
/// of the colimit graph on every element of degree at most `max_degree` at
/// every level, and checks that every generator of the latter is hit.
pub fn check_continuity(
    chain: &GraphChain,
    max_degree: u64,
    budget: usize,
) -> Result<ContinuityReport> {
    let graph_colimit = colimit_graph(chain)?;
    let limit_system = complete(&Presentation::from_graph(&graph_colimit.graph)?, budget)?;
    let colimit = colimit_monoid(MonoidChain::from_graph_chain(chain, budget)?);
    let family = graph_colimit
        .injections
        .iter()
        .map(induced_monoid_morphism)
        .collect::<Result<Vec<_>>>()?;
    let (compatible, psi) = match universal_map(&colimit, family.clone(), &limit_system) {
        Ok(psi) => (true, psi),
        Err(Error::IncompatibleFamily { .. }) => (
            false,
            UniversalMap {
                maps: family.clone(),
            },
        ),
        Err(e) => return Err(e),
    };

    let mut counterexamples = Vec::new();
    let mut level_collapses = 0;
    let mut by_limit: HashMap<MonoidElement, (LimitElement, MonoidElement)> = HashMap::new();
    let mut by_top: HashMap<MonoidElement, LimitElement> = HashMap::new();
    let mut elements_checked = 0;
    for i in 0..colimit.chain().len() {
        let level = colimit.chain().level(i);
        let mut by_level: HashMap<MonoidElement, MonoidElement> = HashMap::new();
        for x in elements_up_to_degree(level.presentation().alphabet(), max_degree) {
            elements_checked += 1;
            let a = colimit.inject(i, &x)?;
            let limit_key = colimit.class_key(&a)?;
            let top_key = limit_system.normal_form(&psi.apply(&a)?)?;
            match by_level.get(&level.normal_form(&x)?) {
                Some(k) if k != &limit_key => level_collapses += 1,
                Some(_) => {}
                None => {
                    by_level.insert(level.normal_form(&x)?, limit_key.clone());
                }
            }
            match by_limit.get(&limit_key) {
                Some((first, first_top)) => {
                    if !colimit.equivalent(first, &a)? || first_top != &top_key {
                        counterexamples.push(ContinuityCounterexample {
                            left: first.clone(),
                            right: a.clone(),
                            equal_in_limit: colimit.equivalent(first, &a)?,
                            equal_at_top: first_top == &top_key,
                        });
                    }
                }
                None => {
                    by_limit.insert(limit_key.clone(), (a.clone(), top_key.clone()));
                }
            }
            match by_top.get(&top_key) {
                Some(first) => {
                    if colimit.class_key(first)? != limit_key {
                        counterexamples.push(ContinuityCounterexample {
                            left: first.clone(),
                            right: a.clone(),
                            equal_in_limit: false,
                            equal_at_top: true,
                        });
                    }
                }
                None => {
                    by_top.insert(top_key, a);
                }
            }
        }
    }

    let mut hit = BTreeSet::new();
    for map in &family {
        for (_, image) in map.iter() {
            let mut terms = image.terms();
            if let (Some((g, 1)), None) = (terms.next(), terms.next()) {
                hit.insert(g.clone());
            }
        }
    }
    let top_alphabet = limit_system.presentation().alphabet();
    let unhit_generators = top_alphabet
        .iter()
        .filter(|g| !hit.contains(*g))
        .cloned()
        .collect();

    Ok(ContinuityReport {
        levels: colimit.chain().len(),
        max_degree,
        elements_checked,
        classes: by_limit.len(),
        compatible,
        counterexamples,
        level_collapses,
        generators_checked: top_alphabet.len(),
        unhit_generators,
    })
}
