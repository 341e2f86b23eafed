//! Seeded random graphs, elements and CK-morphisms for property checks.
//! Identical seeds give identical output on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ck::GraphMorphism;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, EdgeIndexDescriptor, Graph, VertexClass, VertexId};
use crate::monoid::{Generator, MonoidElement};

pub type CorpusRng = ChaCha8Rng;

pub fn rng(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random acyclic row-finite graph on `v0, v1, ...` whose edges all go
/// from a lower to a higher index.
pub fn random_dag(rng: &mut CorpusRng, max_vertices: usize, max_edges: usize) -> Graph {
    let n = rng.gen_range(2..=max_vertices.max(2));
    let mut g = Graph::new();
    for i in 0..n {
        g.add_vertex(format!("v{i}"));
    }
    let m = rng.gen_range(1..=max_edges.max(1));
    for k in 0..m {
        let i = rng.gen_range(0..n - 1);
        let j = rng.gen_range(i + 1..n);
        g.add_edge(format!("e{k}"), format!("v{i}"), format!("v{j}"));
    }
    g
}

/// A random valid graph on `v0, v1, ...` where each vertex is a sink, a
/// regular vertex with one to three out-edges, or an infinite emitter with
/// up to `max_materialized` materialized edges. Cycles are allowed.
pub fn random_graph(rng: &mut CorpusRng, max_vertices: usize, max_materialized: usize) -> Graph {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let names: Vec<VertexId> = (0..n).map(|i| VertexId::new(format!("v{i}"))).collect();
    let mut g = Graph::new();
    for v in &names {
        g.add_vertex(v.clone());
    }
    let mut edge = 0;
    for v in &names {
        let roll: f64 = rng.gen();
        if roll < 0.3 {
            continue;
        }
        if roll < 0.65 {
            for _ in 0..rng.gen_range(1..=3) {
                let dst = names.choose(rng).expect("non-empty").clone();
                g.add_edge(format!("e{edge}"), v.clone(), dst);
                edge += 1;
            }
            continue;
        }
        let prefix = (0..rng.gen_range(0..=2))
            .map(|_| names.choose(rng).expect("non-empty").clone())
            .collect();
        let cycle = (0..rng.gen_range(1..=2))
            .map(|_| names.choose(rng).expect("non-empty").clone())
            .collect();
        g.set_infinite_emitter(v.clone(), EdgeIndexDescriptor::new(prefix, cycle));
        let k = rng.gen_range(0..=max_materialized);
        g = g.materialize_edges(v, k).expect("emitter just declared");
    }
    g
}

/// A random element of degree at most `max_degree` over `alphabet`.
pub fn random_element(
    rng: &mut CorpusRng,
    alphabet: &[Generator],
    max_degree: u64,
) -> MonoidElement {
    let mut x = MonoidElement::zero();
    if alphabet.is_empty() {
        return x;
    }
    for _ in 0..rng.gen_range(0..=max_degree) {
        x.add_term(alphabet.choose(rng).expect("non-empty").clone(), 1);
    }
    x
}

/// Applies up to `steps` random moves `a_v -> sum of a_{r(e)}` at regular
/// vertices, read off the graph directly.
pub fn random_forward_rewrite(
    rng: &mut CorpusRng,
    g: &Graph,
    x: &MonoidElement,
    steps: usize,
) -> Result<MonoidElement> {
    let mut x = x.clone();
    for _ in 0..steps {
        let mut expandable = Vec::new();
        for gen in x.support() {
            if let Generator::Vertex(v) = gen {
                if g.vertex_class(v)? == VertexClass::Regular {
                    expandable.push(v.clone());
                }
            }
        }
        let Some(v) = expandable.choose(rng).cloned() else {
            break;
        };
        let mut next = MonoidElement::zero();
        for (gen, n) in x.terms() {
            let n = if gen == &Generator::Vertex(v.clone()) {
                n - 1
            } else {
                n
            };
            next.add_term(gen.clone(), n);
        }
        for e in g.out_edges(&v)? {
            next.add_term(Generator::Vertex(e.dst.clone()), 1);
        }
        x = next;
    }
    Ok(x)
}

/// `n` element pairs over the vertex generators of `g`: even positions hold
/// two independent elements, odd positions two rewrites of one element.
pub fn random_vertex_pairs(
    rng: &mut CorpusRng,
    g: &Graph,
    n: usize,
    max_degree: u64,
) -> Result<Vec<(MonoidElement, MonoidElement)>> {
    let alphabet: Vec<Generator> = g
        .vertices()
        .iter()
        .cloned()
        .map(Generator::Vertex)
        .collect();
    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        if k % 2 == 0 {
            pairs.push((
                random_element(rng, &alphabet, max_degree),
                random_element(rng, &alphabet, max_degree),
            ));
        } else {
            let w = random_element(rng, &alphabet, max_degree);
            let (a, b) = (rng.gen_range(0..6), rng.gen_range(0..6));
            pairs.push((
                random_forward_rewrite(rng, g, &w, a)?,
                random_forward_rewrite(rng, g, &w, b)?,
            ));
        }
    }
    Ok(pairs)
}

/// Vertices of an acyclic graph, every edge pointing forward.
pub fn topological_order(g: &Graph) -> Result<Vec<VertexId>> {
    let mut indegree: std::collections::BTreeMap<&VertexId, usize> =
        g.vertices().iter().map(|v| (v, 0)).collect();
    for e in g.edges() {
        *indegree.get_mut(&e.dst).expect("valid graph") += 1;
    }
    let mut ready: Vec<&VertexId> = g.vertices().iter().filter(|v| indegree[v] == 0).collect();
    ready.reverse();
    let mut order = Vec::with_capacity(g.vertices().len());
    while let Some(v) = ready.pop() {
        order.push(v.clone());
        for e in g.out_edges(v)? {
            let d = indegree.get_mut(&e.dst).expect("valid graph");
            *d -= 1;
            if *d == 0 {
                ready.push(&e.dst);
            }
        }
    }
    if order.len() != g.vertices().len() {
        let stuck = g
            .vertices()
            .iter()
            .find(|v| indegree[v] > 0)
            .expect("cycle");
        return Err(Error::NotAcyclic(stuck.clone()));
    }
    Ok(order)
}

/// A random CK-morphism out of the acyclic graph `e`: a renamed copy of `e`
/// together with new vertices, and new edges leaving either new vertices or
/// images of sinks. The target stays acyclic.
pub fn random_ck_extension(
    rng: &mut CorpusRng,
    e: &Graph,
    max_new_vertices: usize,
    max_new_edges: usize,
) -> Result<GraphMorphism> {
    let rename = |v: &VertexId| VertexId::new(format!("{v}'"));
    let mut order: Vec<(VertexId, bool)> = topological_order(e)?
        .iter()
        .map(|v| {
            (
                rename(v),
                e.out_edges(v).map(|o| o.is_empty()).unwrap_or(false),
            )
        })
        .collect();
    for i in 0..rng.gen_range(0..=max_new_vertices) {
        let at = rng.gen_range(0..=order.len());
        order.insert(at, (VertexId::new(format!("n{i}")), true));
    }
    let mut f = Graph::new();
    for v in e.vertices() {
        f.add_vertex(rename(v));
    }
    for (v, _) in &order {
        if !f.has_vertex(v) {
            f.add_vertex(v.clone());
        }
    }
    for edge in e.edges() {
        f.add_edge(
            format!("{}'", edge.id),
            rename(&edge.src),
            rename(&edge.dst),
        );
    }
    let sources: Vec<usize> = (0..order.len().saturating_sub(1))
        .filter(|&i| order[i].1)
        .collect();
    if !sources.is_empty() {
        for k in 0..rng.gen_range(0..=max_new_edges) {
            let i = *sources.choose(rng).expect("non-empty");
            let j = rng.gen_range(i + 1..order.len());
            f.add_edge(format!("x{k}"), order[i].0.clone(), order[j].0.clone());
        }
    }
    let vertex_map = e
        .vertices()
        .iter()
        .map(|v| (v.clone(), rename(v)))
        .collect();
    let edge_map = e
        .edges()
        .iter()
        .map(|x| (x.id.clone(), EdgeId::new(format!("{}'", x.id))))
        .collect();
    GraphMorphism::new(e.clone(), f, vertex_map, edge_map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ck::is_ck_morphism;
    use crate::oracle::{gamma_acyclic, is_acyclic};

    #[test]
    fn seeded_output_is_reproducible() {
        let a = random_graph(&mut rng(3), 6, 3);
        let b = random_graph(&mut rng(3), 6, 3);
        assert_eq!(a, b);
        assert_eq!(
            random_dag(&mut rng(9), 7, 10),
            random_dag(&mut rng(9), 7, 10)
        );
    }

    #[test]
    fn generated_graphs_are_valid() {
        let mut r = rng(1);
        for _ in 0..200 {
            let g = random_graph(&mut r, 6, 3);
            assert!(g.validate().is_empty());
            assert!(g.vertices().len() <= 6);
            assert!(g
                .infinite_emitters()
                .all(|(v, _)| g.materialized_count(v) <= 3));
            let d = random_dag(&mut r, 7, 10);
            assert!(d.validate().is_empty() && is_acyclic(&d) && d.is_row_finite());
            assert!(d.vertices().len() <= 7 && d.edges().len() <= 10);
        }
    }

    #[test]
    fn extensions_are_ck_and_acyclic() {
        let mut r = rng(5);
        for _ in 0..100 {
            let e = random_dag(&mut r, 7, 10);
            let m = random_ck_extension(&mut r, &e, 3, 4).unwrap();
            assert!(is_ck_morphism(&m).unwrap().is_ck);
            assert!(is_acyclic(m.target()));
        }
    }

    #[test]
    fn forward_rewrites_keep_path_counts() {
        let mut r = rng(8);
        for _ in 0..50 {
            let g = random_dag(&mut r, 7, 10);
            for (u, v) in random_vertex_pairs(&mut r, &g, 20, 4).unwrap() {
                assert!(u.support().chain(v.support()).all(|x| !x.is_cofinite()));
            }
            let x = MonoidElement::vertex("v0").scale(2);
            let y = random_forward_rewrite(&mut r, &g, &x, 4).unwrap();
            assert_eq!(
                gamma_acyclic(&g, &x).unwrap(),
                gamma_acyclic(&g, &y).unwrap()
            );
        }
    }

    #[test]
    fn random_elements_respect_degree() {
        let alphabet = vec![Generator::vertex("a"), Generator::vertex("b")];
        let mut r = rng(0);
        for _ in 0..100 {
            assert!(random_element(&mut r, &alphabet, 5).degree() <= 5);
        }
        assert!(random_element(&mut r, &[], 5).is_zero());
    }
}
