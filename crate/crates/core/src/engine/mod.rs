//! Word problem for finitely presented commutative monoids.
//!
//! Relations are oriented by a graded-lexicographic term order and completed
//! into a confluent rewrite system (the commutative analogue of Knuth-Bendix
//! completion, equivalently a Buchberger run on the binomial ideal). Every
//! rule carries a derivation from the original relations, so equalities come
//! with replayable certificates.

mod bfs;
mod monomial;
mod proof;

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

pub use bfs::{congruence_bfs, BfsOracle, CongruenceBall};
pub use proof::{replay_chain, ChainStep, Direction, EqualityCertificate, MAX_CHAIN_STEPS};

use crate::error::{Error, Result};
use crate::monoid::{MonoidElement, Presentation};
use monomial::{term_order, Monomial};
use proof::{chain, expand, Derivation, Segment};

/// Default number of critical-pair reductions before completion gives up.
pub const DEFAULT_BUDGET: usize = 100_000;

#[derive(Clone, Debug)]
struct Rule {
    lhs: Monomial,
    rhs: Monomial,
    proof: Arc<Derivation>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CompletionStats {
    pub pair_reductions: usize,
    pub rules_added: usize,
}

/// Oriented rules over a presentation's alphabet. Normal forms are only
/// available once the system is completed.
#[derive(Clone, Debug)]
pub struct RewriteSystem {
    presentation: Presentation,
    rules: Vec<Rule>,
    completed: bool,
    stats: CompletionStats,
}

pub(crate) fn to_monomial(p: &Presentation, x: &MonoidElement) -> Result<Monomial> {
    let mut m = Monomial::zero(p.alphabet().len());
    for (g, n) in x.terms() {
        let i = p
            .index_of(g)
            .ok_or_else(|| Error::UnknownGenerator(g.clone()))?;
        m.0[i] += u32::try_from(n).map_err(|_| Error::Overflow)?;
    }
    Ok(m)
}

pub(crate) fn to_element(p: &Presentation, m: &Monomial) -> MonoidElement {
    let mut x = MonoidElement::zero();
    for (g, &n) in p.alphabet().iter().zip(&m.0) {
        x.add_term(g.clone(), u64::from(n));
    }
    x
}

fn reduce_with<'a, I>(rules: I, x: &Monomial, mut trace: Option<&mut Vec<Segment>>) -> Monomial
where
    I: Iterator<Item = &'a Rule> + Clone,
{
    let mut current = x.clone();
    'outer: loop {
        for rule in rules.clone() {
            if rule.lhs.divides(&current) {
                let context = current.minus(&rule.lhs);
                current = context.plus(&rule.rhs);
                if let Some(t) = trace.as_deref_mut() {
                    t.push(Segment::shifted(rule.proof.clone(), context, false));
                }
                continue 'outer;
            }
        }
        return current;
    }
}

impl RewriteSystem {
    /// Each relation oriented by the term order, without completion.
    pub fn oriented(p: &Presentation) -> Result<Self> {
        let mut rules = Vec::new();
        for (i, r) in p.relations().iter().enumerate() {
            let lhs = to_monomial(p, &r.lhs)?;
            let rhs = to_monomial(p, &r.rhs)?;
            let proof = Arc::new(Derivation::Axiom {
                relation: i,
                forward: true,
            });
            match term_order(&lhs, &rhs) {
                std::cmp::Ordering::Greater => rules.push(Rule { lhs, rhs, proof }),
                std::cmp::Ordering::Less => rules.push(Rule {
                    lhs: rhs,
                    rhs: lhs,
                    proof: chain(vec![Segment::reversed(proof)]),
                }),
                std::cmp::Ordering::Equal => {}
            }
        }
        Ok(RewriteSystem {
            presentation: p.clone(),
            rules,
            completed: false,
            stats: CompletionStats::default(),
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn is_completed(&self) -> bool {
        self.completed
    }

    pub fn stats(&self) -> CompletionStats {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rules as `(lhs, rhs)` element pairs, lowest term first.
    pub fn rules(&self) -> Vec<(MonoidElement, MonoidElement)> {
        self.rules
            .iter()
            .map(|r| {
                (
                    to_element(&self.presentation, &r.lhs),
                    to_element(&self.presentation, &r.rhs),
                )
            })
            .collect()
    }

    fn reduce_traced(&self, x: &Monomial) -> (Monomial, Vec<Segment>) {
        let mut trace = Vec::new();
        let nf = reduce_with(self.rules.iter(), x, Some(&mut trace));
        (nf, trace)
    }

    pub(crate) fn normal_monomial(&self, x: &Monomial) -> Monomial {
        reduce_with(self.rules.iter(), x, None)
    }

    pub fn normal_form(&self, x: &MonoidElement) -> Result<MonoidElement> {
        if !self.completed {
            return Err(Error::NotCompleted);
        }
        let m = to_monomial(&self.presentation, x)?;
        Ok(to_element(&self.presentation, &self.normal_monomial(&m)))
    }

    /// Decides `u ≈ v`, with a certificate.
    pub fn equal(&self, u: &MonoidElement, v: &MonoidElement) -> Result<Decision> {
        if !self.completed {
            return Err(Error::NotCompleted);
        }
        let p = &self.presentation;
        let mu = to_monomial(p, u)?;
        let mv = to_monomial(p, v)?;
        let (nu, tu) = self.reduce_traced(&mu);
        let (nv, tv) = self.reduce_traced(&mv);
        if nu != nv {
            return Ok(Decision {
                equal: false,
                certificate: EqualityCertificate::Separated {
                    lhs_normal_form: to_element(p, &nu),
                    rhs_normal_form: to_element(p, &nv),
                },
            });
        }
        let proof = chain(vec![
            Segment::plain(chain(tu)),
            Segment::reversed(chain(tv)),
        ]);
        let certificate = match expand(&proof, p.alphabet().len(), MAX_CHAIN_STEPS) {
            Some(raw) => EqualityCertificate::Chain {
                steps: raw
                    .into_iter()
                    .map(|s| ChainStep {
                        relation: s.relation,
                        direction: if s.forward {
                            Direction::Forward
                        } else {
                            Direction::Backward
                        },
                        context: to_element(p, &s.context),
                    })
                    .collect(),
            },
            None => EqualityCertificate::NormalForm {
                normal_form: to_element(p, &nu),
            },
        };
        Ok(Decision {
            equal: true,
            certificate,
        })
    }

    /// Checks a certificate for `u` versus `v` against this system.
    pub fn verify(
        &self,
        u: &MonoidElement,
        v: &MonoidElement,
        cert: &EqualityCertificate,
    ) -> Result<bool> {
        Ok(match cert {
            EqualityCertificate::Chain { steps } => replay_chain(&self.presentation, u, v, steps),
            EqualityCertificate::NormalForm { normal_form } => {
                &self.normal_form(u)? == normal_form && &self.normal_form(v)? == normal_form
            }
            EqualityCertificate::Separated {
                lhs_normal_form,
                rhs_normal_form,
            } => {
                lhs_normal_form != rhs_normal_form
                    && &self.normal_form(u)? == lhs_normal_form
                    && &self.normal_form(v)? == rhs_normal_form
            }
        })
    }

    /// Every rule is oriented and, when completed, every critical pair joins.
    pub fn check_confluence(&self) -> bool {
        let oriented = self
            .rules
            .iter()
            .all(|r| term_order(&r.lhs, &r.rhs) == std::cmp::Ordering::Greater);
        oriented
            && self.rules.iter().enumerate().all(|(i, a)| {
                self.rules[i + 1..].iter().all(|b| {
                    let l = a.lhs.lcm(&b.lhs);
                    let x = l.minus(&a.lhs).plus(&a.rhs);
                    let y = l.minus(&b.lhs).plus(&b.rhs);
                    self.normal_monomial(&x) == self.normal_monomial(&y)
                })
            })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decision {
    pub equal: bool,
    pub certificate: EqualityCertificate,
}

struct Equation {
    a: Monomial,
    b: Monomial,
    proof: Arc<Derivation>,
}

struct Completer {
    rules: Vec<Option<Rule>>,
    equations: VecDeque<Equation>,
    pairs: VecDeque<(usize, usize)>,
    stats: CompletionStats,
    budget: usize,
}

impl Completer {
    fn live(&self) -> impl Iterator<Item = &Rule> + Clone {
        self.rules.iter().flatten()
    }

    fn reduce(&self, x: &Monomial) -> (Monomial, Vec<Segment>) {
        let mut trace = Vec::new();
        let nf = reduce_with(self.live(), x, Some(&mut trace));
        (nf, trace)
    }

    fn charge(&mut self) -> Result<()> {
        self.stats.pair_reductions += 1;
        if self.stats.pair_reductions > self.budget {
            Err(Error::BudgetExhausted {
                budget: self.budget,
            })
        } else {
            Ok(())
        }
    }

    fn process(&mut self, eq: Equation) {
        let (na, ta) = self.reduce(&eq.a);
        let (nb, tb) = self.reduce(&eq.b);
        if na == nb {
            return;
        }
        let proof = chain(vec![
            Segment::reversed(chain(ta)),
            Segment::plain(eq.proof),
            Segment::plain(chain(tb)),
        ]);
        let rule = match term_order(&na, &nb) {
            std::cmp::Ordering::Greater => Rule {
                lhs: na,
                rhs: nb,
                proof,
            },
            _ => Rule {
                lhs: nb,
                rhs: na,
                proof: chain(vec![Segment::reversed(proof)]),
            },
        };
        let new_index = self.rules.len();
        let new_lhs = rule.lhs.clone();
        self.rules.push(Some(rule));
        self.stats.rules_added += 1;

        for j in 0..new_index {
            let Some(old) = &self.rules[j] else { continue };
            if new_lhs.divides(&old.lhs) {
                let old = self.rules[j].take().expect("live rule");
                self.equations.push_back(Equation {
                    a: old.lhs,
                    b: old.rhs,
                    proof: old.proof,
                });
            } else if new_lhs.divides(&old.rhs) {
                let rhs = old.rhs.clone();
                let (nr, tr) = self.reduce(&rhs);
                let old = self.rules[j].as_mut().expect("live rule");
                old.proof = chain(vec![
                    Segment::plain(old.proof.clone()),
                    Segment::plain(chain(tr)),
                ]);
                old.rhs = nr;
            }
        }
        for j in 0..new_index {
            if let Some(old) = &self.rules[j] {
                if old.lhs.overlaps(&new_lhs) {
                    self.pairs.push_back((j, new_index));
                }
            }
        }
    }

    fn critical(&self, i: usize, j: usize) -> Option<Equation> {
        let (a, b) = (self.rules[i].as_ref()?, self.rules[j].as_ref()?);
        let l = a.lhs.lcm(&b.lhs);
        let ca = l.minus(&a.lhs);
        let cb = l.minus(&b.lhs);
        Some(Equation {
            a: ca.plus(&a.rhs),
            b: cb.plus(&b.rhs),
            proof: chain(vec![
                Segment::shifted(a.proof.clone(), ca, true),
                Segment::shifted(b.proof.clone(), cb, false),
            ]),
        })
    }

    fn run(&mut self) -> Result<()> {
        loop {
            while let Some(eq) = self.equations.pop_front() {
                self.process(eq);
            }
            if let Some((i, j)) = self.pairs.pop_front() {
                if let Some(eq) = self.critical(i, j) {
                    self.charge()?;
                    self.equations.push_back(eq);
                }
                continue;
            }
            // Final sweep over all live pairs; normally finds nothing.
            let live: Vec<usize> = (0..self.rules.len())
                .filter(|&i| self.rules[i].is_some())
                .collect();
            let mut found = false;
            for (x, &i) in live.iter().enumerate() {
                for &j in &live[x + 1..] {
                    let (a, b) = (
                        self.rules[i].as_ref().unwrap(),
                        self.rules[j].as_ref().unwrap(),
                    );
                    if !a.lhs.overlaps(&b.lhs) {
                        continue;
                    }
                    let eq = self.critical(i, j).expect("live pair");
                    self.charge()?;
                    let na = reduce_with(self.live(), &eq.a, None);
                    let nb = reduce_with(self.live(), &eq.b, None);
                    if na != nb {
                        self.equations.push_back(eq);
                        found = true;
                    }
                }
            }
            if !found {
                return Ok(());
            }
        }
    }
}

/// Completes the relations of `p` into a confluent, terminating rewrite
/// system. Fails with [`Error::BudgetExhausted`] after `budget` critical-pair
/// reductions.
pub fn complete(p: &Presentation, budget: usize) -> Result<RewriteSystem> {
    let mut equations = VecDeque::with_capacity(p.relations().len());
    for (i, r) in p.relations().iter().enumerate() {
        equations.push_back(Equation {
            a: to_monomial(p, &r.lhs)?,
            b: to_monomial(p, &r.rhs)?,
            proof: Arc::new(Derivation::Axiom {
                relation: i,
                forward: true,
            }),
        });
    }
    let mut c = Completer {
        rules: Vec::new(),
        equations,
        pairs: VecDeque::new(),
        stats: CompletionStats::default(),
        budget,
    };
    c.run()?;
    let mut rules: Vec<Rule> = c.rules.into_iter().flatten().collect();
    rules.sort_by(|a, b| term_order(&a.lhs, &b.lhs));
    Ok(RewriteSystem {
        presentation: p.clone(),
        rules,
        completed: true,
        stats: c.stats,
    })
}

pub fn normal_form(rs: &RewriteSystem, x: &MonoidElement) -> Result<MonoidElement> {
    rs.normal_form(x)
}

/// Completes `p` and decides `u ≈ v`.
pub fn equal(
    p: &Presentation,
    u: &MonoidElement,
    v: &MonoidElement,
    budget: usize,
) -> Result<Decision> {
    complete(p, budget)?.equal(u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeIndexDescriptor, Graph};
    use crate::monoid::{Generator, Relation, RelationKind};

    fn a(v: &str) -> MonoidElement {
        MonoidElement::vertex(v)
    }

    fn avs(v: &str, s: &[&str]) -> MonoidElement {
        MonoidElement::generator(Generator::cofinite(v, s.iter().copied()))
    }

    fn given(lhs: MonoidElement, rhs: MonoidElement) -> Relation {
        Relation {
            lhs,
            rhs,
            kind: RelationKind::Given,
        }
    }

    fn vw() -> Vec<Generator> {
        vec![Generator::vertex("v"), Generator::vertex("w")]
    }

    #[test]
    fn empty_relations_complete_to_nothing() {
        let p = Presentation::new(vw(), vec![]).unwrap();
        let rs = complete(&p, DEFAULT_BUDGET).unwrap();
        assert!(rs.is_empty());
        assert_eq!(rs.normal_form(&a("v")).unwrap(), a("v"));
    }

    #[test]
    fn single_relation_is_oriented_towards_later_generator() {
        let p = Presentation::new(vw(), vec![given(a("v"), a("w"))]).unwrap();
        let rs = complete(&p, DEFAULT_BUDGET).unwrap();
        assert_eq!(rs.rules(), vec![(a("v"), a("w"))]);
    }

    #[test]
    fn idempotent_generator() {
        let p = Presentation::new(vw(), vec![given(a("v").scale(2), a("v"))]).unwrap();
        let rs = complete(&p, DEFAULT_BUDGET).unwrap();
        assert_eq!(rs.rules(), vec![(a("v").scale(2), a("v"))]);
        assert_eq!(rs.normal_form(&a("v").scale(5)).unwrap(), a("v"));
        assert_eq!(rs.normal_form(&a("w").scale(3)).unwrap(), a("w").scale(3));
        assert_eq!(
            rs.normal_form(&MonoidElement::zero()).unwrap(),
            MonoidElement::zero()
        );
    }

    #[test]
    fn uncompleted_system_refuses_normal_forms() {
        let p = Presentation::new(vw(), vec![given(a("v"), a("w"))]).unwrap();
        let rs = RewriteSystem::oriented(&p).unwrap();
        assert!(matches!(rs.normal_form(&a("v")), Err(Error::NotCompleted)));
    }

    fn rose() -> Graph {
        let mut g = Graph::new();
        g.add_vertex("v")
            .add_edge("e", "v", "v")
            .add_edge("f", "v", "v");
        g
    }

    #[test]
    fn rose_with_two_loops() {
        let p = Presentation::from_graph(&rose()).unwrap();
        let rs = complete(&p, DEFAULT_BUDGET).unwrap();
        assert_eq!(rs.normal_form(&a("v").scale(3)).unwrap(), a("v"));
    }

    fn emitter_to_w(k: usize) -> Graph {
        let mut g = Graph::new();
        g.add_vertex("v").add_vertex("w");
        g.set_infinite_emitter("v", EdgeIndexDescriptor::constant("w"));
        g.materialize_edges(&"v".into(), k).unwrap()
    }

    #[test]
    fn exchange_relation_decides_equal() {
        let g = emitter_to_w(2);
        let p = Presentation::from_graph(&g).unwrap();
        let rs = complete(&p, DEFAULT_BUDGET).unwrap();
        let u = avs("v", &["e0^v"]) + a("w");
        let v = avs("v", &["e1^v"]) + a("w");
        let d = rs.equal(&u, &v).unwrap();
        assert!(d.equal);
        assert!(rs.verify(&u, &v, &d.certificate).unwrap());
        assert!(matches!(d.certificate, EqualityCertificate::Chain { .. }));

        let u = a("v");
        let v = avs("v", &["e0^v", "e1^v"]) + a("w").scale(2);
        let d = rs.equal(&u, &v).unwrap();
        assert!(d.equal);
        assert!(rs.verify(&u, &v, &d.certificate).unwrap());
    }

    #[test]
    fn nothing_nonzero_equals_zero() {
        let g = emitter_to_w(2);
        let p = Presentation::from_graph(&g).unwrap();
        let d = equal(&p, &a("v"), &MonoidElement::zero(), DEFAULT_BUDGET).unwrap();
        assert!(!d.equal);
        assert!(matches!(
            d.certificate,
            EqualityCertificate::Separated { .. }
        ));
    }

    #[test]
    fn acyclic_forward_rewriting() {
        let mut g = Graph::new();
        g.add_vertex("v").add_vertex("w").add_edge("e", "v", "w");
        let p = Presentation::from_graph(&g).unwrap();
        let rs = complete(&p, DEFAULT_BUDGET).unwrap();
        assert_eq!(rs.normal_form(&a("v")).unwrap(), a("w"));
    }

    #[test]
    fn completed_systems_are_confluent() {
        for g in [rose(), emitter_to_w(1), emitter_to_w(2), emitter_to_w(3)] {
            let p = Presentation::from_graph(&g).unwrap();
            let rs = complete(&p, DEFAULT_BUDGET).unwrap();
            assert!(rs.check_confluence());
        }
    }

    #[test]
    fn tiny_budget_is_reported() {
        let g = emitter_to_w(3);
        let p = Presentation::from_graph(&g).unwrap();
        assert!(matches!(
            complete(&p, 0),
            Err(Error::BudgetExhausted { budget: 0 })
        ));
    }

    #[test]
    fn completion_is_deterministic() {
        let g = emitter_to_w(3);
        let p = Presentation::from_graph(&g).unwrap();
        let r1 = complete(&p, DEFAULT_BUDGET).unwrap().rules();
        let r2 = complete(&p, DEFAULT_BUDGET).unwrap().rules();
        assert_eq!(r1, r2);
    }
}
