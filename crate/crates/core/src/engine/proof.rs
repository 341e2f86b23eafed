//! Derivations of rewrite rules from the original relations and the
//! equality certificates built from them.

use std::sync::Arc;

use serde::Serialize;

use super::monomial::Monomial;
use crate::monoid::{MonoidElement, Presentation};

/// Certificates longer than this fall back to a normal-form certificate.
pub const MAX_CHAIN_STEPS: usize = 100_000;

/// Proof that one monomial is congruent to another. Contexts are added to
/// both ends of the proven pair; a reversed segment is read backwards.
#[derive(Debug)]
pub(crate) enum Derivation {
    Axiom { relation: usize, forward: bool },
    Chain(Vec<Segment>),
}

#[derive(Debug)]
pub(crate) struct Segment {
    pub(crate) proof: Arc<Derivation>,
    pub(crate) context: Option<Monomial>,
    pub(crate) reversed: bool,
}

impl Segment {
    pub(crate) fn plain(proof: Arc<Derivation>) -> Self {
        Segment {
            proof,
            context: None,
            reversed: false,
        }
    }

    pub(crate) fn reversed(proof: Arc<Derivation>) -> Self {
        Segment {
            proof,
            context: None,
            reversed: true,
        }
    }

    pub(crate) fn shifted(proof: Arc<Derivation>, context: Monomial, reversed: bool) -> Self {
        Segment {
            proof,
            context: if context.is_zero() {
                None
            } else {
                Some(context)
            },
            reversed,
        }
    }
}

pub(crate) fn chain(segments: Vec<Segment>) -> Arc<Derivation> {
    Arc::new(Derivation::Chain(segments))
}

/// One relation application on a monomial.
#[derive(Clone, Debug)]
pub(crate) struct RawStep {
    pub(crate) relation: usize,
    pub(crate) forward: bool,
    pub(crate) context: Monomial,
}

/// Flattens `d` into relation applications. Returns `None` when the chain
/// exceeds `limit` steps.
pub(crate) fn expand(d: &Derivation, width: usize, limit: usize) -> Option<Vec<RawStep>> {
    let mut out = Vec::new();
    let ctx = Monomial::zero(width);
    if expand_into(d, &ctx, false, &mut out, limit) {
        Some(out)
    } else {
        None
    }
}

fn expand_into(
    d: &Derivation,
    ctx: &Monomial,
    reversed: bool,
    out: &mut Vec<RawStep>,
    limit: usize,
) -> bool {
    match d {
        Derivation::Axiom { relation, forward } => {
            if out.len() >= limit {
                return false;
            }
            out.push(RawStep {
                relation: *relation,
                forward: *forward != reversed,
                context: ctx.clone(),
            });
            true
        }
        Derivation::Chain(segments) => {
            let mut visit = |s: &Segment| {
                let inner = match &s.context {
                    Some(c) => ctx.plus(c),
                    None => ctx.clone(),
                };
                expand_into(&s.proof, &inner, reversed != s.reversed, out, limit)
            };
            if reversed {
                segments.iter().rev().all(&mut visit)
            } else {
                segments.iter().all(&mut visit)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Replace an occurrence of the relation's left side by its right side.
    Forward,
    Backward,
}

/// Replace `context + from` by `context + to` where `(from, to)` is the
/// relation read in `direction`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainStep {
    pub relation: usize,
    pub direction: Direction,
    pub context: MonoidElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EqualityCertificate {
    /// Relation applications turning the left element into the right one.
    Chain { steps: Vec<ChainStep> },
    /// Both sides reduce to this element under the completed system.
    NormalForm { normal_form: MonoidElement },
    /// Distinct normal forms of a completed system.
    Separated {
        lhs_normal_form: MonoidElement,
        rhs_normal_form: MonoidElement,
    },
}

/// Replays a relation chain from `u` against the relations of `p`; true when
/// every step applies and the chain ends at `v`.
pub fn replay_chain(
    p: &Presentation,
    u: &MonoidElement,
    v: &MonoidElement,
    steps: &[ChainStep],
) -> bool {
    let mut current = u.clone();
    for step in steps {
        let Some(rel) = p.relations().get(step.relation) else {
            return false;
        };
        let (from, to) = match step.direction {
            Direction::Forward => (&rel.lhs, &rel.rhs),
            Direction::Backward => (&rel.rhs, &rel.lhs),
        };
        if step.context.clone() + from.clone() != current {
            return false;
        }
        current = step.context.clone() + to.clone();
    }
    &current == v
}
