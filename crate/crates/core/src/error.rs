use thiserror::Error;

use crate::ck::CkViolation;
use crate::graph::{EdgeId, ValidationReport, VertexId};
use crate::monoid::Generator;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(ValidationReport),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(VertexId),

    #[error("unknown edge `{0}`")]
    UnknownEdge(EdgeId),

    #[error("vertex `{0}` is not an infinite emitter")]
    NotInfiniteEmitter(VertexId),

    #[error("cannot shrink materialization of `{vertex}` from {current} to {requested} edges")]
    MaterializationShrink {
        vertex: VertexId,
        current: usize,
        requested: usize,
    },

    #[error(
        "infinite emitter `{vertex}` has {count} materialized edges; at most {max} are supported"
    )]
    TooManyMaterializedEdges {
        vertex: VertexId,
        count: usize,
        max: usize,
    },

    #[error("generator {0} is not in the alphabet")]
    UnknownGenerator(Generator),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("completion budget of {budget} critical-pair reductions exhausted")]
    BudgetExhausted { budget: usize },

    #[error("rewrite system has not been completed")]
    NotCompleted,

    #[error("truncation level {level} is too small; level {required} is required")]
    TruncationTooSmall { level: usize, required: usize },

    #[error(
        "tail vertex w{index}({vertex}) needs {needed} materialized edges of `{vertex}`, only {materialized} present"
    )]
    UnmaterializedPrefix {
        vertex: VertexId,
        index: usize,
        needed: usize,
        materialized: usize,
    },

    #[error("not a graph morphism: {}", .0.join("; "))]
    NotAGraphMorphism(Vec<String>),

    #[error("not a CK-morphism: {}", display_list(.0))]
    NotCkMorphism(Vec<CkViolation>),

    #[error("incoherent direct system: {0}")]
    IncoherentSystem(String),

    #[error("incompatible family: psi_{lower} and psi_{upper} disagree on {generator}")]
    IncompatibleFamily {
        lower: usize,
        upper: usize,
        generator: Generator,
    },

    #[error("graph has a directed cycle through `{0}`")]
    NotAcyclic(VertexId),

    #[error("vertex `{0}` is an infinite emitter; the acyclic oracle needs a row-finite graph")]
    NotRowFinite(VertexId),

    #[error("element mentions cofinite generator {0}; the acyclic oracle only accepts vertex generators")]
    CofiniteGenerator(Generator),

    #[error("arithmetic overflow")]
    Overflow,

    #[error("{origin}: {message}")]
    Input { origin: String, message: String },

    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

fn display_list<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}
