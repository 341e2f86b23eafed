//! Graph monoids of directed graphs.
//!
//! Builds the presented monoid of a directed graph with sinks and infinite
//! emitters, decides equality of its elements by commutative completion,
//! constructs desingularizations with their explicit monoid isomorphisms,
//! handles CK-morphisms and direct limits over chains, and checks everything
//! against a path-counting oracle on finite acyclic graphs.

pub mod ck;
pub mod cli;
pub mod corpus;
pub mod desing;
pub mod engine;
pub mod error;
pub mod graph;
pub mod monoid;
pub mod oracle;

pub use error::{Error, Result};
pub use graph::{
    Edge, EdgeId, EdgeIndexDescriptor, Graph, ValidationReport, VertexClass, VertexId, Violation,
};
pub use monoid::{
    apply_generator_map, elem_add, Generator, GeneratorMap, MonoidElement, Presentation, Relation,
    RelationKind,
};
