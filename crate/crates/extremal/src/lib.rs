//! Extremal testing of network software: constraint catalogs, deterministic
//! invalid-input generators, reference validators and prefilters, an LLM
//! prompt pipeline with record/replay fixtures, and a differential testing
//! harness with protocol artifact emitters.

pub mod catalog;
pub mod generate;
pub mod harness;
pub mod llm;
pub mod payload;
pub mod routemap;
pub mod shortest_path;
pub mod validate;

pub use catalog::{builtin_catalog, lint_catalog, load_catalog, ConstraintCatalog, Protocol};
pub use payload::{Expectation, Payload, Provenance, TestCase};
