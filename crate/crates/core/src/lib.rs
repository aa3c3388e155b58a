//! Embedding-based schema matching.
//!
//! The engine finds table and attribute correspondences between two
//! relational schemata in two steps. Table matching proposes candidate table
//! pairs from schema labels, column contents or both; an optional human
//! review confirms or rejects them; attribute matching then scores the
//! attributes of every surviving pair by name, comment or instances and
//! selects the final correspondences. A precision/recall harness scores
//! results against gold alignments.

pub mod attribute_matcher;
pub mod config;
pub mod embedding;
pub mod error;
pub mod evaluation;
pub mod exec;
pub mod orchestrator;
pub mod representation;
pub mod sampling;
pub mod schema;
pub mod table_matcher;

pub use error::{Error, Result};
