//! In-memory graph pivot engine.
//!
//! Load a property graph, start a [`pivot::Session`], chain categorical
//! pivots with direct filters, ask [`ambiguity`] how a revisit should treat
//! earlier filters, and let [`adaptive`] turn recurring chains into schema
//! rewrites. [`dsl`] scripts drive the same operations from text.

pub mod adaptive;
pub mod ambiguity;
pub mod dsl;
pub mod fixtures;
pub mod graph;
pub mod pivot;
