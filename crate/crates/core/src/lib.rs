//! Packing semifluids into a rectangular container.
//!
//! A semifluid is rigid along its length and fluid across the other two
//! axes, so any fraction of its volume may be packed. The crate maximizes the
//! value packed into one container with construction heuristics, local ascent
//! and three complete tree searches, all in exact rational arithmetic.

pub mod bench;
pub mod exact;
pub mod generator;
pub mod heuristics;
pub mod model;
pub mod render;
pub mod search;
pub mod solver;

pub use exact::Rational;
