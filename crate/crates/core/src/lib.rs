//! Cycles with prescribed length residues in color-critical graphs.

pub mod canon;
pub mod census;
pub mod coloring;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod kempe;
pub mod verify;

pub use canon::{canonical_form, CanonicalForm};
pub use census::{census_mod, CycleCensus, CycleSeq};
pub use coloring::{chromatic_number, find_coloring, is_critical, Color, Coloring, Prescription};
pub use error::{Error, Result};
pub use graph::{Edge, Graph};
