//! ZX-calculus: diagrams, their matrix semantics, rewrite rules and the
//! rulial/monoidal experiments built on them.

pub mod diagram;
pub mod matcher;
pub mod rules;
pub mod semantics;

pub use diagram::{CanonicalDiagram, Color, Diagram, DiagramJson, Kind, Node, PhaseLike};
pub use semantics::{diagram_matrix, diagram_matrix_with, spider_matrix, verify_rule, Schedule, Semantics, Verdict};
