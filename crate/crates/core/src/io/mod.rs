//! Text format and Graphviz export.

mod dot;
mod text;

pub use dot::export_dot;
pub use text::{parse_molecule, print_molecule, ParseError, ParseErrorKind};
