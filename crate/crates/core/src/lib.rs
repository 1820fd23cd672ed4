//! A graph-rewriting machine on port graphs.
//!
//! Molecules are port graphs over a handful of node kinds; enzymes are local
//! rewrites on them; a reactor fires enzymes and keeps a trace.

pub mod combinators;
pub mod io;
pub mod iso;
pub mod molecule;
pub mod moves;
pub mod reactor;

pub use iso::{canonical_hash, is_isomorphic, is_isomorphic_with, CanonicalForm, Digest, IsoWitness};
pub use molecule::{
    connected_components, disjoint_union, Label, Molecule, MoleculeError, NodeId, NodeKind, Port, PortRef, Source,
    Target, ValidationReport, Violation,
};
pub use moves::{
    apply, apply_batch, find_sites, Applied, GarbageDelta, GarbageLedger, MoveError, MoveKind, ReactionSite,
};
