//! Dynamic slicing of place/transition Petri nets.
//!
//! A slice keeps the part of a marked net that can put tokens on a set of
//! criterion places. See [`slicer`] for the algorithms, [`oracles`] for the
//! brute-force checkers used in tests and [`io`] for file formats.

pub mod bench;
pub mod fixtures;
pub mod generate;
pub mod io;
pub mod model;
pub mod oracles;
pub mod properties;
pub mod semantics;
pub mod slicer;

pub use model::{
    node_set, Arc, MarkedPetriNet, Marking, ModelError, NetSizes, NodeId, NodeKind, NodeSet,
    PetriNet,
};
pub use slicer::{slice, Algorithm, SliceError, SliceNote, SliceResult, SlicingCriterion};
