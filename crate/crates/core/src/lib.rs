//! Power circuits with a tree representation, and word problem solvers for
//! the Baumslag group and Higman's group built on top of them.

pub mod baumslag;
pub mod binary;
pub mod circuit;
pub mod error;
pub mod exchange;
pub mod higman;
pub mod marking;
pub mod oracle;
pub mod sdp;
pub mod tree;
pub mod triple;
pub mod word;

pub use circuit::{MarkingId, PowerCircuit};
pub use error::{CircuitError, Result};
pub use marking::{Marking, NodeId, Sign};
pub use tree::{ChainStats, ExtendReport, Gap, TreeRep};
pub use triple::{StoreStats, TripleStore, TypedTriple};
