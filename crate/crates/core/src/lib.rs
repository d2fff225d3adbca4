//! k-partition refinement, symmetry certificates, coloring-tensor algebra and a
//! brute-force automorphism oracle.

pub mod cert;
pub mod commands;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod io;
pub mod ops;
pub mod oracle;
pub mod stabilize;
pub mod tensor;
pub mod tuple;
mod unionfind;

pub use error::{Error, Result};
pub use graph::Graph;
pub use ops::{Mode, Subspace};
pub use tensor::scalar::{Float, Float32, Rational};
pub use tuple::{KPartition, KTuple, TupleSpace, VertexSet};
