//! Full-compliance checking of structured process models against
//! conditional obligations.
//!
//! The engine walks each trigger task's path to the root of the process
//! tree, aggregating classification labels of the surrounding blocks, and
//! decides in polynomial time whether some execution violates an
//! obligation. An exhaustive trace-level oracle implements the same
//! semantics by enumeration and is used for cross-checking.

pub mod classify;
pub mod cli;
pub mod delta;
pub mod engine;
pub mod fixtures;
pub mod gen;
pub mod io;
pub mod literal;
pub mod model;
pub mod obligation;
pub mod oracle;
pub mod tree;

pub use literal::{Atom, Literal, LiteralSet};
pub use model::{Block, BlockKind, Execution, ProcessModel};
pub use obligation::{ConditionalObligation, ObligationKind};
