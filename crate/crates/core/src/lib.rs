//! Exponential vertex-degree-based indices on trees.
//!
//! The crate computes indices such as the second Zagreb index `M2` and their
//! exponentials `e^M2 = Σ m(i,j)·e^(ij)` exactly, provides the improving tree
//! moves that push `e^M2` towards its maximum, and searches all free trees on
//! n vertices for the extremal ones.
//!
//! ```
//! use zext::{enumeration::double_star, indices::{exp_vdb_index, IndexName}};
//!
//! let t = double_star(2, 2).unwrap();
//! let v = exp_vdb_index(&t, IndexName::M2.def()).unwrap();
//! assert_eq!(v.to_string(), "e^9 + 4e^3");
//! ```

pub mod enumeration;
pub mod error;
pub mod format;
pub mod indices;
pub mod search;
pub mod spectrum;
pub mod transforms;
pub mod tree;
pub mod value;

pub use error::{Error, Result};
pub use tree::{Tree, Vertex};
pub use value::{compare, BigExpValue, ExpSum, Precision};
