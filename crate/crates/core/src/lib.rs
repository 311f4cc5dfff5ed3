//! Exact obstructions and checkable certificates for symplectic embeddings of
//! ellipsoids and ball packings.

pub mod capacities;
pub mod certify;
mod error;
pub mod exact;
pub mod packing;
pub mod toric;
pub mod weights;

pub use error::{Error, Result};
