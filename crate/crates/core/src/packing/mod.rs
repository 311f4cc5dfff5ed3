//! Four-dimensional ball packings: exceptional classes, Cremona reduction
//! and packing numbers.

mod classes;
mod number;
mod reduce;

pub use classes::{
    enumerate_exceptional, enumerate_exceptional_within, is_exceptional, ClassVector, DEFAULT_NODE_BUDGET,
};
pub use number::packing_number;
pub use reduce::{feasible, FeasibilityResult, Status, Witness, MOVE_LIMIT, WITNESS_BALL_LIMIT};
