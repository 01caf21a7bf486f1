// Negated comparisons reject NaN along with out-of-range values; index loops
// mirror the tensor notation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod differential;
pub mod duality;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod grid;
pub mod isometry;
pub mod newton;
pub mod ode;
pub mod orbit;
pub mod patch;
pub mod space;
pub mod suites;

pub use error::{GeomError, Result};
