//! Exact computations for Lie pairs over a point: Chevalley–Eilenberg
//! cochains, connections and Atiyah cocycles, and weight systems on
//! trivalent and chord diagrams built from them.

pub mod catalog;
pub mod ce;
pub mod chord;
pub mod connections;
pub mod diagrams;
pub mod error;
pub mod forms;
pub(crate) mod json;
pub mod liepair;
pub mod linalg;
pub mod network;
pub mod perm;
pub mod scalar;
pub mod tensor;
pub mod weights;

pub use error::{Error, Result};
pub use scalar::Scalar;
