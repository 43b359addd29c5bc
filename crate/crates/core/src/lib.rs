pub mod cone;
pub mod duality;
pub mod error;
pub mod field;
pub mod harness;
pub mod height;
pub mod lattice;
pub mod periods;
pub mod regularization;
pub mod stacks;

pub use error::{Error, Result};
