pub mod bounds;
pub mod diagnostics;
pub mod error;
pub mod fock;
pub mod harness;
pub mod linalg;
pub mod trotter;

pub use error::{Error, Result};
