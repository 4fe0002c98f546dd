//! Ternary forms, their discriminants, and tools for enumerating plane
//! quartics of small discriminant.

pub mod algebra;
pub mod error;
pub mod fingerprint;
pub mod linalg;
pub mod discriminant;
pub mod reduce;
pub mod resultant;
pub mod search;
pub mod tree;

pub use error::{Error, Result};
