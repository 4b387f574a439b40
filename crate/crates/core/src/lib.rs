pub mod bounds;
pub mod canon;
pub mod constructions;
pub mod decomposition;
pub mod enumeration;
pub mod error;
pub mod family;
pub mod lemmas;
pub mod linalg;
pub mod pair;
pub mod polytope;
pub mod product;

pub use error::{Error, Result};
