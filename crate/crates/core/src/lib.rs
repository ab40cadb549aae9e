//! Exact computations with truncated nilpotent algebras: differential forms,
//! relative de Rham cohomology, the Bloch map on Milnor K-symbols, and
//! Milnor/Tyurina numbers of isolated hypersurface singularities.

pub mod acceptance;
pub mod algebra;
pub mod cli;
pub mod derham;
pub mod error;
pub mod forms;
pub mod ksymbols;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod singularities;

pub use error::{Error, Result};
