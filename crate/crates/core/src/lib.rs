//! Exact moving-frame calculus and elimination pipelines for algebraic minimal
//! surfaces in the 3-sphere.

pub mod calculus;
pub mod cases;
pub mod cli;
pub mod elimination;
pub mod error;
pub mod expr;
pub mod extraction;
pub mod minimality;
pub mod sections;

pub use error::{Error, Result};
