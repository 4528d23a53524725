//! Exact arithmetic: scalars, generators, sparse polynomials, rational expressions,
//! relation normalization and the text format.

pub mod coeff;
pub mod gen;
pub mod ledger;
pub mod parse;
pub mod poly;
pub mod rational;

pub use coeff::{Coeff, Rational};
pub use gen::{Aux, Gen, Registry, SecName};
pub use ledger::{normalize_relation, Ledger};
pub use parse::{parse_poly, parse_relations};
pub use poly::{Monomial, Poly, Weight};
pub use rational::RationalExpr;
