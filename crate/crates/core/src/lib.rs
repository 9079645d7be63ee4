//! Exact inversion of automorphisms of polynomial algebras, truncated power
//! series, rings of differential operators with divided powers, Weyl
//! algebras, their truncations, and finite-dimensional central simple
//! algebras, over prime fields F_p.

pub mod cli;
pub mod csa;
pub mod descent;
pub mod diffop;
pub mod error;
pub mod linalg;
pub mod monomial;
pub mod multipoly;
pub mod powerseries;
pub mod primefield;
pub mod random;
pub mod weyl;

pub use error::{Error, Result};
pub use primefield::{FpScalar, PrimeChar};
