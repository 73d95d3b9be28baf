//! Jet calculus for second-order PDEs in two independent variables: point
//! symmetries, differential invariants, Tresse derivatives and differential
//! syzygies, plus the Hunter-Saxton solution pipeline.

pub mod catalog;
pub mod error;
pub mod hs;
pub mod invariants;
pub mod jet;
pub mod numeric;
pub mod pde;
pub mod sym;

pub use error::{Error, Result};
pub use sym::{parse, Expr, JetVar, Var};
