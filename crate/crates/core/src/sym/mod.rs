//! Symbolic core: kernels, normalized rational expressions, derivations,
//! substitution, zero tests, evaluation and parsing.

mod derive;
mod display;
mod eval;
mod expr;
mod kernel;
mod parse;
mod poly;
mod subst;
mod zero;

pub use derive::{derive, partial, Derivation, Partial};
pub use eval::{Env, FnBinding, NumFn};
pub use expr::{Expr, Univariate};
pub use kernel::{Dir, JetVar, Kernel, KernelKind, Var};
pub use parse::{parse, Parser};
pub use subst::{Lambda, Subst};
pub use zero::{is_zero, set_default_seed, Verdict, ZeroTest};

/// Exact rational coefficients.
pub type Q = num_rational::BigRational;
