//! Numerical building blocks: quadrature, ODE stepping, root finding.

pub mod quad;
pub mod roots;
