//! Shared numerical kernels: adaptive ODE integration, quadrature and
//! one-dimensional searches.

pub mod ode;
pub mod quad;
pub mod roots;
