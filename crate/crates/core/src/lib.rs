//! Hybridizable discontinuous Galerkin (HDG) discretization of a Dirichlet
//! boundary control problem for the convection-diffusion equation
//!
//! ```text
//!   minimize  J(u) = 1/2 |y - y_d|^2_{L2(Omega)} + gamma/2 |u|^2_{L2(Gamma)}
//!   subject to  -Laplace(y) + beta . grad(y) = f  in Omega,   y = u  on Gamma.
//! ```
//!
//! The state, adjoint and control unknowns of the discrete optimality system
//! are solved together in one linear solve, either monolithically or after
//! static condensation onto the mesh skeleton. The [`analysis`] module runs
//! convergence studies on nested structured meshes of a square.
//!
//! Module overview:
//!
//! * [`mesh`]: structured triangulations, refinement and nesting maps.
//! * [`fem_basis`]: quadrature, orthonormal modal bases, L2 projections.
//! * [`problem`]: problem data, stabilization and validity checks.
//! * [`hdg`]: degrees of freedom, assembly, condensation and the solvers.
//! * [`linalg`]: sparse matrices and the direct solver.
//! * [`analysis`]: error norms, cost functional, rate tables and studies.
//! * [`cli`]: configuration files and the commands behind the `hdg` binary.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod fem_basis;
pub mod hdg;
pub mod linalg;
pub mod mesh;
pub mod problem;

pub use error::{HdgError, Result};
