//! The HDG discretization: unknown layout, element matrices, global
//! assembly, static condensation and solvers.

pub mod assembly;
pub mod dofs;
pub mod fields;
pub(crate) mod local;
pub mod operators;
pub mod solve;

pub use assembly::{assemble_condensed, assemble_monolithic, CondensedSystem, MonolithicSystem};
pub use dofs::{DofMap, FaceSlot, SUPPORTED_DEGREES};
pub use fields::{ForwardSolution, SolutionFields};
pub use local::assembly_quadrature_degree;
pub use operators::{apply_b1, apply_b2, energy_b1, energy_b2, DiscreteTuple, OperatorContext};
pub use solve::{optimality_residual, solve_forward, solve_optimality, system_residual, OptimalityResidual};

use crate::error::{HdgError, Result};

/// Which mesh size enters the `h^{-1}` stabilization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HMode {
    /// Length of the face.
    #[default]
    Local,
    /// Largest element diameter of the mesh.
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    Monolithic,
    #[default]
    Condensed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverOptions {
    pub strategy: Strategy,
    pub h_mode: HMode,
    /// Worker threads for element computations.
    pub threads: usize,
    /// Refuse data that fails [`crate::problem::validate`].
    pub validate: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { strategy: Strategy::default(), h_mode: HMode::default(), threads: thread_cap(), validate: true }
    }
}

pub const THREADS_ENV: &str = "HDG_THREADS";

/// Thread limit from `HDG_THREADS` (1 when unset or unparsable).
pub fn thread_cap() -> usize {
    std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()).filter(|&t| t > 0).unwrap_or(1)
}

/// Maps `f` over `0..n`, in parallel when `threads > 1`. Output order is
/// always index order.
pub(crate) fn par_map<T, F>(n: usize, threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if threads <= 1 {
        return Ok((0..n).map(f).collect());
    }
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HdgError::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(|| (0..n).into_par_iter().map(f).collect()))
}
