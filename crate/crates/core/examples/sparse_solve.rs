//! The sparse direct solver on the condensed skeleton system.
//!
//! ```text
//! cargo run --release --example sparse_solve -- [n]
//! ```

use std::time::Instant;

use dbc_hdg::hdg::{assemble_condensed, SolverOptions};
use dbc_hdg::linalg::{factor_and_solve, relative_residual};
use dbc_hdg::mesh::Mesh;
use dbc_hdg::problem::ProblemData;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(32);
    let mesh = Mesh::build_structured(0.125, n)?;
    let data = ProblemData::paper_example(1);
    let t = Instant::now();
    let sys = assemble_condensed(&mesh, &data, &SolverOptions::default())?;
    println!("assembled {} x {} with {} nonzeros in {:.2?}", sys.matrix.nrows(), sys.matrix.ncols(), sys.matrix.nnz(), t.elapsed());
    let t = Instant::now();
    let x = factor_and_solve(&sys.matrix, &sys.rhs)?;
    println!("factored and solved in {:.2?}", t.elapsed());
    println!("relative residual {:.2e}", relative_residual(&sys.matrix, &x, &sys.rhs)?);
    Ok(())
}
