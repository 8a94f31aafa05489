//! Solves the benchmark optimality system on one mesh with both linear
//! algebra strategies and reports the cost and the residuals.
//!
//! ```text
//! cargo run --release --example optimal_control -- [n] [k]
//! ```

use std::time::Instant;

use dbc_hdg::analysis::cost_functional;
use dbc_hdg::hdg::{optimality_residual, solve_optimality, system_residual, DofMap, SolverOptions, Strategy};
use dbc_hdg::mesh::Mesh;
use dbc_hdg::problem::ProblemData;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<usize> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let n = args.first().copied().unwrap_or(8);
    let k = args.get(1).copied().unwrap_or(1);
    let mesh = Mesh::build_structured(0.125, n)?;
    let data = ProblemData::paper_example(k);
    let dofs = DofMap::new(&mesh, k)?;
    println!("n = {n}, k = {k}: {} unknowns, {} on the skeleton", dofs.monolithic_dim(), dofs.skeleton_dim());

    let mut solutions = Vec::new();
    for strategy in [Strategy::Monolithic, Strategy::Condensed] {
        let opts = SolverOptions { strategy, ..Default::default() };
        let t = Instant::now();
        let sol = solve_optimality(&mesh, &data, &opts)?;
        let elapsed = t.elapsed();
        let res = optimality_residual(&sol, &mesh, &data, &opts)?;
        println!(
            "{strategy:?}: {elapsed:.2?}, J = {:.8e}, system residual {:.2e}, optimality residual {:.2e}",
            cost_functional(&sol, &mesh, &data)?,
            system_residual(&sol, &mesh, &data, &opts)?,
            res.relative
        );
        solutions.push(sol);
    }
    println!("relative difference between strategies: {:.2e}", solutions[1].relative_difference(&solutions[0]));
    let umax = solutions[1].u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    println!("largest control coefficient: {umax:.4e}");
    Ok(())
}
