//! Forward convection-diffusion solves against a manufactured solution.
//!
//! ```text
//! cargo run --release --example mms_convergence -- [k]
//! ```

use dbc_hdg::analysis::{run_mms, Column, ExpectedRates};
use dbc_hdg::hdg::SolverOptions;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let table = run_mms(k, &[8, 16, 32, 64], [1.0, 1.0], 1.0, &SolverOptions::default())?;
    print!("{table}");
    let (sy, sq) = ExpectedRates::smooth_forward(k);
    let last = |c| table.rates(c).last().copied().flatten().unwrap_or(f64::NAN);
    println!("final orders: y {:.2} (expected {sy}), q {:.2} (expected {sq})", last(Column::Y), last(Column::Q));
    Ok(())
}
