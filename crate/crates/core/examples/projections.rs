//! L2 projections onto the element and face spaces and their convergence.
//!
//! ```text
//! cargo run --example projections
//! ```

use dbc_hdg::fem_basis::{project_trace, project_volume};
use dbc_hdg::analysis::{l2_error_boundary_exact, l2_error_volume_exact, BoundaryField, VolumeField};
use dbc_hdg::mesh::Mesh;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = |x: [f64; 2]| (3.0 * x[0]).sin() * (2.0 * x[1]).cos();
    println!("{:>4} {:>6} {:>12} {:>7} {:>12} {:>7}", "deg", "n", "volume", "order", "boundary", "order");
    for degree in 0..=2 {
        let mut last: Option<(f64, f64)> = None;
        for n in [4, 8, 16, 32] {
            let mesh = Mesh::build_structured(1.0, n)?;
            let qd = 2 * degree + 8;
            let mut vol = Vec::new();
            for e in 0..mesh.n_elements() {
                vol.extend(project_volume(&g, &mesh, e, degree, qd)?);
            }
            let mut bnd = Vec::new();
            for &f in mesh.boundary_faces() {
                bnd.extend(project_trace(&g, &mesh, f, degree, qd)?);
            }
            let ev = l2_error_volume_exact(&VolumeField::scalar(&mesh, degree, &vol), &|x, o: &mut [f64]| o[0] = g(x))?;
            let eb = l2_error_boundary_exact(&BoundaryField { mesh: &mesh, degree, coeffs: &bnd }, &g)?;
            let orders = last.map(|(a, b)| ((a / ev).log2(), (b / eb).log2()));
            let fmt = |o: Option<f64>| o.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
            println!(
                "{degree:>4} {n:>6} {ev:>12.4e} {:>7} {eb:>12.4e} {:>7}",
                fmt(orders.map(|o| o.0)),
                fmt(orders.map(|o| o.1))
            );
            last = Some((ev, eb));
        }
    }
    Ok(())
}
