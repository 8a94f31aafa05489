//! Nested structured meshes: sizes, parent maps and the plain-text dump.
//!
//! ```text
//! cargo run --example mesh_hierarchy -- [coarsest_n] [levels]
//! ```

use dbc_hdg::mesh::MeshHierarchy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<usize> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    let coarsest = args.first().copied().unwrap_or(1);
    let levels = args.get(1).copied().unwrap_or(4);
    let h = MeshHierarchy::new(0.125, coarsest, levels)?;

    println!("{:>5} {:>9} {:>7} {:>9} {:>9} {:>10}", "n", "vertices", "elems", "interior", "boundary", "h");
    for m in h.levels() {
        println!(
            "{:>5} {:>9} {:>7} {:>9} {:>9} {:>10.4e}",
            m.subdivisions(),
            m.vertices().len(),
            m.n_elements(),
            m.interior_faces().len(),
            m.boundary_faces().len(),
            m.h()
        );
    }

    let finest = h.n_levels() - 1;
    let e = h.level(finest).n_elements() - 1;
    println!("element {e} of n={} lies in element {} of n={}", h.level(finest).subdivisions(), h.ancestor_element(finest, e, 0), coarsest);

    println!("\ncoarsest mesh:");
    h.level(0).write_dump(std::io::stdout().lock())?;
    Ok(())
}
