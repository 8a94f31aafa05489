//! Convergence study for the singular benchmark: solves on n = 2, 4, 8, 16
//! and compares with a solution on n = 128.
//!
//! ```text
//! cargo run --release --example benchmark_study -- [k] [reference_n] [local|global]
//! ```

use dbc_hdg::analysis::{run_study, PolygonLimit, StudyConfig};
use dbc_hdg::hdg::HMode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let k = args.first().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let reference_n = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(128);
    let h_mode = match args.get(2).map(String::as_str) {
        Some("global") => HMode::Global,
        _ => HMode::Local,
    };
    let cfg = StudyConfig { k, reference_n, h_mode, ..Default::default() };

    let start = std::time::Instant::now();
    let table = run_study(&cfg)?;
    println!("k = {k}, reference n = {reference_n}, h mode {h_mode:?} ({:.1?})", start.elapsed());
    print!("{table}");

    let expected = PolygonLimit::benchmark().expected(k);
    println!("guaranteed order for u, y, z, p: {:.3}", expected.control());
    if let Some(q) = expected.flux() {
        println!("guaranteed order for q: {q:.3}");
    }
    Ok(())
}
