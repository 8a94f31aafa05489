//! Checks problem data against the stabilization assumptions.
//!
//! ```text
//! cargo run --example validate_data
//! ```

use dbc_hdg::mesh::Mesh;
use dbc_hdg::problem::{validate, Convection, ProblemData, Tau1Rule, Tau2};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = Mesh::build_structured(0.125, 4)?;
    let cases = [
        ("benchmark", ProblemData::paper_example(1)),
        ("tau2 = 0.5", ProblemData { tau2: Tau2::Constant(0.5), ..ProblemData::paper_example(1) }),
        ("strong convection", ProblemData { beta: Convection::Constant([3.0, 0.0]), ..ProblemData::paper_example(1) }),
        ("tau1 = tau2", ProblemData { tau1_rule: Tau1Rule::EqualTau2, ..ProblemData::paper_example(1) }),
        ("gamma = 0", ProblemData { gamma: 0.0, ..ProblemData::paper_example(1) }),
    ];
    for (name, data) in cases {
        let report = validate(&data, &mesh);
        println!("{name}: {}", if report.is_valid() { "valid" } else { "rejected" });
        print!("{report}");
        println!();
    }
    Ok(())
}
