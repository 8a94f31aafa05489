//! Energy and adjoint identities of the HDG operators on random tuples,
//! with and without the coupling `tau1 = tau2 + beta.n`.
//!
//! ```text
//! cargo run --example verify_identities
//! ```

use dbc_hdg::cli::{verify_identities, IdentitySettings};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for k in 0..=2 {
        print!("{}", verify_identities(&IdentitySettings { k, samples: 20, ..Default::default() })?);
    }
    println!("\nwith tau1 = tau2:");
    print!("{}", verify_identities(&IdentitySettings { samples: 20, tau1_equals_tau2: true, ..Default::default() })?);
    Ok(())
}
