//! Random-tuple checks of the structural identities of the discretization.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::hdg::{assemble_monolithic, DiscreteTuple, HMode, OperatorContext, SolutionFields, SolverOptions};
use crate::mesh::Mesh;
use crate::problem::{Convection, ProblemData, Tau1Rule, Tau2};

pub const IDENTITY_TOLERANCE: f64 = 1e-10;
pub const ASSEMBLY_TOLERANCE: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub struct IdentitySettings {
    pub k: usize,
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub tau1_equals_tau2: bool,
    pub beta: [f64; 2],
    pub tau2: f64,
    pub length: f64,
}

impl Default for IdentitySettings {
    fn default() -> Self {
        Self { k: 1, n: 4, seed: 42, samples: 100, tau1_equals_tau2: false, beta: [1.0, 1.0], tau2: 1.0, length: 0.125 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub settings: IdentitySettings,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn worst(&self, name: &str) -> Option<f64> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.worst)
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = &self.settings;
        writeln!(f, "k = {}, n = {}, seed = {}, samples = {}", s.k, s.n, s.seed, s.samples)?;
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {:<22} worst relative deviation {:.3e} (tolerance {:.0e})", c.name, c.worst, c.tolerance)?;
        }
        Ok(())
    }
}

pub const ENERGY_B1: &str = "energy identity B1";
pub const ENERGY_B2: &str = "energy identity B2";
pub const ADJOINT: &str = "adjoint identity";
pub const ASSEMBLY: &str = "assembly consistency";

fn rel(diff: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        diff.abs()
    } else {
        diff.abs() / scale
    }
}

pub fn verify_identities(s: &IdentitySettings) -> Result<IdentityReport> {
    let mesh = Mesh::build_structured(s.length, s.n)?;
    let data = ProblemData {
        beta: Convection::Constant(s.beta),
        tau2: Tau2::Constant(s.tau2),
        tau1_rule: if s.tau1_equals_tau2 { Tau1Rule::EqualTau2 } else { Tau1Rule::Coupled },
        desired_state: Arc::new(|x| x[0] - x[1]),
        ..ProblemData::zero(s.length, s.k)
    };
    let ctx = OperatorContext::new(&mesh, &data, HMode::Local)?;
    let opts = SolverOptions { threads: 1, validate: false, ..Default::default() };
    let sys = assemble_monolithic(&mesh, &data, &opts)?;
    let dofs = ctx.dofs();
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);

    let (mut e1, mut e2, mut adj, mut asm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..s.samples {
        let t = DiscreteTuple::random(dofs, &mut rng);
        let rhs = ctx.energy_b1(&t)?;
        e1 = e1.max(rel(ctx.b1(&t, &t)? - rhs, rhs.abs()));
        let rhs = ctx.energy_b2(&t)?;
        e2 = e2.max(rel(ctx.b2(&t, &t)? - rhs, rhs.abs()));

        let a = DiscreteTuple::random(dofs, &mut rng);
        let x = ctx.b1(&t, &a.signed(1.0, -1.0, -1.0))?;
        let y = ctx.b2(&a, &t.signed(-1.0, 1.0, 1.0))?;
        adj = adj.max(rel(x + y, x.abs() + y.abs()));

        let xv: Vec<f64> = (0..dofs.monolithic_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let tv: Vec<f64> = (0..dofs.monolithic_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ax = sys.matrix.spmv(&xv)?;
        let from_matrix: f64 = ax.iter().zip(&tv).map(|(a, b)| a * b).sum();
        let scale: f64 = ax.iter().zip(&tv).map(|(a, b)| (a * b).abs()).sum();
        let trial = SolutionFields::from_monolithic(dofs, &mesh, &xv)?;
        let test = SolutionFields::from_monolithic(dofs, &mesh, &tv)?;
        asm = asm.max(rel(from_matrix - ctx.system_form(&trial, &test)?, scale));
    }
    let check = |name, worst, tolerance| IdentityCheck { name, worst, tolerance };
    Ok(IdentityReport {
        settings: s.clone(),
        checks: vec![
            check(ENERGY_B1, e1, IDENTITY_TOLERANCE),
            check(ENERGY_B2, e2, IDENTITY_TOLERANCE),
            check(ADJOINT, adj, IDENTITY_TOLERANCE),
            check(ASSEMBLY, asm, ASSEMBLY_TOLERANCE),
        ],
    })
}
