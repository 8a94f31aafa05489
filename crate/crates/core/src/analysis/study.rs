//! Convergence studies against a fine reference solution or an exact solution.

use std::path::PathBuf;

use crate::analysis::norms::{
    cost_functional, l2_error_boundary, l2_error_volume, l2_error_volume_exact, BoundaryField, VolumeField,
};
use crate::analysis::table::{LevelErrors, RateTable};
use crate::error::{HdgError, Result};
use crate::hdg::{solve_forward, solve_optimality, HMode, SolutionFields, SolverOptions, Strategy};
use crate::mesh::{doubling_steps, Mesh, MeshHierarchy};
use crate::problem::{Convection, MmsCase, ProblemData, Tau2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// The singular benchmark on `[0, 1/8]^2`.
    Benchmark,
    /// Smooth manufactured forward problem with exact errors.
    Mms,
    Zero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub problem: ProblemKind,
    pub k: usize,
    pub study_levels: Vec<usize>,
    pub reference_n: usize,
    pub strategy: Strategy,
    pub h_mode: HMode,
    pub tau2: f64,
    pub beta: [f64; 2],
    pub gamma: f64,
    pub domain_length: f64,
    pub output_dir: PathBuf,
    pub threads: usize,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Benchmark,
            k: 1,
            study_levels: vec![2, 4, 8, 16],
            reference_n: 128,
            strategy: Strategy::Condensed,
            h_mode: HMode::Local,
            tau2: 1.0,
            beta: [1.0, 1.0],
            gamma: 1.0,
            domain_length: 0.125,
            output_dir: PathBuf::from("output"),
            threads: crate::hdg::thread_cap(),
        }
    }
}

/// The reference mesh must be at least this many times finer than the finest study level.
pub const MIN_REFERENCE_RATIO: usize = 4;

impl StudyConfig {
    pub fn problem_data(&self) -> ProblemData {
        let base = match self.problem {
            ProblemKind::Benchmark => ProblemData::paper_example(self.k),
            ProblemKind::Zero => ProblemData::zero(self.domain_length, self.k),
            ProblemKind::Mms => MmsCase::new(self.beta, self.domain_length).problem_data(self.k),
        };
        ProblemData {
            beta: Convection::Constant(self.beta),
            gamma: self.gamma,
            tau2: Tau2::Constant(self.tau2),
            length: self.domain_length,
            ..base
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions { strategy: self.strategy, h_mode: self.h_mode, threads: self.threads, validate: true }
    }
}

fn check_levels(levels: &[usize]) -> Result<()> {
    let Some(&first) = levels.first() else {
        return Err(HdgError::InvalidArgument("no study levels given".into()));
    };
    for w in levels.windows(2) {
        if w[1] <= w[0] {
            return Err(HdgError::InvalidArgument("study levels must be strictly increasing".into()));
        }
    }
    for &n in levels {
        if doubling_steps(first, n).is_none() {
            return Err(HdgError::NonNested(format!("level n={n} is not n={first} times a power of two")));
        }
    }
    Ok(())
}

/// Errors of the study levels against a solution on `reference_n`.
pub fn run_study(cfg: &StudyConfig) -> Result<RateTable> {
    if cfg.problem == ProblemKind::Mms {
        return run_mms(cfg.k, &cfg.study_levels, cfg.beta, cfg.domain_length, &cfg.solver_options());
    }
    check_levels(&cfg.study_levels)?;
    let finest = *cfg.study_levels.last().expect("checked non-empty");
    if cfg.reference_n < MIN_REFERENCE_RATIO * finest {
        return Err(HdgError::InvalidArgument(format!(
            "reference_n = {} must be at least {MIN_REFERENCE_RATIO} x the finest study level {finest}",
            cfg.reference_n
        )));
    }
    let hierarchy = MeshHierarchy::spanning(cfg.domain_length, cfg.study_levels[0], cfg.reference_n)?;
    let data = cfg.problem_data();
    let opts = cfg.solver_options();
    let k = cfg.k;

    let ref_level = hierarchy.n_levels() - 1;
    let ref_mesh = hierarchy.level(ref_level);
    let reference = solve_optimality(ref_mesh, &data, &opts)?;

    let mut rows = Vec::with_capacity(cfg.study_levels.len());
    for &n in &cfg.study_levels {
        let j = hierarchy.level_of(n).expect("levels lie in the hierarchy");
        let mesh = hierarchy.level(j);
        let sol = solve_optimality(mesh, &data, &opts)?;
        rows.push(level_errors(&hierarchy, mesh, &sol, ref_mesh, &reference, &data, k)?);
    }
    Ok(RateTable { rows })
}

fn level_errors(
    hierarchy: &MeshHierarchy,
    mesh: &Mesh,
    sol: &SolutionFields,
    ref_mesh: &Mesh,
    reference: &SolutionFields,
    data: &ProblemData,
    k: usize,
) -> Result<LevelErrors> {
    let vec_err = |a: &[f64], b: &[f64]| {
        l2_error_volume(&VolumeField::vector(mesh, k, a), &VolumeField::vector(ref_mesh, k, b), hierarchy)
    };
    let sca_err = |a: &[f64], b: &[f64]| {
        l2_error_volume(&VolumeField::scalar(mesh, k + 1, a), &VolumeField::scalar(ref_mesh, k + 1, b), hierarchy)
    };
    let eu = l2_error_boundary(
        &BoundaryField { mesh, degree: k + 1, coeffs: &sol.u },
        &BoundaryField { mesh: ref_mesh, degree: k + 1, coeffs: &reference.u },
        hierarchy,
    )?;
    Ok(LevelErrors {
        n: mesh.subdivisions(),
        h: mesh.h(),
        errors: [
            Some(vec_err(&sol.q, &reference.q)?),
            Some(vec_err(&sol.p, &reference.p)?),
            Some(sca_err(&sol.y, &reference.y)?),
            Some(sca_err(&sol.z, &reference.z)?),
            Some(eu),
        ],
        cost: Some(cost_functional(sol, mesh, data)?),
    })
}

/// Forward solves of the manufactured problem with exact `y` and `q` errors.
pub fn run_mms(k: usize, levels: &[usize], beta: [f64; 2], length: f64, opts: &SolverOptions) -> Result<RateTable> {
    if levels.is_empty() {
        return Err(HdgError::InvalidArgument("no study levels given".into()));
    }
    let case = MmsCase::new(beta, length);
    let data = case.problem_data(k);
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        let mesh = Mesh::build_structured(length, n)?;
        let sol = solve_forward(&mesh, &data, &*case.boundary, opts)?;
        let ey = l2_error_volume_exact(&VolumeField::scalar(&mesh, k + 1, &sol.y), &|x, o: &mut [f64]| {
            o[0] = (case.state)(x)
        })?;
        let eq = l2_error_volume_exact(&VolumeField::vector(&mesh, k, &sol.q), &|x, o: &mut [f64]| {
            o.copy_from_slice(&(case.flux)(x))
        })?;
        rows.push(LevelErrors { n, h: mesh.h(), errors: [Some(eq), None, Some(ey), None, None], cost: None });
    }
    Ok(RateTable { rows })
}
