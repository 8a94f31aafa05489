//! Solvers for the optimality system and the forward problem.

use nalgebra::DVector;

use crate::error::Result;
use crate::fem_basis::{project_trace_with, EdgeBasis};
use crate::hdg::assembly::{assemble_condensed, assemble_monolithic, check_data, push_dense};
use crate::hdg::dofs::{DofMap, FaceSlot};
use crate::hdg::local::{Kernel, LocalSystem};
use crate::hdg::{par_map, ForwardSolution, SolutionFields, SolverOptions, Strategy};
use crate::linalg::{factor_and_solve, relative_residual, SparseMatrix};
use crate::mesh::{Mesh, Point};
use crate::problem::ProblemData;

/// Solves the discrete optimality system for state, adjoint and control.
pub fn solve_optimality(mesh: &Mesh, data: &ProblemData, opts: &SolverOptions) -> Result<SolutionFields> {
    match opts.strategy {
        Strategy::Monolithic => {
            let sys = assemble_monolithic(mesh, data, opts)?;
            let x = factor_and_solve(&sys.matrix, &sys.rhs)?;
            SolutionFields::from_monolithic(&sys.dofs, mesh, &x)
        }
        Strategy::Condensed => {
            let sys = assemble_condensed(mesh, data, opts)?;
            let lambda = factor_and_solve(&sys.matrix, &sys.rhs)?;
            sys.recover_interior(&lambda, mesh)
        }
    }
}

/// Relative residual of the full monolithic system at `sol`.
pub fn system_residual(sol: &SolutionFields, mesh: &Mesh, data: &ProblemData, opts: &SolverOptions) -> Result<f64> {
    let sys = assemble_monolithic(mesh, data, opts)?;
    relative_residual(&sys.matrix, &sol.to_monolithic(&sys.dofs, mesh), &sys.rhs)
}

/// Size of the optimality functional `mu -> <p.n + gamma u + (1/h + tau2) z, mu>`
/// on boundary faces, measured in the orthonormal face basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityResidual {
    pub absolute: f64,
    /// `absolute` divided by the sum of the norms of the three terms.
    pub relative: f64,
}

pub fn optimality_residual(
    sol: &SolutionFields,
    mesh: &Mesh,
    data: &ProblemData,
    opts: &SolverOptions,
) -> Result<OptimalityResidual> {
    let dofs = DofMap::new(mesh, data.degree)?;
    let kern = Kernel::new(mesh, data, opts.h_mode)?;
    let (nf, ny, nm) = (kern.nf(), kern.ny, kern.nm());
    let (mut r2, mut s_flux, mut s_u, mut s_z) = (0.0, 0.0, 0.0, 0.0);
    for &f in mesh.boundary_faces() {
        let e = mesh.face(f).elements()[0];
        let blk = kern.element_blocks(e);
        let fb = blk.faces.iter().find(|fb| fb.face == f).expect("face of its element");
        let FaceSlot::Boundary(b) = dofs.face_slot(f) else { unreachable!("boundary face") };
        let p = DVector::from_column_slice(&sol.p[e * nf..(e + 1) * nf]);
        let z = DVector::from_column_slice(&sol.z[e * ny..(e + 1) * ny]);
        let u = DVector::from_column_slice(&sol.u[b * nm..(b + 1) * nm]);
        let tp = fb.ad_row.columns(0, nf) * p;
        let tz = fb.ad_row.columns(nf, ny) * z;
        let tu = &fb.gamma_mass * u;
        r2 += (&tp + &tz + &tu).norm_squared();
        s_flux += tp.norm_squared();
        s_z += tz.norm_squared();
        s_u += tu.norm_squared();
    }
    let absolute = r2.sqrt();
    let scale = s_flux.sqrt() + s_u.sqrt() + s_z.sqrt();
    Ok(OptimalityResidual { absolute, relative: if scale == 0.0 { 0.0 } else { absolute / scale } })
}

/// Solves the state equations with Dirichlet data `g` (projected onto the
/// face spaces) in place of the control.
pub fn solve_forward(
    mesh: &Mesh,
    data: &ProblemData,
    g: &(dyn Fn(Point) -> f64 + Sync),
    opts: &SolverOptions,
) -> Result<ForwardSolution> {
    check_data(mesh, data, opts)?;
    let dofs = DofMap::new(mesh, data.degree)?;
    let kern = Kernel::new(mesh, data, opts.h_mode)?;
    let (ns, nm, nf, ny) = (kern.ns(), kern.nm(), kern.nf(), kern.ny);

    let edge = EdgeBasis::new(data.degree + 1);
    let mut u = vec![0.0; dofs.n_boundary_faces() * nm];
    for &f in mesh.boundary_faces() {
        let FaceSlot::Boundary(b) = dofs.face_slot(f) else { unreachable!("boundary face") };
        u[b * nm..(b + 1) * nm].copy_from_slice(&project_trace_with(g, &edge, mesh, f, &kern.edge_rule));
    }

    let locals = par_map(mesh.n_elements(), opts.threads, |e| {
        let blk = kern.element_blocks(e);
        let mut f = blk.state_load.clone();
        let mut skel = Vec::new();
        let mut faces = Vec::new();
        for fb in &blk.faces {
            match dofs.face_slot(fb.face) {
                FaceSlot::Interior(i) => {
                    skel.extend(i * nm..(i + 1) * nm);
                    faces.push(fb);
                }
                FaceSlot::Boundary(b) => {
                    f -= &fb.st_trace * DVector::from_column_slice(&u[b * nm..(b + 1) * nm]);
                }
            }
        }
        let nsk = skel.len();
        let mut bm = nalgebra::DMatrix::zeros(ns, nsk);
        let mut cm = nalgebra::DMatrix::zeros(nsk, ns);
        let mut dm = nalgebra::DMatrix::zeros(nsk, nsk);
        for (j, fb) in faces.iter().enumerate() {
            bm.view_mut((0, j * nm), (ns, nm)).copy_from(&fb.st_trace);
            cm.view_mut((j * nm, 0), (nm, ns)).copy_from(&fb.st_row);
            dm.view_mut((j * nm, j * nm), (nm, nm)).copy_from(&fb.st_diag);
        }
        LocalSystem { a: blk.state, blocks: vec![0..ns], b: bm, c: cm, d: dm, f, skel }.condense(e)
    })?;

    let n = dofs.n_interior_faces() * nm;
    let mut trip = Vec::new();
    let mut rhs = vec![0.0; n];
    let mut recovery = Vec::with_capacity(locals.len());
    for item in locals {
        let (schur, load, rec) = item?;
        push_dense(&mut trip, &schur, |i| rec.skel[i], |j| rec.skel[j]);
        for (i, v) in load.iter().enumerate() {
            rhs[rec.skel[i]] += v;
        }
        recovery.push(rec);
    }
    let y_hat = factor_and_solve(&SparseMatrix::from_triplets(n, n, trip)?, &rhs)?;
    let mut q = vec![0.0; mesh.n_elements() * nf];
    let mut y = vec![0.0; mesh.n_elements() * ny];
    for (e, rec) in recovery.iter().enumerate() {
        let x = rec.recover(&y_hat);
        for i in 0..nf {
            q[e * nf + i] = x[i];
        }
        for i in 0..ny {
            y[e * ny + i] = x[nf + i];
        }
    }
    Ok(ForwardSolution { q, y, y_hat, u })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem_basis::eval_volume;
    use crate::fem_basis::TriBasis;
    use crate::problem::{Convection, ProblemData};
    use std::sync::Arc;

    fn opts(strategy: Strategy) -> SolverOptions {
        SolverOptions { strategy, threads: 1, ..Default::default() }
    }

    #[test]
    fn zero_data_zero_solution() {
        let mesh = Mesh::build_structured(0.125, 2).unwrap();
        for k in 0..=2 {
            let data = ProblemData::zero(0.125, k);
            for s in [Strategy::Monolithic, Strategy::Condensed] {
                let sol = solve_optimality(&mesh, &data, &opts(s)).unwrap();
                assert!(sol.max_abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn strategies_agree_on_benchmark() {
        for n in [2, 4] {
            let mesh = Mesh::build_structured(0.125, n).unwrap();
            for k in 0..=1 {
                let data = ProblemData::paper_example(k);
                let a = solve_optimality(&mesh, &data, &opts(Strategy::Monolithic)).unwrap();
                let b = solve_optimality(&mesh, &data, &opts(Strategy::Condensed)).unwrap();
                assert!(b.relative_difference(&a) < 1e-8, "n={n} k={k}");
                assert!(system_residual(&b, &mesh, &data, &opts(Strategy::Monolithic)).unwrap() < 1e-9);
                let r = optimality_residual(&b, &mesh, &data, &SolverOptions::default()).unwrap();
                assert!(r.relative < 1e-9, "{r:?}");
            }
        }
    }

    #[test]
    fn optimality_residual_is_linear_in_control() {
        let mesh = Mesh::build_structured(1.0, 2).unwrap();
        let data = ProblemData::zero(1.0, 1);
        let dofs = DofMap::new(&mesh, 1).unwrap();
        let mut s = SolutionFields::zeros(&dofs);
        assert_eq!(optimality_residual(&s, &mesh, &data, &SolverOptions::default()).unwrap().absolute, 0.0);
        for (i, v) in s.u.iter_mut().enumerate() {
            *v = (i as f64 * 0.37).sin();
        }
        let norm = s.u.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = optimality_residual(&s, &mesh, &data, &SolverOptions::default()).unwrap();
        assert!((r.absolute - data.gamma * norm).abs() < 1e-12 * norm);
    }

    #[test]
    fn forward_reproduces_linear_state() {
        let beta = [1.0, 0.5];
        for k in 0..=2 {
            let data = ProblemData {
                beta: Convection::Constant(beta),
                source: Arc::new(move |_| beta[0] + beta[1]),
                ..ProblemData::zero(1.0, k)
            };
            let mesh = Mesh::build_structured(1.0, 3).unwrap();
            let sol = solve_forward(&mesh, &data, &|x| x[0] + x[1], &opts(Strategy::Condensed)).unwrap();
            let scal = TriBasis::new(k + 1).unwrap();
            let flux = TriBasis::new(k).unwrap();
            let (nf, ny) = (2 * flux.len(), scal.len());
            for e in 0..mesh.n_elements() {
                let map = mesh.element_map(e);
                let c = mesh.centroid(e);
                let x = [c[0] + 0.05, c[1] - 0.02];
                let yv = eval_volume(&scal, &map, &sol.y[e * ny..(e + 1) * ny], x);
                assert!((yv - (x[0] + x[1])).abs() < 1e-10, "k={k} e={e} {yv}");
                let nk = nf / 2;
                let q0 = eval_volume(&flux, &map, &sol.q[e * nf..e * nf + nk], x);
                let q1 = eval_volume(&flux, &map, &sol.q[e * nf + nk..(e + 1) * nf], x);
                assert!((q0 + 1.0).abs() < 1e-10 && (q1 + 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn forward_zero() {
        let mesh = Mesh::build_structured(1.0, 2).unwrap();
        let data = ProblemData::zero(1.0, 1);
        let sol = solve_forward(&mesh, &data, &|_| 0.0, &opts(Strategy::Condensed)).unwrap();
        assert!(sol.y.iter().chain(&sol.q).chain(&sol.y_hat).all(|v| v.abs() <= 1e-14));
    }
}
