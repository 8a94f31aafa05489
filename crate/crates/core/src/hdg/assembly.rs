//! Global assembly of the discrete optimality system.

use nalgebra::{DMatrix, DVector};

use crate::error::{HdgError, Result};
use crate::hdg::dofs::{DofMap, FaceSlot};
use crate::hdg::local::{ElementBlocks, Kernel, LocalRecovery, LocalSystem};
use crate::hdg::{par_map, SolverOptions};
use crate::linalg::SparseMatrix;
use crate::mesh::Mesh;
use crate::problem::{validate, ProblemData};

#[derive(Debug, Clone)]
pub struct MonolithicSystem {
    pub dofs: DofMap,
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
}

/// Skeleton system in `(y_hat, z_hat, u)` plus the element recovery operators.
#[derive(Debug, Clone)]
pub struct CondensedSystem {
    pub dofs: DofMap,
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    pub(crate) recovery: Vec<LocalRecovery>,
}

impl CondensedSystem {
    /// Recovers the element unknowns from a skeleton solution.
    pub fn recover_interior(&self, skeleton: &[f64], mesh: &Mesh) -> Result<crate::hdg::SolutionFields> {
        if skeleton.len() != self.dofs.skeleton_dim() {
            return Err(HdgError::DimensionMismatch { expected: self.dofs.skeleton_dim(), found: skeleton.len() });
        }
        let d = &self.dofs;
        let (nf, ny) = (d.n_flux(), d.n_scalar());
        let mut s = crate::hdg::SolutionFields::zeros(d);
        for (e, rec) in self.recovery.iter().enumerate() {
            let x = rec.recover(skeleton);
            s.q[e * nf..(e + 1) * nf].copy_from_slice(x.rows(0, nf).as_slice());
            s.y[e * ny..(e + 1) * ny].copy_from_slice(x.rows(nf, ny).as_slice());
            s.p[e * nf..(e + 1) * nf].copy_from_slice(x.rows(nf + ny, nf).as_slice());
            s.z[e * ny..(e + 1) * ny].copy_from_slice(x.rows(2 * nf + ny, ny).as_slice());
        }
        s.set_skeleton(d, mesh, skeleton);
        Ok(s)
    }
}

pub(crate) fn check_data(mesh: &Mesh, data: &ProblemData, opts: &SolverOptions) -> Result<()> {
    if data.degree > 2 {
        return Err(HdgError::UnsupportedDegree { degree: data.degree, supported: "0, 1, 2".into() });
    }
    if !opts.validate {
        return Ok(());
    }
    let report = validate(data, mesh);
    if report.is_valid() {
        Ok(())
    } else {
        let names: Vec<_> = report.failures().iter().map(|c| format!("{} (worst {:.3e})", c.name, c.worst)).collect();
        Err(HdgError::InvalidData(names.join("; ")))
    }
}

/// Element system of the full optimality system for element `e`.
pub(crate) fn optimality_local(kern: &Kernel, dofs: &DofMap, blk: ElementBlocks) -> LocalSystem {
    let (ns, nm) = (kern.ns(), kern.nm());
    let mut a = DMatrix::zeros(2 * ns, 2 * ns);
    a.view_mut((0, 0), (ns, ns)).copy_from(&blk.state);
    a.view_mut((ns, 0), (ns, ns)).copy_from(&blk.coupling);
    a.view_mut((ns, ns), (ns, ns)).copy_from(&blk.adjoint);

    let mut skel = Vec::new();
    for fb in &blk.faces {
        let o = dofs.skeleton_offset(fb.face);
        let width = match dofs.face_slot(fb.face) {
            FaceSlot::Interior(_) => 2 * nm,
            FaceSlot::Boundary(_) => nm,
        };
        skel.extend(o..o + width);
    }
    let nsk = skel.len();
    let mut b = DMatrix::zeros(2 * ns, nsk);
    let mut c = DMatrix::zeros(nsk, 2 * ns);
    let mut d = DMatrix::zeros(nsk, nsk);
    let mut col = 0;
    for fb in &blk.faces {
        match dofs.face_slot(fb.face) {
            FaceSlot::Interior(_) => {
                b.view_mut((0, col), (ns, nm)).copy_from(&fb.st_trace);
                b.view_mut((ns, col + nm), (ns, nm)).copy_from(&fb.ad_trace);
                c.view_mut((col, 0), (nm, ns)).copy_from(&fb.st_row);
                c.view_mut((col + nm, ns), (nm, ns)).copy_from(&fb.ad_row);
                d.view_mut((col, col), (nm, nm)).copy_from(&fb.st_diag);
                d.view_mut((col + nm, col + nm), (nm, nm)).copy_from(&fb.ad_diag);
                col += 2 * nm;
            }
            FaceSlot::Boundary(_) => {
                b.view_mut((0, col), (ns, nm)).copy_from(&fb.st_trace);
                c.view_mut((col, ns), (nm, ns)).copy_from(&fb.ad_row);
                d.view_mut((col, col), (nm, nm)).copy_from(&fb.gamma_mass);
                col += nm;
            }
        }
    }
    let mut f = DVector::zeros(2 * ns);
    f.rows_mut(0, ns).copy_from(&blk.state_load);
    f.rows_mut(ns, ns).copy_from(&blk.adjoint_load);
    LocalSystem { a, blocks: vec![0..ns, ns..2 * ns], b, c, d, f, skel }
}

pub(crate) fn push_dense(
    out: &mut Vec<(usize, usize, f64)>,
    m: &DMatrix<f64>,
    rows: impl Fn(usize) -> usize,
    cols: impl Fn(usize) -> usize,
) {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let v = m[(i, j)];
            if v != 0.0 {
                out.push((rows(i), cols(j), v));
            }
        }
    }
}

/// Assembles the full system in `(q, y, p, z, y_hat, z_hat, u)`.
pub fn assemble_monolithic(mesh: &Mesh, data: &ProblemData, opts: &SolverOptions) -> Result<MonolithicSystem> {
    check_data(mesh, data, opts)?;
    let dofs = DofMap::new(mesh, data.degree)?;
    let kern = Kernel::new(mesh, data, opts.h_mode)?;
    let locals = par_map(mesh.n_elements(), opts.threads, |e| optimality_local(&kern, &dofs, kern.element_blocks(e)))?;
    let n = dofs.monolithic_dim();
    let base = dofs.interior_dim();
    let mut trip = Vec::new();
    let mut rhs = vec![0.0; n];
    for (e, ls) in locals.iter().enumerate() {
        let off = dofs.q_offset(e);
        push_dense(&mut trip, &ls.a, |i| off + i, |j| off + j);
        push_dense(&mut trip, &ls.b, |i| off + i, |j| base + ls.skel[j]);
        push_dense(&mut trip, &ls.c, |i| base + ls.skel[i], |j| off + j);
        push_dense(&mut trip, &ls.d, |i| base + ls.skel[i], |j| base + ls.skel[j]);
        for (i, v) in ls.f.iter().enumerate() {
            rhs[off + i] += v;
        }
    }
    Ok(MonolithicSystem { matrix: SparseMatrix::from_triplets(n, n, trip)?, rhs, dofs })
}

/// Eliminates the element unknowns and assembles the skeleton system.
pub fn assemble_condensed(mesh: &Mesh, data: &ProblemData, opts: &SolverOptions) -> Result<CondensedSystem> {
    check_data(mesh, data, opts)?;
    let dofs = DofMap::new(mesh, data.degree)?;
    let kern = Kernel::new(mesh, data, opts.h_mode)?;
    let condensed = par_map(mesh.n_elements(), opts.threads, |e| {
        optimality_local(&kern, &dofs, kern.element_blocks(e)).condense(e)
    })?;
    let n = dofs.skeleton_dim();
    let mut trip = Vec::new();
    let mut rhs = vec![0.0; n];
    let mut recovery = Vec::with_capacity(condensed.len());
    for item in condensed {
        let (schur, load, rec) = item?;
        push_dense(&mut trip, &schur, |i| rec.skel[i], |j| rec.skel[j]);
        for (i, v) in load.iter().enumerate() {
            rhs[rec.skel[i]] += v;
        }
        recovery.push(rec);
    }
    Ok(CondensedSystem { matrix: SparseMatrix::from_triplets(n, n, trip)?, rhs, recovery, dofs })
}
