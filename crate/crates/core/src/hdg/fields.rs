use crate::error::{HdgError, Result};
use crate::hdg::dofs::{DofMap, FaceSlot};
use crate::mesh::Mesh;

/// Coefficient vectors of the discrete optimality system.
///
/// Element fields are stored element by element; `y_hat`/`z_hat` by interior
/// face index and `u` by boundary face index (see [`FaceSlot`]).
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionFields {
    pub q: Vec<f64>,
    pub y: Vec<f64>,
    pub p: Vec<f64>,
    pub z: Vec<f64>,
    pub y_hat: Vec<f64>,
    pub z_hat: Vec<f64>,
    pub u: Vec<f64>,
}

impl SolutionFields {
    pub fn zeros(dofs: &DofMap) -> Self {
        let ne = dofs.n_elements();
        Self {
            q: vec![0.0; ne * dofs.n_flux()],
            y: vec![0.0; ne * dofs.n_scalar()],
            p: vec![0.0; ne * dofs.n_flux()],
            z: vec![0.0; ne * dofs.n_scalar()],
            y_hat: vec![0.0; dofs.n_interior_faces() * dofs.n_trace()],
            z_hat: vec![0.0; dofs.n_interior_faces() * dofs.n_trace()],
            u: vec![0.0; dofs.n_boundary_faces() * dofs.n_trace()],
        }
    }

    pub fn from_monolithic(dofs: &DofMap, mesh: &Mesh, x: &[f64]) -> Result<Self> {
        if x.len() != dofs.monolithic_dim() {
            return Err(HdgError::DimensionMismatch { expected: dofs.monolithic_dim(), found: x.len() });
        }
        let mut s = Self::zeros(dofs);
        let (nf, ny) = (dofs.n_flux(), dofs.n_scalar());
        for e in 0..dofs.n_elements() {
            s.q[e * nf..(e + 1) * nf].copy_from_slice(&x[dofs.q_offset(e)..dofs.q_offset(e) + nf]);
            s.y[e * ny..(e + 1) * ny].copy_from_slice(&x[dofs.y_offset(e)..dofs.y_offset(e) + ny]);
            s.p[e * nf..(e + 1) * nf].copy_from_slice(&x[dofs.p_offset(e)..dofs.p_offset(e) + nf]);
            s.z[e * ny..(e + 1) * ny].copy_from_slice(&x[dofs.z_offset(e)..dofs.z_offset(e) + ny]);
        }
        s.set_skeleton(dofs, mesh, &x[dofs.interior_dim()..]);
        Ok(s)
    }

    pub fn to_monolithic(&self, dofs: &DofMap, mesh: &Mesh) -> Vec<f64> {
        let mut x = vec![0.0; dofs.monolithic_dim()];
        let (nf, ny) = (dofs.n_flux(), dofs.n_scalar());
        for e in 0..dofs.n_elements() {
            x[dofs.q_offset(e)..dofs.q_offset(e) + nf].copy_from_slice(&self.q[e * nf..(e + 1) * nf]);
            x[dofs.y_offset(e)..dofs.y_offset(e) + ny].copy_from_slice(&self.y[e * ny..(e + 1) * ny]);
            x[dofs.p_offset(e)..dofs.p_offset(e) + nf].copy_from_slice(&self.p[e * nf..(e + 1) * nf]);
            x[dofs.z_offset(e)..dofs.z_offset(e) + ny].copy_from_slice(&self.z[e * ny..(e + 1) * ny]);
        }
        let base = dofs.interior_dim();
        x[base..].copy_from_slice(&self.skeleton(dofs, mesh));
        x
    }

    /// Skeleton unknowns in skeleton order.
    pub fn skeleton(&self, dofs: &DofMap, mesh: &Mesh) -> Vec<f64> {
        let nm = dofs.n_trace();
        let mut out = vec![0.0; dofs.skeleton_dim()];
        for f in 0..mesh.n_faces() {
            let o = dofs.skeleton_offset(f);
            match dofs.face_slot(f) {
                FaceSlot::Interior(i) => {
                    out[o..o + nm].copy_from_slice(&self.y_hat[i * nm..(i + 1) * nm]);
                    out[o + nm..o + 2 * nm].copy_from_slice(&self.z_hat[i * nm..(i + 1) * nm]);
                }
                FaceSlot::Boundary(b) => out[o..o + nm].copy_from_slice(&self.u[b * nm..(b + 1) * nm]),
            }
        }
        out
    }

    pub fn set_skeleton(&mut self, dofs: &DofMap, mesh: &Mesh, s: &[f64]) {
        let nm = dofs.n_trace();
        for f in 0..mesh.n_faces() {
            let o = dofs.skeleton_offset(f);
            match dofs.face_slot(f) {
                FaceSlot::Interior(i) => {
                    self.y_hat[i * nm..(i + 1) * nm].copy_from_slice(&s[o..o + nm]);
                    self.z_hat[i * nm..(i + 1) * nm].copy_from_slice(&s[o + nm..o + 2 * nm]);
                }
                FaceSlot::Boundary(b) => self.u[b * nm..(b + 1) * nm].copy_from_slice(&s[o..o + nm]),
            }
        }
    }

    fn parts(&self) -> [&Vec<f64>; 7] {
        [&self.q, &self.y, &self.p, &self.z, &self.y_hat, &self.z_hat, &self.u]
    }

    /// Largest absolute coefficient over all fields.
    pub fn max_abs(&self) -> f64 {
        self.parts().iter().flat_map(|v| v.iter()).map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `max |self - other| / max(max |other|, tiny)` over all fields.
    pub fn relative_difference(&self, other: &Self) -> f64 {
        let diff = self
            .parts()
            .iter()
            .zip(other.parts())
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        let scale = other.max_abs().max(self.max_abs());
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

/// Output of the forward convection-diffusion solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardSolution {
    pub q: Vec<f64>,
    pub y: Vec<f64>,
    pub y_hat: Vec<f64>,
    /// Projected boundary data on boundary faces.
    pub u: Vec<f64>,
}
