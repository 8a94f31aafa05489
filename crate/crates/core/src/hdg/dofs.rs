use crate::error::{HdgError, Result};
use crate::fem_basis::dim_p2;
use crate::mesh::Mesh;

pub const SUPPORTED_DEGREES: [usize; 3] = [0, 1, 2];

/// Role of a mesh face in the unknown layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceSlot {
    /// Index among interior faces; carries the state and adjoint traces.
    Interior(usize),
    /// Index among boundary faces; carries the control.
    Boundary(usize),
}

/// Layout of the unknowns for flux degree `k`.
///
/// Interior block: per element `[q, y, p, z]` (state block first, then
/// adjoint). Skeleton block: per face in mesh order, `[y_hat, z_hat]` on
/// interior faces and `[u]` on boundary faces. In the monolithic vector the
/// skeleton block follows the interior block.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    degree: usize,
    n_elements: usize,
    n_flux: usize,
    n_scalar: usize,
    n_trace: usize,
    face_slots: Vec<FaceSlot>,
    skeleton_offsets: Vec<usize>,
    n_interior_faces: usize,
    n_boundary_faces: usize,
    skeleton_dim: usize,
}

impl DofMap {
    pub fn new(mesh: &Mesh, degree: usize) -> Result<Self> {
        if !SUPPORTED_DEGREES.contains(&degree) {
            return Err(HdgError::UnsupportedDegree { degree, supported: "0, 1, 2".into() });
        }
        let n_trace = degree + 2;
        let mut face_slots = Vec::with_capacity(mesh.n_faces());
        let mut skeleton_offsets = Vec::with_capacity(mesh.n_faces());
        let (mut ni, mut nb, mut off) = (0, 0, 0);
        for face in mesh.faces() {
            skeleton_offsets.push(off);
            if face.is_boundary() {
                face_slots.push(FaceSlot::Boundary(nb));
                nb += 1;
                off += n_trace;
            } else {
                face_slots.push(FaceSlot::Interior(ni));
                ni += 1;
                off += 2 * n_trace;
            }
        }
        Ok(Self {
            degree,
            n_elements: mesh.n_elements(),
            n_flux: 2 * dim_p2(degree),
            n_scalar: dim_p2(degree + 1),
            n_trace,
            face_slots,
            skeleton_offsets,
            n_interior_faces: ni,
            n_boundary_faces: nb,
            skeleton_dim: off,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    /// Flux coefficients per element (both components).
    pub fn n_flux(&self) -> usize {
        self.n_flux
    }

    pub fn n_scalar(&self) -> usize {
        self.n_scalar
    }

    pub fn n_trace(&self) -> usize {
        self.n_trace
    }

    pub fn n_interior_faces(&self) -> usize {
        self.n_interior_faces
    }

    pub fn n_boundary_faces(&self) -> usize {
        self.n_boundary_faces
    }

    pub fn face_slot(&self, f: usize) -> FaceSlot {
        self.face_slots[f]
    }

    /// Unknowns of one element, `2 (n_flux + n_scalar)`.
    pub fn element_block(&self) -> usize {
        2 * (self.n_flux + self.n_scalar)
    }

    pub fn interior_dim(&self) -> usize {
        self.n_elements * self.element_block()
    }

    pub fn skeleton_dim(&self) -> usize {
        self.skeleton_dim
    }

    pub fn monolithic_dim(&self) -> usize {
        self.interior_dim() + self.skeleton_dim
    }

    pub fn q_offset(&self, e: usize) -> usize {
        e * self.element_block()
    }

    pub fn y_offset(&self, e: usize) -> usize {
        self.q_offset(e) + self.n_flux
    }

    pub fn p_offset(&self, e: usize) -> usize {
        self.y_offset(e) + self.n_scalar
    }

    pub fn z_offset(&self, e: usize) -> usize {
        self.p_offset(e) + self.n_flux
    }

    /// Skeleton offset of the first unknown on face `f`.
    pub fn skeleton_offset(&self, f: usize) -> usize {
        self.skeleton_offsets[f]
    }

    /// Skeleton offsets of `(y_hat, z_hat)` on interior face `f`.
    pub fn trace_offsets(&self, f: usize) -> Option<(usize, usize)> {
        match self.face_slots[f] {
            FaceSlot::Interior(_) => {
                let o = self.skeleton_offsets[f];
                Some((o, o + self.n_trace))
            }
            FaceSlot::Boundary(_) => None,
        }
    }

    /// Skeleton offset of the control on boundary face `f`.
    pub fn control_offset(&self, f: usize) -> Option<usize> {
        match self.face_slots[f] {
            FaceSlot::Boundary(_) => Some(self.skeleton_offsets[f]),
            FaceSlot::Interior(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_from_space_dimensions() {
        let m = Mesh::build_structured(0.125, 2).unwrap();
        let d = DofMap::new(&m, 1).unwrap();
        assert_eq!(d.interior_dim(), 192);
        assert_eq!(d.skeleton_dim(), 72);
        assert_eq!(d.monolithic_dim(), 264);

        let m = Mesh::build_structured(0.125, 1).unwrap();
        let d = DofMap::new(&m, 0).unwrap();
        assert_eq!(d.interior_dim(), 20);
        assert_eq!(d.skeleton_dim(), 12);
        assert_eq!(d.monolithic_dim(), 32);
    }

    #[test]
    fn formula_and_doubling() {
        for k in 0..=2 {
            for n in [1, 2, 4, 8] {
                let m = Mesh::build_structured(1.0, n).unwrap();
                let d = DofMap::new(&m, k).unwrap();
                let ne = m.n_elements();
                let expect = ne * (2 * (k + 1) * (k + 2) + (k + 2) * (k + 3))
                    + m.interior_faces().len() * 2 * (k + 2)
                    + m.boundary_faces().len() * (k + 2);
                assert_eq!(d.monolithic_dim(), expect);
                let m2 = Mesh::build_structured(1.0, 2 * n).unwrap();
                assert_eq!(DofMap::new(&m2, k).unwrap().interior_dim(), 4 * d.interior_dim());
            }
        }
    }

    #[test]
    fn unsupported_degree() {
        let m = Mesh::build_structured(1.0, 1).unwrap();
        assert!(matches!(DofMap::new(&m, 3), Err(HdgError::UnsupportedDegree { .. })));
    }

    #[test]
    fn every_unknown_has_one_owner() {
        let m = Mesh::build_structured(1.0, 3).unwrap();
        let d = DofMap::new(&m, 1).unwrap();
        let mut owner = vec![0u32; d.monolithic_dim()];
        let mut mark = |start: usize, len: usize| {
            for o in &mut owner[start..start + len] {
                *o += 1;
            }
        };
        for e in 0..m.n_elements() {
            mark(d.q_offset(e), d.n_flux());
            mark(d.y_offset(e), d.n_scalar());
            mark(d.p_offset(e), d.n_flux());
            mark(d.z_offset(e), d.n_scalar());
        }
        let base = d.interior_dim();
        for f in 0..m.n_faces() {
            if let Some((a, b)) = d.trace_offsets(f) {
                mark(base + a, d.n_trace());
                mark(base + b, d.n_trace());
            }
            if let Some(u) = d.control_offset(f) {
                mark(base + u, d.n_trace());
            }
        }
        assert!(owner.iter().all(|&c| c == 1));
    }
}
