//! L2 error norms on nested meshes and the cost functional.

use crate::error::{HdgError, Result};
use crate::fem_basis::{
    dim_p2, eval_trace, face_parameter, physical_values, quadrature_edge, quadrature_triangle, EdgeBasis,
    ElementQuadrature, TriBasis,
};
use crate::hdg::{assembly_quadrature_degree, SolutionFields};
use crate::mesh::{Mesh, MeshHierarchy, Point};
use crate::problem::ProblemData;

/// Grading depth used for `y_d^2` in the cost functional.
pub const COST_SINGULAR_DEPTH: usize = 24;

/// Quadrature exactness for error norms: the assembly rule plus two.
pub fn error_quadrature_degree(k: usize) -> usize {
    assembly_quadrature_degree(k) + 2
}

/// Element-wise polynomial field with `components` components of degree
/// `degree`; coefficients per element are stored component after component.
#[derive(Debug, Clone, Copy)]
pub struct VolumeField<'a> {
    pub mesh: &'a Mesh,
    pub degree: usize,
    pub components: usize,
    pub coeffs: &'a [f64],
}

impl<'a> VolumeField<'a> {
    pub fn scalar(mesh: &'a Mesh, degree: usize, coeffs: &'a [f64]) -> Self {
        Self { mesh, degree, components: 1, coeffs }
    }

    pub fn vector(mesh: &'a Mesh, degree: usize, coeffs: &'a [f64]) -> Self {
        Self { mesh, degree, components: 2, coeffs }
    }

    fn check(&self) -> Result<()> {
        let want = self.mesh.n_elements() * self.components * dim_p2(self.degree);
        if self.coeffs.len() != want {
            return Err(HdgError::DimensionMismatch { expected: want, found: self.coeffs.len() });
        }
        Ok(())
    }

    /// Values of all components on element `e` at physical point `x`.
    fn eval(&self, basis: &TriBasis, e: usize, x: Point, out: &mut [f64]) {
        let map = self.mesh.element_map(e);
        let v = physical_values(basis, &map, map.to_reference(x));
        let nb = v.len();
        let base = e * self.components * nb;
        for (c, o) in out.iter_mut().enumerate() {
            *o = self.coeffs[base + c * nb..base + (c + 1) * nb].iter().zip(&v).map(|(a, b)| a * b).sum();
        }
    }
}

/// Face-wise polynomial field on the boundary, indexed like
/// [`Mesh::boundary_faces`].
#[derive(Debug, Clone, Copy)]
pub struct BoundaryField<'a> {
    pub mesh: &'a Mesh,
    pub degree: usize,
    pub coeffs: &'a [f64],
}

impl BoundaryField<'_> {
    fn check(&self) -> Result<()> {
        let want = self.mesh.boundary_faces().len() * (self.degree + 1);
        if self.coeffs.len() != want {
            return Err(HdgError::DimensionMismatch { expected: want, found: self.coeffs.len() });
        }
        Ok(())
    }

    fn eval(&self, basis: &EdgeBasis, b: usize, x: Point) -> f64 {
        let f = self.mesh.boundary_faces()[b];
        let nm = self.degree + 1;
        eval_trace(basis, self.mesh.face_length(f), &self.coeffs[b * nm..(b + 1) * nm], face_parameter(self.mesh, f, x))
    }
}

fn boundary_index(mesh: &Mesh) -> Vec<usize> {
    let mut idx = vec![usize::MAX; mesh.n_faces()];
    for (b, &f) in mesh.boundary_faces().iter().enumerate() {
        idx[f] = b;
    }
    idx
}

fn levels_of(h: &MeshHierarchy, coarse: &Mesh, fine: &Mesh) -> Result<(usize, usize)> {
    let find = |m: &Mesh| {
        h.level_of(m.subdivisions()).filter(|&j| h.level(j).length() == m.length()).ok_or_else(|| {
            HdgError::NonNested(format!("mesh with n={} is not in the hierarchy", m.subdivisions()))
        })
    };
    let (c, f) = (find(coarse)?, find(fine)?);
    if c > f {
        return Err(HdgError::NonNested(format!(
            "n={} is finer than the reference n={}",
            coarse.subdivisions(),
            fine.subdivisions()
        )));
    }
    Ok((c, f))
}

/// `|coarse - reference|` in L2, integrated on the reference mesh with the
/// coarse field evaluated through the parent maps.
pub fn l2_error_volume(coarse: &VolumeField, reference: &VolumeField, hierarchy: &MeshHierarchy) -> Result<f64> {
    coarse.check()?;
    reference.check()?;
    if coarse.components != reference.components {
        return Err(HdgError::InvalidArgument("fields have different numbers of components".into()));
    }
    let (lc, lf) = levels_of(hierarchy, coarse.mesh, reference.mesh)?;
    let deg = coarse.degree.max(reference.degree);
    let rule = quadrature_triangle(error_quadrature_degree(deg.saturating_sub(1)))?;
    let (bc, bf) = (TriBasis::new(coarse.degree)?, TriBasis::new(reference.degree)?);
    let nc = coarse.components;
    let (mut a, mut b) = (vec![0.0; nc], vec![0.0; nc]);
    let fine = reference.mesh;
    let mut total = 0.0;
    for e in 0..fine.n_elements() {
        let ce = hierarchy.ancestor_element(lf, e, lc);
        let map = fine.element_map(e);
        for (xi, w) in rule.iter() {
            let x = map.to_physical(*xi);
            coarse.eval(&bc, ce, x, &mut a);
            reference.eval(&bf, e, x, &mut b);
            total += w * map.det.abs() * a.iter().zip(&b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
        }
    }
    Ok(total.sqrt())
}

/// `|field - exact|` in L2; `exact` writes all components at a point.
pub fn l2_error_volume_exact(field: &VolumeField, exact: &dyn Fn(Point, &mut [f64])) -> Result<f64> {
    field.check()?;
    let rule = quadrature_triangle(error_quadrature_degree(field.degree.saturating_sub(1)))?;
    let basis = TriBasis::new(field.degree)?;
    let nc = field.components;
    let (mut a, mut b) = (vec![0.0; nc], vec![0.0; nc]);
    let mut total = 0.0;
    for e in 0..field.mesh.n_elements() {
        let map = field.mesh.element_map(e);
        for (xi, w) in rule.iter() {
            let x = map.to_physical(*xi);
            field.eval(&basis, e, x, &mut a);
            exact(x, &mut b);
            total += w * map.det.abs() * a.iter().zip(&b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>();
        }
    }
    Ok(total.sqrt())
}

/// `|coarse - reference|` in `L2(Gamma)` through the boundary-face parent maps.
pub fn l2_error_boundary(coarse: &BoundaryField, reference: &BoundaryField, hierarchy: &MeshHierarchy) -> Result<f64> {
    coarse.check()?;
    reference.check()?;
    let (lc, lf) = levels_of(hierarchy, coarse.mesh, reference.mesh)?;
    let rule = quadrature_edge(error_quadrature_degree(coarse.degree.max(reference.degree)))?;
    let (ec, ef) = (EdgeBasis::new(coarse.degree), EdgeBasis::new(reference.degree));
    let cidx = boundary_index(coarse.mesh);
    let fine = reference.mesh;
    let mut total = 0.0;
    for (b, &f) in fine.boundary_faces().iter().enumerate() {
        let cf = hierarchy
            .ancestor_boundary_face(lf, f, lc)
            .ok_or_else(|| HdgError::NonNested(format!("boundary face {f} has no coarse parent")))?;
        let (p0, p1) = fine.face_endpoints(f);
        let len = fine.face_length(f);
        for (t, w) in rule.iter() {
            let x = [p0[0] + t[0] * (p1[0] - p0[0]), p0[1] + t[0] * (p1[1] - p0[1])];
            let d = coarse.eval(&ec, cidx[cf], x) - reference.eval(&ef, b, x);
            total += w * len * d * d;
        }
    }
    Ok(total.sqrt())
}

pub fn l2_error_boundary_exact(field: &BoundaryField, exact: &dyn Fn(Point) -> f64) -> Result<f64> {
    field.check()?;
    let rule = quadrature_edge(error_quadrature_degree(field.degree))?;
    let basis = EdgeBasis::new(field.degree);
    let mesh = field.mesh;
    let mut total = 0.0;
    for (b, &f) in mesh.boundary_faces().iter().enumerate() {
        let (p0, p1) = mesh.face_endpoints(f);
        let len = mesh.face_length(f);
        for (t, w) in rule.iter() {
            let x = [p0[0] + t[0] * (p1[0] - p0[0]), p0[1] + t[0] * (p1[1] - p0[1])];
            let d = field.eval(&basis, b, x) - exact(x);
            total += w * len * d * d;
        }
    }
    Ok(total.sqrt())
}

/// `J = 1/2 |y_h - y_d|^2 + gamma/2 |u_h|^2_Gamma`.
pub fn cost_functional(sol: &SolutionFields, mesh: &Mesh, data: &ProblemData) -> Result<f64> {
    let k = data.degree;
    let y = VolumeField::scalar(mesh, k + 1, &sol.y);
    y.check()?;
    let u = BoundaryField { mesh, degree: k + 1, coeffs: &sol.u };
    u.check()?;
    let rule = quadrature_triangle(error_quadrature_degree(k))?;
    let basis = TriBasis::new(k + 1)?;
    let verts = mesh.vertices();
    let mut state = 0.0;
    let mut val = [0.0];
    for e in 0..mesh.n_elements() {
        let map = mesh.element_map(e);
        let corner = data.singular_point.and_then(|sp| {
            mesh.triangles()[e].iter().position(|&v| {
                let p = verts[v];
                (p[0] - sp[0]).hypot(p[1] - sp[1]) <= 1e-12 * data.length.max(1.0)
            })
        });
        let quad = match corner {
            Some(c) => ElementQuadrature::graded(&rule, c, COST_SINGULAR_DEPTH.max(data.singular_depth)),
            None => ElementQuadrature::from_rule(&rule),
        };
        for (xi, w) in quad.points.iter().zip(&quad.weights) {
            let x = map.to_physical(*xi);
            y.eval(&basis, e, x, &mut val);
            let d = val[0] - (data.desired_state)(x);
            state += w * map.det.abs() * d * d;
        }
    }
    // orthonormal face basis: |u_h|^2 is the coefficient sum of squares
    let control: f64 = sol.u.iter().map(|c| c * c).sum();
    Ok(0.5 * state + 0.5 * data.gamma * control)
}
