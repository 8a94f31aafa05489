//! Element matrices and local static condensation.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use crate::error::{HdgError, Result};
use crate::fem_basis::{
    dim_p2, physical_gradients, physical_values, quadrature_edge, quadrature_triangle, EdgeBasis,
    EdgeRule, ElementQuadrature, TriBasis, TriangleRule,
};
use crate::hdg::HMode;
use crate::mesh::{Mesh, Point};
use crate::problem::ProblemData;

/// Quadrature exactness used for element and face matrices.
pub fn assembly_quadrature_degree(k: usize) -> usize {
    2 * (k + 2) + 2
}

/// Face contributions of one element face. Row/column blocks are
/// `[flux, scalar]` for the element part and the face basis for the trace.
#[derive(Debug, Clone)]
pub(crate) struct FaceBlock {
    pub face: usize,
    /// Coefficient of the state trace (or control) in the state rows.
    pub st_trace: DMatrix<f64>,
    /// State transmission rows on the state unknowns.
    pub st_row: DMatrix<f64>,
    pub st_diag: DMatrix<f64>,
    pub ad_trace: DMatrix<f64>,
    /// Adjoint transmission rows; on boundary faces these are the optimality rows.
    pub ad_row: DMatrix<f64>,
    pub ad_diag: DMatrix<f64>,
    pub gamma_mass: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct ElementBlocks {
    pub state: DMatrix<f64>,
    pub adjoint: DMatrix<f64>,
    /// `-(y, w2)` on the scalar parts.
    pub coupling: DMatrix<f64>,
    pub state_load: DVector<f64>,
    pub adjoint_load: DVector<f64>,
    pub faces: Vec<FaceBlock>,
}

/// Shared tables for computing element blocks at one degree.
pub(crate) struct Kernel<'a> {
    pub mesh: &'a Mesh,
    pub data: &'a ProblemData,
    pub basis: TriBasis,
    pub edge: EdgeBasis,
    pub vol_rule: TriangleRule,
    pub edge_rule: EdgeRule,
    pub h_mode: HMode,
    pub nk: usize,
    pub ny: usize,
}

impl<'a> Kernel<'a> {
    pub fn new(mesh: &'a Mesh, data: &'a ProblemData, h_mode: HMode) -> Result<Self> {
        let k = data.degree;
        let qd = assembly_quadrature_degree(k);
        Ok(Self {
            mesh,
            data,
            basis: TriBasis::new(k + 1)?,
            edge: EdgeBasis::new(k + 1),
            vol_rule: quadrature_triangle(qd)?,
            edge_rule: quadrature_edge(qd)?,
            h_mode,
            nk: dim_p2(k),
            ny: dim_p2(k + 1),
        })
    }

    pub fn nf(&self) -> usize {
        2 * self.nk
    }

    /// Size of the state (or adjoint) block of one element.
    pub fn ns(&self) -> usize {
        2 * self.nk + self.ny
    }

    pub fn nm(&self) -> usize {
        self.edge.len()
    }

    pub fn h_inv(&self, f: usize) -> f64 {
        match self.h_mode {
            HMode::Local => 1.0 / self.mesh.face_length(f),
            HMode::Global => 1.0 / self.mesh.h(),
        }
    }

    /// Volume rule for element `e`, graded towards a singular vertex.
    pub fn volume_quadrature(&self, e: usize) -> ElementQuadrature {
        if let Some(sp) = self.data.singular_point {
            let tri = self.mesh.triangles()[e];
            let verts = self.mesh.vertices();
            let tol = 1e-12 * self.data.length.max(1.0);
            if let Some(c) = tri.iter().position(|&v| dist(verts[v], sp) <= tol) {
                return ElementQuadrature::graded(&self.vol_rule, c, self.data.singular_depth);
            }
        }
        ElementQuadrature::from_rule(&self.vol_rule)
    }

    /// Face quadrature of face `f`: physical points, weights (scaled by the
    /// length) and face basis values.
    pub fn face_points(&self, f: usize) -> Vec<(Point, f64, Vec<f64>)> {
        let (a, b) = self.mesh.face_endpoints(f);
        let len = self.mesh.face_length(f);
        let s = len.sqrt().recip();
        self.edge_rule
            .iter()
            .map(|(t, w)| {
                let x = [a[0] + t[0] * (b[0] - a[0]), a[1] + t[0] * (b[1] - a[1])];
                (x, w * len, self.edge.values(t[0]).into_iter().map(|v| v * s).collect())
            })
            .collect()
    }

    pub fn element_blocks(&self, e: usize) -> ElementBlocks {
        let (nk, ny, nf, ns, nm) = (self.nk, self.ny, self.nf(), self.ns(), self.nm());
        let map = self.mesh.element_map(e);
        let data = self.data;
        let mut st = DMatrix::zeros(ns, ns);
        let mut ad = DMatrix::zeros(ns, ns);
        let mut cp = DMatrix::zeros(ns, ns);

        for (xi, w) in self.vol_rule.iter() {
            let w = w * map.det.abs();
            let x = map.to_physical(*xi);
            let v = physical_values(&self.basis, &map, *xi);
            let g = physical_gradients(&self.basis, &map, *xi);
            let beta = data.beta.at(x);
            let div = data.beta.divergence(x);
            for c in 0..2 {
                for i in 0..nk {
                    let a = c * nk + i;
                    for j in 0..nk {
                        let m = w * v[i] * v[j];
                        st[(a, c * nk + j)] += m;
                        ad[(a, c * nk + j)] += m;
                    }
                    for j in 0..ny {
                        let d = w * v[j] * g[i][c];
                        st[(a, nf + j)] -= d;
                        ad[(a, nf + j)] -= d;
                        // (div q_a, w_j)
                        st[(nf + j, a)] += d;
                        ad[(nf + j, a)] += d;
                    }
                }
            }
            for i in 0..ny {
                let bg = beta[0] * g[i][0] + beta[1] * g[i][1];
                for j in 0..ny {
                    let conv = w * v[j] * bg;
                    let mass = w * v[i] * v[j];
                    st[(nf + i, nf + j)] += -conv - div * mass;
                    ad[(nf + i, nf + j)] += conv;
                    cp[(nf + i, nf + j)] -= mass;
                }
            }
        }

        let quad = self.volume_quadrature(e);
        let mut fl = DVector::zeros(ns);
        let mut gl = DVector::zeros(ns);
        for (xi, w) in quad.points.iter().zip(&quad.weights) {
            let w = w * map.det.abs();
            let x = map.to_physical(*xi);
            let (fx, yd) = ((data.source)(x), (data.desired_state)(x));
            for (i, vi) in physical_values(&self.basis, &map, *xi).into_iter().enumerate() {
                fl[nf + i] += w * fx * vi;
                gl[nf + i] -= w * yd * vi;
            }
        }

        let mut faces = Vec::with_capacity(3);
        for (l, &f) in self.mesh.element_faces(e).iter().enumerate() {
            let (n, _) = self.mesh.local_face_geometry(e, l);
            let hi = self.h_inv(f);
            let tau2 = data.tau2.on_face(f);
            let mut fb = FaceBlock {
                face: f,
                st_trace: DMatrix::zeros(ns, nm),
                st_row: DMatrix::zeros(nm, ns),
                st_diag: DMatrix::zeros(nm, nm),
                ad_trace: DMatrix::zeros(ns, nm),
                ad_row: DMatrix::zeros(nm, ns),
                ad_diag: DMatrix::zeros(nm, nm),
                gamma_mass: DMatrix::zeros(nm, nm),
            };
            for (x, w, lv) in self.face_points(f) {
                let xi = map.to_reference(x);
                let v = physical_values(&self.basis, &map, xi);
                let beta = data.beta.at(x);
                let bn = beta[0] * n[0] + beta[1] * n[1];
                let tau1 = data.tau1(tau2, beta, n);
                let (s1, s2) = (hi + tau1, hi + tau2);
                for i in 0..ny {
                    for j in 0..ny {
                        st[(nf + i, nf + j)] += w * s1 * v[i] * v[j];
                        ad[(nf + i, nf + j)] += w * s2 * v[i] * v[j];
                    }
                }
                for m in 0..nm {
                    for c in 0..2 {
                        for i in 0..nk {
                            let t = w * lv[m] * v[i] * n[c];
                            fb.st_trace[(c * nk + i, m)] += t;
                            fb.st_row[(m, c * nk + i)] += t;
                            fb.ad_trace[(c * nk + i, m)] += t;
                            fb.ad_row[(m, c * nk + i)] += t;
                        }
                    }
                    for i in 0..ny {
                        let t = w * lv[m] * v[i];
                        fb.st_trace[(nf + i, m)] += (bn - s1) * t;
                        fb.st_row[(m, nf + i)] += s1 * t;
                        fb.ad_trace[(nf + i, m)] -= (s2 + bn) * t;
                        fb.ad_row[(m, nf + i)] += s2 * t;
                    }
                    for m2 in 0..nm {
                        let t = w * lv[m] * lv[m2];
                        fb.st_diag[(m, m2)] += (bn - s1) * t;
                        fb.ad_diag[(m, m2)] -= (bn + s2) * t;
                        fb.gamma_mass[(m, m2)] += data.gamma * t;
                    }
                }
            }
            faces.push(fb);
        }

        ElementBlocks { state: st, adjoint: ad, coupling: cp, state_load: fl, adjoint_load: gl, faces }
    }
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Element system `[A B; C D] [x; lambda] = [f; 0]` with `A` block lower
/// triangular over `blocks`.
#[derive(Debug, Clone)]
pub(crate) struct LocalSystem {
    pub a: DMatrix<f64>,
    pub blocks: Vec<Range<usize>>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub f: DVector<f64>,
    /// Global skeleton index of each local skeleton unknown.
    pub skel: Vec<usize>,
}

/// Local solution operators `A^{-1} B` and `A^{-1} f` kept for recovery.
#[derive(Debug, Clone)]
pub(crate) struct LocalRecovery {
    pub x_b: DMatrix<f64>,
    pub x_f: DVector<f64>,
    pub skel: Vec<usize>,
}

impl LocalRecovery {
    pub fn recover(&self, lambda: &[f64]) -> DVector<f64> {
        let l = DVector::from_iterator(self.skel.len(), self.skel.iter().map(|&i| lambda[i]));
        &self.x_f - &self.x_b * l
    }
}

impl LocalSystem {
    /// Solves `A X = R` by block forward substitution.
    pub fn solve_interior(&self, rhs: &DMatrix<f64>, element: usize) -> Result<DMatrix<f64>> {
        let mut x = DMatrix::zeros(rhs.nrows(), rhs.ncols());
        for (bi, r) in self.blocks.iter().enumerate() {
            let mut res = rhs.rows(r.start, r.len()).into_owned();
            for s in &self.blocks[..bi] {
                res -= self.a.view((r.start, s.start), (r.len(), s.len())) * x.rows(s.start, s.len());
            }
            let diag = self.a.view((r.start, r.start), (r.len(), r.len())).into_owned();
            let scale = diag.amax();
            let lu = diag.lu();
            let u = lu.u();
            let min_pivot = u.diagonal().iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
            if !(min_pivot > 1e-13 * scale) {
                return Err(HdgError::CondensationFailure { element });
            }
            let sol = lu.solve(&res).ok_or(HdgError::CondensationFailure { element })?;
            x.rows_mut(r.start, r.len()).copy_from(&sol);
        }
        Ok(x)
    }

    /// Schur complement `D - C A^{-1} B`, its load `-C A^{-1} f` and the
    /// recovery operators.
    pub fn condense(&self, element: usize) -> Result<(DMatrix<f64>, DVector<f64>, LocalRecovery)> {
        let nb = self.b.ncols();
        let mut rhs = DMatrix::zeros(self.a.nrows(), nb + 1);
        rhs.columns_mut(0, nb).copy_from(&self.b);
        rhs.column_mut(nb).copy_from(&self.f);
        let x = self.solve_interior(&rhs, element)?;
        let x_b = x.columns(0, nb).into_owned();
        let x_f: DVector<f64> = x.column(nb).into_owned();
        let schur = &self.d - &self.c * &x_b;
        let load = -(&self.c * &x_f);
        Ok((schur, load, LocalRecovery { x_b, x_f, skel: self.skel.clone() }))
    }
}
