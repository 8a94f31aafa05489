//! Direct quadrature evaluation of the HDG bilinear forms.
//!
//! These routines never touch the assembled matrices; they exist to check the
//! assembly and the structural identities of the method.

use rand::Rng;

use crate::error::{HdgError, Result};
use crate::fem_basis::{physical_gradients, physical_values};
use crate::hdg::dofs::{DofMap, FaceSlot};
use crate::hdg::local::Kernel;
use crate::hdg::{HMode, SolutionFields};
use crate::mesh::Mesh;
use crate::problem::ProblemData;

/// One `(flux, scalar, trace)` triple; the trace lives on interior faces.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteTuple {
    pub flux: Vec<f64>,
    pub scalar: Vec<f64>,
    pub trace: Vec<f64>,
}

impl DiscreteTuple {
    pub fn zeros(dofs: &DofMap) -> Self {
        Self {
            flux: vec![0.0; dofs.n_elements() * dofs.n_flux()],
            scalar: vec![0.0; dofs.n_elements() * dofs.n_scalar()],
            trace: vec![0.0; dofs.n_interior_faces() * dofs.n_trace()],
        }
    }

    /// Coefficients uniform in `[-1, 1)`.
    pub fn random<R: Rng>(dofs: &DofMap, rng: &mut R) -> Self {
        let mut t = Self::zeros(dofs);
        for v in t.flux.iter_mut().chain(t.scalar.iter_mut()).chain(t.trace.iter_mut()) {
            *v = rng.gen_range(-1.0..1.0);
        }
        t
    }

    pub fn state(s: &SolutionFields) -> Self {
        Self { flux: s.q.clone(), scalar: s.y.clone(), trace: s.y_hat.clone() }
    }

    pub fn adjoint(s: &SolutionFields) -> Self {
        Self { flux: s.p.clone(), scalar: s.z.clone(), trace: s.z_hat.clone() }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
        let lin = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(u, v)| a * u + b * v).collect();
        Self {
            flux: lin(&self.flux, &other.flux),
            scalar: lin(&self.scalar, &other.scalar),
            trace: lin(&self.trace, &other.trace),
        }
    }

    /// Flips the sign of the parts selected by the flags.
    pub fn signed(&self, flux: f64, scalar: f64, trace: f64) -> Self {
        Self {
            flux: self.flux.iter().map(|v| flux * v).collect(),
            scalar: self.scalar.iter().map(|v| scalar * v).collect(),
            trace: self.trace.iter().map(|v| trace * v).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.flux.iter().chain(&self.scalar).chain(&self.trace).map(|v| v.abs()).fold(0.0, f64::max)
    }

    fn check(&self, dofs: &DofMap) -> Result<()> {
        let want = Self::zeros(dofs);
        for (a, b) in [
            (self.flux.len(), want.flux.len()),
            (self.scalar.len(), want.scalar.len()),
            (self.trace.len(), want.trace.len()),
        ] {
            if a != b {
                return Err(HdgError::DimensionMismatch { expected: b, found: a });
            }
        }
        Ok(())
    }
}

/// Mesh, data and tables shared by the operator evaluations.
pub struct OperatorContext<'a> {
    kern: Kernel<'a>,
    dofs: DofMap,
}

#[derive(Clone, Copy)]
enum Form {
    B1,
    B2,
}

/// Values of a tuple on one element at one point.
struct Local {
    v: [f64; 2],
    div: f64,
    w: f64,
    grad: [f64; 2],
}

impl<'a> OperatorContext<'a> {
    pub fn new(mesh: &'a Mesh, data: &'a ProblemData, h_mode: HMode) -> Result<Self> {
        Ok(Self { kern: Kernel::new(mesh, data, h_mode)?, dofs: DofMap::new(mesh, data.degree)? })
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    fn eval(&self, flux: &[f64], scalar: &[f64], v: &[f64], g: &[[f64; 2]]) -> Local {
        let nk = self.kern.nk;
        let mut out = Local { v: [0.0; 2], div: 0.0, w: 0.0, grad: [0.0; 2] };
        for c in 0..2 {
            for i in 0..nk {
                let a = flux[c * nk + i];
                out.v[c] += a * v[i];
                out.div += a * g[i][c];
            }
        }
        for (j, &b) in scalar.iter().enumerate() {
            out.w += b * v[j];
            out.grad[0] += b * g[j][0];
            out.grad[1] += b * g[j][1];
        }
        out
    }

    fn trace_value(&self, t: &[f64], f: usize, lv: &[f64]) -> f64 {
        let nm = self.kern.nm();
        match self.dofs.face_slot(f) {
            FaceSlot::Interior(i) => t[i * nm..(i + 1) * nm].iter().zip(lv).map(|(a, b)| a * b).sum(),
            FaceSlot::Boundary(_) => 0.0,
        }
    }

    fn element_parts<'t>(&self, t: &'t DiscreteTuple, e: usize) -> (&'t [f64], &'t [f64]) {
        let (nf, ny) = (self.kern.nf(), self.kern.ny);
        (&t.flux[e * nf..(e + 1) * nf], &t.scalar[e * ny..(e + 1) * ny])
    }

    fn apply(&self, form: Form, trial: &DiscreteTuple, test: &DiscreteTuple) -> Result<f64> {
        trial.check(&self.dofs)?;
        test.check(&self.dofs)?;
        let (mesh, data, kern) = (self.kern.mesh, self.kern.data, &self.kern);
        let sgn = match form {
            Form::B1 => 1.0,
            Form::B2 => -1.0,
        };
        let mut total = 0.0;
        for e in 0..mesh.n_elements() {
            let map = mesh.element_map(e);
            let (qf, qs) = self.element_parts(trial, e);
            let (rf, rs) = self.element_parts(test, e);
            for (xi, w) in kern.vol_rule.iter() {
                let w = w * map.det.abs();
                let x = map.to_physical(*xi);
                let v = physical_values(&kern.basis, &map, *xi);
                let g = physical_gradients(&kern.basis, &map, *xi);
                let a = self.eval(qf, qs, &v, &g);
                let b = self.eval(rf, rs, &v, &g);
                let beta = data.beta.at(x);
                let bgw = beta[0] * b.grad[0] + beta[1] * b.grad[1];
                let mut s = a.v[0] * b.v[0] + a.v[1] * b.v[1] - a.w * b.div + a.div * b.w;
                match form {
                    Form::B1 => s += -a.w * bgw - data.beta.divergence(x) * a.w * b.w,
                    Form::B2 => s += a.w * bgw,
                }
                total += w * s;
            }
            for (l, &f) in mesh.element_faces(e).iter().enumerate() {
                let (n, _) = mesh.local_face_geometry(e, l);
                let hi = kern.h_inv(f);
                let tau2 = data.tau2.on_face(f);
                let interior = !mesh.face(f).is_boundary();
                for (x, w, lv) in kern.face_points(f) {
                    let xi = map.to_reference(x);
                    let v = physical_values(&kern.basis, &map, xi);
                    let g = physical_gradients(&kern.basis, &map, xi);
                    let a = self.eval(qf, qs, &v, &g);
                    let b = self.eval(rf, rs, &v, &g);
                    let beta = data.beta.at(x);
                    let bn = beta[0] * n[0] + beta[1] * n[1];
                    let s = match form {
                        Form::B1 => hi + data.tau1(tau2, beta, n),
                        Form::B2 => hi + tau2,
                    };
                    let mut acc = s * a.w * b.w;
                    if interior {
                        let th = self.trace_value(&trial.trace, f, &lv);
                        let mu = self.trace_value(&test.trace, f, &lv);
                        let rn = b.v[0] * n[0] + b.v[1] * n[1];
                        let qn = a.v[0] * n[0] + a.v[1] * n[1];
                        acc += th * rn + (sgn * bn - s) * th * b.w;
                        acc -= (qn + sgn * bn * th + s * (a.w - th)) * mu;
                    }
                    total += w * acc;
                }
            }
        }
        Ok(total)
    }

    pub fn b1(&self, trial: &DiscreteTuple, test: &DiscreteTuple) -> Result<f64> {
        self.apply(Form::B1, trial, test)
    }

    pub fn b2(&self, trial: &DiscreteTuple, test: &DiscreteTuple) -> Result<f64> {
        self.apply(Form::B2, trial, test)
    }

    /// Right side of the energy identity for `B1(t, t)` (`B2` when `adjoint`).
    fn energy(&self, t: &DiscreteTuple, adjoint: bool) -> Result<f64> {
        t.check(&self.dofs)?;
        let (mesh, data, kern) = (self.kern.mesh, self.kern.data, &self.kern);
        let mut total = 0.0;
        for e in 0..mesh.n_elements() {
            let map = mesh.element_map(e);
            let (tf, ts) = self.element_parts(t, e);
            for (xi, w) in kern.vol_rule.iter() {
                let w = w * map.det.abs();
                let x = map.to_physical(*xi);
                let v = physical_values(&kern.basis, &map, *xi);
                let g = physical_gradients(&kern.basis, &map, *xi);
                let a = self.eval(tf, ts, &v, &g);
                total += w * (a.v[0] * a.v[0] + a.v[1] * a.v[1] - 0.5 * data.beta.divergence(x) * a.w * a.w);
            }
            for (l, &f) in mesh.element_faces(e).iter().enumerate() {
                let (n, _) = mesh.local_face_geometry(e, l);
                let hi = kern.h_inv(f);
                let tau2 = data.tau2.on_face(f);
                for (x, w, lv) in kern.face_points(f) {
                    let xi = map.to_reference(x);
                    let v = physical_values(&kern.basis, &map, xi);
                    let wv: f64 = ts.iter().zip(&v).map(|(c, b)| c * b).sum();
                    let beta = data.beta.at(x);
                    let bn = beta[0] * n[0] + beta[1] * n[1];
                    let coef = if adjoint {
                        hi + tau2 + 0.5 * bn
                    } else {
                        hi + data.tau1(tau2, beta, n) - 0.5 * bn
                    };
                    let jump = wv - self.trace_value(&t.trace, f, &lv);
                    total += w * coef * jump * jump;
                }
            }
        }
        Ok(total)
    }

    pub fn energy_b1(&self, t: &DiscreteTuple) -> Result<f64> {
        self.energy(t, false)
    }

    pub fn energy_b2(&self, t: &DiscreteTuple) -> Result<f64> {
        self.energy(t, true)
    }

    /// Terms of the optimality system outside `B1` and `B2`: the control in
    /// the state equations, `-(y, w2)` and the optimality condition.
    pub fn couplings(&self, trial: &SolutionFields, test: &SolutionFields) -> Result<f64> {
        let (mesh, data, kern) = (self.kern.mesh, self.kern.data, &self.kern);
        let (nf, ny, nm) = (kern.nf(), kern.ny, kern.nm());
        let mut total = 0.0;
        for e in 0..mesh.n_elements() {
            let map = mesh.element_map(e);
            let y = &trial.y[e * ny..(e + 1) * ny];
            let w2 = &test.z[e * ny..(e + 1) * ny];
            for (xi, w) in kern.vol_rule.iter() {
                let v = physical_values(&kern.basis, &map, *xi);
                let a: f64 = y.iter().zip(&v).map(|(c, b)| c * b).sum();
                let b: f64 = w2.iter().zip(&v).map(|(c, b)| c * b).sum();
                total -= w * map.det.abs() * a * b;
            }
        }
        for &f in mesh.boundary_faces() {
            let face = mesh.face(f);
            let (e, l) = (face.elements()[0], face.local_indices()[0]);
            let FaceSlot::Boundary(bi) = self.dofs.face_slot(f) else { unreachable!("boundary face") };
            let map = mesh.element_map(e);
            let (n, _) = mesh.local_face_geometry(e, l);
            let hi = kern.h_inv(f);
            let tau2 = data.tau2.on_face(f);
            let u = &trial.u[bi * nm..(bi + 1) * nm];
            let mu3 = &test.u[bi * nm..(bi + 1) * nm];
            for (x, w, lv) in kern.face_points(f) {
                let xi = map.to_reference(x);
                let v = physical_values(&kern.basis, &map, xi);
                let g = physical_gradients(&kern.basis, &map, xi);
                let r1 = self.eval(&test.q[e * nf..(e + 1) * nf], &test.y[e * ny..(e + 1) * ny], &v, &g);
                let p = self.eval(&trial.p[e * nf..(e + 1) * nf], &trial.z[e * ny..(e + 1) * ny], &v, &g);
                let uv: f64 = u.iter().zip(&lv).map(|(a, b)| a * b).sum();
                let mv: f64 = mu3.iter().zip(&lv).map(|(a, b)| a * b).sum();
                let beta = data.beta.at(x);
                let bn = beta[0] * n[0] + beta[1] * n[1];
                let tau1 = data.tau1(tau2, beta, n);
                let r1n = r1.v[0] * n[0] + r1.v[1] * n[1];
                let pn = p.v[0] * n[0] + p.v[1] * n[1];
                total += w * (uv * r1n + (bn - tau1 - hi) * uv * r1.w);
                total += w * (pn + data.gamma * uv + (hi + tau2) * p.w) * mv;
            }
        }
        Ok(total)
    }

    /// `test^T A trial` for the assembled optimality matrix `A`, built from
    /// the bilinear forms: the transmission rows enter with test traces negated.
    pub fn system_form(&self, trial: &SolutionFields, test: &SolutionFields) -> Result<f64> {
        let b1 = self.b1(&DiscreteTuple::state(trial), &DiscreteTuple::state(test).signed(1.0, 1.0, -1.0))?;
        let b2 = self.b2(&DiscreteTuple::adjoint(trial), &DiscreteTuple::adjoint(test).signed(1.0, 1.0, -1.0))?;
        Ok(b1 + b2 + self.couplings(trial, test)?)
    }
}

pub fn apply_b1(ctx: &OperatorContext, trial: &DiscreteTuple, test: &DiscreteTuple) -> Result<f64> {
    ctx.b1(trial, test)
}

pub fn apply_b2(ctx: &OperatorContext, trial: &DiscreteTuple, test: &DiscreteTuple) -> Result<f64> {
    ctx.b2(trial, test)
}

pub fn energy_b1(ctx: &OperatorContext, t: &DiscreteTuple) -> Result<f64> {
    ctx.energy_b1(t)
}

pub fn energy_b2(ctx: &OperatorContext, t: &DiscreteTuple) -> Result<f64> {
    ctx.energy_b2(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(k: usize) -> (Mesh, ProblemData) {
        (Mesh::build_structured(1.0, 3).unwrap(), ProblemData::zero(1.0, k))
    }

    #[test]
    fn energy_identities() {
        for k in 0..=2 {
            let (mesh, data) = setup(k);
            let ctx = OperatorContext::new(&mesh, &data, HMode::Local).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            for _ in 0..5 {
                let t = DiscreteTuple::random(ctx.dofs(), &mut rng);
                let (lhs, rhs) = (ctx.b1(&t, &t).unwrap(), ctx.energy_b1(&t).unwrap());
                assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs(), "B1 k={k}: {lhs} {rhs}");
                let (lhs, rhs) = (ctx.b2(&t, &t).unwrap(), ctx.energy_b2(&t).unwrap());
                assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs(), "B2 k={k}: {lhs} {rhs}");
            }
        }
    }

    #[test]
    fn adjoint_identity() {
        let (mesh, data) = setup(1);
        let ctx = OperatorContext::new(&mesh, &data, HMode::Local).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = DiscreteTuple::random(ctx.dofs(), &mut rng);
        let a = DiscreteTuple::random(ctx.dofs(), &mut rng);
        let x = ctx.b1(&s, &a.signed(1.0, -1.0, -1.0)).unwrap();
        let y = ctx.b2(&a, &s.signed(-1.0, 1.0, 1.0)).unwrap();
        assert!((x + y).abs() <= 1e-10 * (x.abs() + y.abs()));
    }

    #[test]
    fn zero_trial_and_size_check() {
        let (mesh, data) = setup(0);
        let ctx = OperatorContext::new(&mesh, &data, HMode::Local).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = DiscreteTuple::random(ctx.dofs(), &mut rng);
        let z = DiscreteTuple::zeros(ctx.dofs());
        assert_eq!(ctx.b1(&z, &t).unwrap(), 0.0);
        assert_eq!(ctx.b2(&z, &t).unwrap(), 0.0);
        let mut bad = t.clone();
        bad.trace.pop();
        assert!(ctx.b1(&bad, &t).is_err());
    }
}
