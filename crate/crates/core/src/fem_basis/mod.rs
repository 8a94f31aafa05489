//! Reference-element bases, quadrature and the element/face `L2` projections.
//!
//! Physical basis functions are the reference ones scaled by `|det J|^{-1/2}`
//! (faces: `|e|^{-1/2}`), so they stay orthonormal on every element and face
//! and projections reduce to moments.

pub mod poly;
pub mod quadrature;

pub use poly::{dim_p2, monomial_integral, EdgeBasis, TriBasis};
pub use quadrature::{quadrature_edge, quadrature_triangle, EdgeRule, QuadratureRule, TriangleRule};

use crate::error::Result;
use crate::mesh::{ElementMap, Mesh, Point};

/// Reference points and weights (reference measure) of a quadrature on one element.
#[derive(Debug, Clone)]
pub struct ElementQuadrature {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl ElementQuadrature {
    pub fn from_rule(rule: &TriangleRule) -> Self {
        Self { points: rule.points.clone(), weights: rule.weights.clone() }
    }

    /// Composite rule graded towards reference corner `corner`: the triangle is
    /// split into four halves-similar children `depth` times, always recursing
    /// into the child at the corner. Absorbs integrable point singularities.
    pub fn graded(rule: &TriangleRule, corner: usize, depth: usize) -> Self {
        let verts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let mut tri = [verts[corner], verts[(corner + 1) % 3], verts[(corner + 2) % 3]];
        let mut out = Self { points: Vec::new(), weights: Vec::new() };
        for _ in 0..depth {
            let mid = |a: [f64; 2], b: [f64; 2]| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let (a, b, c) = (tri[0], tri[1], tri[2]);
            let (ab, bc, ca) = (mid(a, b), mid(b, c), mid(c, a));
            for child in [[ab, b, bc], [ca, bc, c], [ab, bc, ca]] {
                out.push_mapped(rule, child);
            }
            tri = [a, ab, ca];
        }
        out.push_mapped(rule, tri);
        out
    }

    fn push_mapped(&mut self, rule: &TriangleRule, t: [[f64; 2]; 3]) {
        let e1 = [t[1][0] - t[0][0], t[1][1] - t[0][1]];
        let e2 = [t[2][0] - t[0][0], t[2][1] - t[0][1]];
        let det = (e1[0] * e2[1] - e1[1] * e2[0]).abs();
        for (p, w) in rule.iter() {
            self.points.push([t[0][0] + e1[0] * p[0] + e2[0] * p[1], t[0][1] + e1[1] * p[0] + e2[1] * p[1]]);
            self.weights.push(w * det);
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Physical-basis values at a reference point.
pub fn physical_values(basis: &TriBasis, map: &ElementMap, xi: [f64; 2]) -> Vec<f64> {
    let s = map.det.abs().sqrt().recip();
    basis.values(xi).into_iter().map(|v| v * s).collect()
}

/// Physical-basis gradients at a reference point.
pub fn physical_gradients(basis: &TriBasis, map: &ElementMap, xi: [f64; 2]) -> Vec<[f64; 2]> {
    let s = map.det.abs().sqrt().recip();
    basis
        .gradients(xi)
        .into_iter()
        .map(|g| {
            let p = map.push_gradient(g);
            [p[0] * s, p[1] * s]
        })
        .collect()
}

/// Evaluates an element expansion at a physical point.
pub fn eval_volume(basis: &TriBasis, map: &ElementMap, coeffs: &[f64], x: Point) -> f64 {
    physical_values(basis, map, map.to_reference(x)).iter().zip(coeffs).map(|(v, c)| v * c).sum()
}

/// Evaluates a face expansion at canonical face parameter `t`.
pub fn eval_trace(basis: &EdgeBasis, face_length: f64, coeffs: &[f64], t: f64) -> f64 {
    let s = face_length.sqrt().recip();
    basis.values(t).iter().zip(coeffs).map(|(v, c)| v * c * s).sum()
}

/// Canonical face parameter of a point lying on face `f`.
pub fn face_parameter(mesh: &Mesh, f: usize, x: Point) -> f64 {
    let (a, b) = mesh.face_endpoints(f);
    let d = [b[0] - a[0], b[1] - a[1]];
    ((x[0] - a[0]) * d[0] + (x[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1])
}

/// `L2(K)` projection of `f` onto `P^degree(K)` (coefficients in the physical
/// orthonormal basis), integrated with a rule of exactness `quad_degree`.
pub fn project_volume(
    f: &dyn Fn(Point) -> f64,
    mesh: &Mesh,
    element: usize,
    degree: usize,
    quad_degree: usize,
) -> Result<Vec<f64>> {
    let basis = TriBasis::new(degree)?;
    let rule = quadrature_triangle(quad_degree)?;
    Ok(project_volume_with(f, &basis, &mesh.element_map(element), &ElementQuadrature::from_rule(&rule)))
}

pub fn project_volume_with(
    f: &dyn Fn(Point) -> f64,
    basis: &TriBasis,
    map: &ElementMap,
    quad: &ElementQuadrature,
) -> Vec<f64> {
    let mut c = vec![0.0; basis.len()];
    for (xi, w) in quad.points.iter().zip(&quad.weights) {
        let fx = f(map.to_physical(*xi));
        let wdet = w * map.det.abs() * fx;
        for (ci, v) in c.iter_mut().zip(physical_values(basis, map, *xi)) {
            *ci += wdet * v;
        }
    }
    c
}

/// `L2(e)` projection of `g` onto `P^degree(e)` for face `face`.
pub fn project_trace(
    g: &dyn Fn(Point) -> f64,
    mesh: &Mesh,
    face: usize,
    degree: usize,
    quad_degree: usize,
) -> Result<Vec<f64>> {
    let rule = quadrature_edge(quad_degree)?;
    Ok(project_trace_with(g, &EdgeBasis::new(degree), mesh, face, &rule))
}

pub fn project_trace_with(
    g: &dyn Fn(Point) -> f64,
    basis: &EdgeBasis,
    mesh: &Mesh,
    face: usize,
    rule: &EdgeRule,
) -> Vec<f64> {
    let (a, b) = mesh.face_endpoints(face);
    let len = mesh.face_length(face);
    let s = len.sqrt();
    let mut c = vec![0.0; basis.len()];
    for (t, w) in rule.iter() {
        let x = [a[0] + t[0] * (b[0] - a[0]), a[1] + t[0] * (b[1] - a[1])];
        let gx = g(x) * w * s;
        for (ci, v) in c.iter_mut().zip(basis.values(t[0])) {
            *ci += gx * v;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mesh() -> Mesh {
        Mesh::build_structured(0.125, 2).unwrap()
    }

    #[test]
    fn projection_reproduces_linear() {
        let m = mesh();
        let f = |x: Point| 3.0 * x[0] - x[1];
        for e in 0..m.n_elements() {
            let c = project_volume(&f, &m, e, 1, 6).unwrap();
            let map = m.element_map(e);
            let basis = TriBasis::new(1).unwrap();
            for xi in [[0.2, 0.2], [0.6, 0.1], [0.1, 0.8]] {
                let x = map.to_physical(xi);
                assert!((eval_volume(&basis, &map, &c, x) - f(x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projection_of_zero() {
        let c = project_volume(&|_| 0.0, &mesh(), 3, 2, 8).unwrap();
        assert!(c.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn projection_of_square_matches_normal_equations() {
        // lower triangle of the unit square
        let m = Mesh::build_structured(1.0, 1).unwrap();
        let map = m.element_map(0); // (0,0),(1,0),(1,1)
        let c = project_volume(&|x| x[0] * x[0], &m, 0, 1, 8).unwrap();
        let basis = TriBasis::new(1).unwrap();
        // independent: best fit a + b x + c y via the 3x3 normal equations,
        // with the element moments int x^i y^j computed in closed form
        // on K = {0 <= y <= x <= 1}: int x^i y^j = 1 / ((j + 1) (i + j + 2))
        let mom = |i: i32, j: i32| 1.0 / (((j + 1) * (i + j + 2)) as f64);
        let ex = [(0, 0), (1, 0), (0, 1)];
        let mut a = [[0.0; 3]; 3];
        let mut rhs = [0.0; 3];
        for r in 0..3 {
            for s in 0..3 {
                a[r][s] = mom(ex[r].0 + ex[s].0, ex[r].1 + ex[s].1);
            }
            rhs[r] = mom(ex[r].0 + 2, ex[r].1);
        }
        let sol = solve3(a, rhs);
        for xi in [[0.2, 0.1], [0.5, 0.4], [0.9, 0.05]] {
            let x = map.to_physical(xi);
            let fit = sol[0] + sol[1] * x[0] + sol[2] * x[1];
            assert!((eval_volume(&basis, &map, &c, x) - fit).abs() < 1e-12);
        }
    }

    fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
        for i in 0..3 {
            let p = (i..3).max_by(|&r, &s| a[r][i].abs().total_cmp(&a[s][i].abs())).unwrap();
            a.swap(i, p);
            b.swap(i, p);
            for r in i + 1..3 {
                let f = a[r][i] / a[i][i];
                for c in i..3 {
                    a[r][c] -= f * a[i][c];
                }
                b[r] -= f * b[i];
            }
        }
        let mut x = [0.0; 3];
        for i in (0..3).rev() {
            x[i] = (b[i] - (i + 1..3).map(|c| a[i][c] * x[c]).sum::<f64>()) / a[i][i];
        }
        x
    }

    #[test]
    fn projection_is_idempotent() {
        let m = mesh();
        let basis = TriBasis::new(2).unwrap();
        let map = m.element_map(5);
        let quad = ElementQuadrature::from_rule(&quadrature_triangle(10).unwrap());
        let f = |x: Point| (7.0 * x[0]).sin() * (3.0 * x[1]).exp();
        let c1 = project_volume_with(&f, &basis, &map, &quad);
        let g = |x: Point| eval_volume(&basis, &map, &c1, x);
        let c2 = project_volume_with(&g, &basis, &map, &quad);
        for (a, b) in c1.iter().zip(&c2) {
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn projection_residual_is_orthogonal() {
        let m = mesh();
        let basis = TriBasis::new(2).unwrap();
        let map = m.element_map(2);
        let quad = ElementQuadrature::from_rule(&quadrature_triangle(12).unwrap());
        let f = |x: Point| (x[0] * 40.0).cos() + x[1];
        let c = project_volume_with(&f, &basis, &map, &quad);
        for i in 0..basis.len() {
            let (mut r, mut scale) = (0.0, 0.0);
            for (xi, w) in quad.points.iter().zip(&quad.weights) {
                let x = map.to_physical(*xi);
                let v = physical_values(&basis, &map, *xi)[i];
                let wd = w * map.det;
                r += wd * (f(x) - eval_volume(&basis, &map, &c, x)) * v;
                scale += wd * (f(x) * v).abs();
            }
            assert!(r.abs() <= 1e-11 * scale);
        }
    }

    #[test]
    fn trace_projection() {
        let m = mesh();
        let f = m.boundary_faces()[0];
        let len = m.face_length(f);
        let eb = EdgeBasis::new(2);
        // constant
        let c = project_trace(&|_| 2.5, &m, f, 2, 6).unwrap();
        assert!((c[0] - 2.5 * len.sqrt()).abs() < 1e-14);
        assert!(c[1].abs() < 1e-14 && c[2].abs() < 1e-14);
        // linear in arclength
        let lin = |x: Point| 1.0 + 4.0 * face_parameter(&m, f, x);
        let c = project_trace(&lin, &m, f, 1, 6).unwrap();
        for t in [0.1, 0.5, 0.77] {
            assert!((eval_trace(&EdgeBasis::new(1), len, &c, t) - (1.0 + 4.0 * t)).abs() < 1e-12);
        }
        // t^3 onto P^2 against the 3x3 normal equations on [0,1], rescaled
        let cube = |x: Point| face_parameter(&m, f, x).powi(3);
        let c = project_trace(&cube, &m, f, 2, 8).unwrap();
        let hilbert = |i: usize, j: usize| 1.0 / (i + j + 1) as f64;
        let mut a3 = [[0.0; 3]; 3];
        let mut rhs = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                a3[i][j] = hilbert(i, j);
            }
            rhs[i] = hilbert(i, 3);
        }
        let sol = solve3(a3, rhs);
        for t in [0.0, 0.3, 0.9] {
            let fit = sol[0] + sol[1] * t + sol[2] * t * t;
            assert!((eval_trace(&eb, len, &c, t) - fit).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_map_consistency() {
        let m = Mesh::build_structured(0.3, 3).unwrap();
        let rule = quadrature_triangle(6).unwrap();
        for e in [0, 7, 17] {
            let map = m.element_map(e);
            let [a, b, c] = m.triangles()[e].map(|v| m.vertices()[v]);
            for i in 0..=3i32 {
                for j in 0..=(3 - i) {
                    let got: f64 = rule
                        .iter()
                        .map(|(p, w)| {
                            let x = map.to_physical(*p);
                            w * map.det * x[0].powi(i) * x[1].powi(j)
                        })
                        .sum();
                    let exact = triangle_monomial_exact(a, b, c, i, j);
                    assert!((got - exact).abs() <= 1e-12 * exact.abs().max(1e-300));
                }
            }
        }
    }

    // Closed form via barycentric expansion:
    // int_K l1^p l2^q l3^r = 2|K| p! q! r! / (p+q+r+2)!
    fn triangle_monomial_exact(a: Point, b: Point, c: Point, i: i32, j: i32) -> f64 {
        let area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).abs();
        let fact = |n: i32| (1..=n).map(|v| v as f64).product::<f64>();
        let mut total = 0.0;
        // x = a0 l1 + b0 l2 + c0 l3, expanded with multinomials
        for p1 in 0..=i {
            for q1 in 0..=(i - p1) {
                let r1 = i - p1 - q1;
                let cx = fact(i) / (fact(p1) * fact(q1) * fact(r1)) * a[0].powi(p1) * b[0].powi(q1) * c[0].powi(r1);
                for p2 in 0..=j {
                    for q2 in 0..=(j - p2) {
                        let r2 = j - p2 - q2;
                        let cy = fact(j) / (fact(p2) * fact(q2) * fact(r2))
                            * a[1].powi(p2)
                            * b[1].powi(q2)
                            * c[1].powi(r2);
                        let (p, q, r) = (p1 + p2, q1 + q2, r1 + r2);
                        total += cx * cy * 2.0 * area * fact(p) * fact(q) * fact(r) / fact(p + q + r + 2);
                    }
                }
            }
        }
        total
    }

    #[test]
    fn graded_rule_integrates_polynomials_and_singularity() {
        let rule = quadrature_triangle(8).unwrap();
        for corner in 0..3 {
            let q = ElementQuadrature::graded(&rule, corner, 6);
            let sum: f64 = q.weights.iter().sum();
            assert!((sum - 0.5).abs() < 1e-14);
            let v: f64 = q.points.iter().zip(&q.weights).map(|(p, w)| w * p[0] * p[0] * p[1]).sum();
            assert!((v - 1.0 / 60.0).abs() < 1e-15);
        }
        // int over the reference triangle of r^{-4/3} = int_0^{pi/2} int_0^{R(th)} r^{-1/3} dr dth
        // with R = 1/(cos th + sin th); closed form in theta evaluated by a fine midpoint sum
        let m = 200_000;
        let exact: f64 = (0..m)
            .map(|i| {
                let th = (i as f64 + 0.5) * std::f64::consts::FRAC_PI_2 / m as f64;
                1.5 * (th.cos() + th.sin()).powf(-2.0 / 3.0)
            })
            .sum::<f64>()
            * std::f64::consts::FRAC_PI_2
            / m as f64;
        let f = |p: &[f64; 2]| (p[0] * p[0] + p[1] * p[1]).powf(-2.0 / 3.0);
        let coarse: f64 = ElementQuadrature::from_rule(&rule).points.iter().zip(&rule.weights).map(|(p, w)| w * f(p)).sum();
        let q = ElementQuadrature::graded(&rule, 0, 12);
        let fine: f64 = q.points.iter().zip(&q.weights).map(|(p, w)| w * f(p)).sum();
        let mid_q = ElementQuadrature::graded(&rule, 0, 6);
        let mid: f64 = mid_q.points.iter().zip(&mid_q.weights).map(|(p, w)| w * f(p)).sum();
        assert!((fine - exact).abs() < 1e-3 * exact);
        assert!((fine - exact).abs() < (mid - exact).abs());
        assert!((mid - exact).abs() < (coarse - exact).abs());
    }
}
