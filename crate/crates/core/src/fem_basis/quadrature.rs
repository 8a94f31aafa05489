use crate::error::{HdgError, Result};

/// Highest exactness degree served by the rule tables.
pub const MAX_DEGREE: usize = 40;

#[derive(Debug, Clone)]
pub struct QuadratureRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

pub type TriangleRule = QuadratureRule<2>;
pub type EdgeRule = QuadratureRule<1>;

impl<const D: usize> QuadratureRule<D> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; D], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > MAX_DEGREE {
        return Err(HdgError::UnsupportedDegree {
            degree,
            supported: format!("0..={MAX_DEGREE}"),
        });
    }
    Ok(())
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Newton from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[m - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[m - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=m {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss rule on `[0, 1]` exact for polynomials up to `degree`.
pub fn quadrature_edge(degree: usize) -> Result<EdgeRule> {
    check_degree(degree)?;
    let m = degree / 2 + 1;
    let (nodes, weights) = gauss_legendre(m);
    Ok(QuadratureRule { points: nodes.into_iter().map(|t| [t]).collect(), weights, degree })
}

/// Collapsed (Duffy) Gauss product rule on the reference triangle, exact for
/// bivariate polynomials of total degree up to `degree`.
pub fn quadrature_triangle(degree: usize) -> Result<TriangleRule> {
    check_degree(degree)?;
    // x = s, y = t (1 - s); the jacobian (1 - s) adds one degree in s
    let m = degree.div_ceil(2) + 1;
    let (nodes, weights) = gauss_legendre(m);
    let mut points = Vec::with_capacity(m * m);
    let mut w = Vec::with_capacity(m * m);
    for (s, ws) in nodes.iter().zip(&weights) {
        for (t, wt) in nodes.iter().zip(&weights) {
            points.push([*s, t * (1.0 - s)]);
            w.push(ws * wt * (1.0 - s));
        }
    }
    Ok(QuadratureRule { points, weights: w, degree })
}
