use crate::error::{HdgError, Result};

/// Number of bivariate polynomials of total degree `<= k`.
pub const fn dim_p2(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Modal basis of `P^k` on the reference triangle, orthonormal in `L2`.
///
/// Built by Cholesky-orthonormalizing the monomials `x^i y^j` ordered by total
/// degree, so the first `dim_p2(m)` functions span `P^m` for every `m <= k`.
#[derive(Debug, Clone)]
pub struct TriBasis {
    degree: usize,
    exponents: Vec<(i32, i32)>,
    /// Row `a` holds the monomial coefficients of basis function `a`.
    coeffs: Vec<Vec<f64>>,
}

impl TriBasis {
    pub fn new(degree: usize) -> Result<Self> {
        if degree > 6 {
            return Err(HdgError::UnsupportedDegree { degree, supported: "0..=6".into() });
        }
        let exponents: Vec<(i32, i32)> = (0..=degree as i32)
            .flat_map(|d| (0..=d).map(move |j| (d - j, j)))
            .collect();
        let n = exponents.len();
        let gram: Vec<Vec<f64>> = exponents
            .iter()
            .map(|&(i1, j1)| {
                exponents
                    .iter()
                    .map(|&(i2, j2)| monomial_integral((i1 + i2) as usize, (j1 + j2) as usize))
                    .collect()
            })
            .collect();
        let l = cholesky(&gram);
        let coeffs = lower_inverse(&l);
        debug_assert_eq!(coeffs.len(), n);
        Ok(Self { degree, exponents, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    fn monomials(&self, xi: [f64; 2]) -> Vec<f64> {
        self.exponents.iter().map(|&(i, j)| xi[0].powi(i) * xi[1].powi(j)).collect()
    }

    fn monomial_gradients(&self, xi: [f64; 2]) -> Vec<[f64; 2]> {
        self.exponents
            .iter()
            .map(|&(i, j)| {
                let dx = if i > 0 { i as f64 * xi[0].powi(i - 1) * xi[1].powi(j) } else { 0.0 };
                let dy = if j > 0 { j as f64 * xi[0].powi(i) * xi[1].powi(j - 1) } else { 0.0 };
                [dx, dy]
            })
            .collect()
    }

    /// Values of all basis functions at a reference point.
    pub fn values(&self, xi: [f64; 2]) -> Vec<f64> {
        let m = self.monomials(xi);
        self.coeffs
            .iter()
            .map(|row| row.iter().zip(&m).map(|(c, v)| c * v).sum())
            .collect()
    }

    /// Reference gradients of all basis functions at a reference point.
    pub fn gradients(&self, xi: [f64; 2]) -> Vec<[f64; 2]> {
        let g = self.monomial_gradients(xi);
        self.coeffs
            .iter()
            .map(|row| {
                row.iter().zip(&g).fold([0.0, 0.0], |acc, (c, d)| [acc[0] + c * d[0], acc[1] + c * d[1]])
            })
            .collect()
    }

    /// Value tables `[point][function]` for a set of reference points.
    pub fn value_table(&self, points: &[[f64; 2]]) -> Vec<Vec<f64>> {
        points.iter().map(|&p| self.values(p)).collect()
    }

    pub fn gradient_table(&self, points: &[[f64; 2]]) -> Vec<Vec<[f64; 2]>> {
        points.iter().map(|&p| self.gradients(p)).collect()
    }
}

/// Orthonormal Legendre basis of `P^k` on `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct EdgeBasis {
    degree: usize,
}

impl EdgeBasis {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self, t: f64) -> Vec<f64> {
        let x = 2.0 * t - 1.0;
        let mut out = Vec::with_capacity(self.degree + 1);
        let (mut p0, mut p1) = (1.0, x);
        for m in 0..=self.degree {
            let p = match m {
                0 => 1.0,
                1 => x,
                _ => {
                    let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                    p0 = p1;
                    p1 = p2;
                    p2
                }
            };
            out.push(((2 * m + 1) as f64).sqrt() * p);
        }
        out
    }
}

/// `int_T x^i y^j` over the reference triangle, `i! j! / (i + j + 2)!`.
pub fn monomial_integral(i: usize, j: usize) -> f64 {
    let f = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
    f(i) * f(j) / f(i + j + 2)
}

fn cholesky(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                l[i][i] = (a[i][i] - s).sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    l
}

fn lower_inverse(l: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = l.len();
    let mut inv = vec![vec![0.0; n]; n];
    for col in 0..n {
        for i in col..n {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let s: f64 = (col..i).map(|k| l[i][k] * inv[k][col]).sum();
            inv[i][col] = (rhs - s) / l[i][i];
        }
    }
    inv
}
