//! Convergence rates predicted by the error analysis.

/// Sobolev exponents of the exact solution `(q, y, p, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularity {
    pub r_q: f64,
    pub r_y: f64,
    pub r_p: f64,
    pub r_z: f64,
}

impl Regularity {
    /// Exponents reached when the solution is limited by the rate `r`:
    /// `q in H^{r-1/2}`, `y, p in H^{r+1/2}`, `z in H^{r+3/2}`.
    pub fn from_rate(r: f64) -> Self {
        Self { r_q: r - 0.5, r_y: r + 0.5, r_p: r + 0.5, r_z: r + 1.5 }
    }
}

/// Predicted L2 rates for flux degree `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedRates {
    pub k: usize,
    pub s_q: f64,
    pub s_y: f64,
    pub s_p: f64,
    pub s_z: f64,
}

impl ExpectedRates {
    pub fn new(k: usize, reg: Regularity) -> Self {
        let (k1, k2) = (k as f64 + 1.0, k as f64 + 2.0);
        Self { k, s_q: reg.r_q.min(k1), s_y: reg.r_y.min(k2), s_p: reg.r_p.min(k1), s_z: reg.r_z.min(k2) }
    }

    /// Rate for `u`, `y`, `p` and `z`.
    pub fn control(&self) -> f64 {
        (self.s_p - 0.5).min(self.s_z - 1.5).min(self.s_q + 0.5).min(self.s_y - 0.5)
    }

    /// Rate for `q`; the bound is only proved for `k >= 1`.
    pub fn flux(&self) -> Option<f64> {
        (self.k >= 1).then(|| (self.s_p - 1.0).min(self.s_z - 2.0).min(self.s_q).min(self.s_y - 1.0))
    }

    pub fn low_order(&self) -> bool {
        self.k == 0
    }

    /// Forward-problem rates `(y, q)` for a smooth solution: `(k + 2, k + 1)`.
    pub fn smooth_forward(k: usize) -> (f64, f64) {
        (k as f64 + 2.0, k as f64 + 1.0)
    }
}

/// Rate limit from the data on a polygon: `y_d in H^{t*}` and largest
/// interior angle `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonLimit {
    pub t_star: f64,
    pub omega: f64,
}

impl PolygonLimit {
    pub fn r_d(&self) -> f64 {
        0.5 + self.t_star
    }

    pub fn r_omega(&self) -> f64 {
        1.5f64.min(std::f64::consts::PI / self.omega - 0.5)
    }

    pub fn rate(&self) -> f64 {
        self.r_d().min(self.r_omega())
    }

    /// The benchmark: `y_d = |x|^{-2/3}` lies in `H^{1/3 - eps}` on a square.
    pub fn benchmark() -> Self {
        Self { t_star: 1.0 / 3.0, omega: std::f64::consts::FRAC_PI_2 }
    }

    pub fn expected(&self, k: usize) -> ExpectedRates {
        ExpectedRates::new(k, Regularity::from_rate(self.rate()))
    }
}
