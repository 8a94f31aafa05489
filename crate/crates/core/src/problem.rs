//! Problem data for the boundary control problem and its validity checks.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::fem_basis::{quadrature_edge, quadrature_triangle};
use crate::mesh::{Mesh, Point};

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
pub type VectorFn = Arc<dyn Fn(Point) -> [f64; 2] + Send + Sync>;

/// Convection field `beta`. Variable fields carry their divergence in closed form.
#[derive(Clone)]
pub enum Convection {
    Constant([f64; 2]),
    Field { beta: VectorFn, divergence: ScalarFn },
}

impl Convection {
    pub fn at(&self, x: Point) -> [f64; 2] {
        match self {
            Convection::Constant(b) => *b,
            Convection::Field { beta, .. } => beta(x),
        }
    }

    pub fn divergence(&self, x: Point) -> f64 {
        match self {
            Convection::Constant(_) => 0.0,
            Convection::Field { divergence, .. } => divergence(x),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Convection::Constant(_))
    }
}

impl fmt::Debug for Convection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convection::Constant(b) => write!(f, "Constant({b:?})"),
            Convection::Field { .. } => write!(f, "Field(..)"),
        }
    }
}

/// Stabilization `tau2`, constant on each face.
#[derive(Debug, Clone, PartialEq)]
pub enum Tau2 {
    Constant(f64),
    PerFace(Vec<f64>),
}

impl Tau2 {
    pub fn on_face(&self, f: usize) -> f64 {
        match self {
            Tau2::Constant(t) => *t,
            Tau2::PerFace(v) => v[f],
        }
    }
}

/// How `tau1` is derived from `tau2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Tau1Rule {
    /// `tau1 = tau2 + beta . n`, evaluated pointwise.
    #[default]
    Coupled,
    /// `tau1 = tau2`; breaks the coupling on purpose (diagnostics only).
    EqualTau2,
}

#[derive(Clone)]
pub struct ProblemData {
    pub beta: Convection,
    pub source: ScalarFn,
    pub desired_state: ScalarFn,
    pub gamma: f64,
    pub tau2: Tau2,
    pub tau1_rule: Tau1Rule,
    pub length: f64,
    pub degree: usize,
    /// Point where `desired_state` (or `source`) is singular; elements having it
    /// as a vertex are integrated with a graded composite rule.
    pub singular_point: Option<Point>,
    pub singular_depth: usize,
}

impl fmt::Debug for ProblemData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemData")
            .field("beta", &self.beta)
            .field("gamma", &self.gamma)
            .field("tau2", &self.tau2)
            .field("tau1_rule", &self.tau1_rule)
            .field("length", &self.length)
            .field("degree", &self.degree)
            .field("singular_point", &self.singular_point)
            .finish_non_exhaustive()
    }
}

/// Default grading depth for elements touching a singular point.
pub const DEFAULT_SINGULAR_DEPTH: usize = 8;

impl ProblemData {
    /// `tau1` at a face point with outward normal `n`.
    pub fn tau1(&self, tau2: f64, beta: [f64; 2], n: [f64; 2]) -> f64 {
        match self.tau1_rule {
            Tau1Rule::Coupled => tau2 + beta[0] * n[0] + beta[1] * n[1],
            Tau1Rule::EqualTau2 => tau2,
        }
    }

    /// Homogeneous data: `f = 0`, `y_d = 0`, beta = (1, 1), gamma = tau2 = 1.
    pub fn zero(length: f64, degree: usize) -> Self {
        Self {
            beta: Convection::Constant([1.0, 1.0]),
            source: Arc::new(|_| 0.0),
            desired_state: Arc::new(|_| 0.0),
            gamma: 1.0,
            tau2: Tau2::Constant(1.0),
            tau1_rule: Tau1Rule::Coupled,
            length,
            degree,
            singular_point: None,
            singular_depth: 0,
        }
    }

    /// The benchmark on `[0, 1/8]^2`: `f = 0`, `y_d = (x^2 + y^2)^{-1/3}`,
    /// `beta = (1, 1)`, `gamma = 1`, `tau2 = 1`.
    pub fn paper_example(degree: usize) -> Self {
        Self {
            beta: Convection::Constant([1.0, 1.0]),
            source: Arc::new(|_| 0.0),
            desired_state: Arc::new(|x: Point| (x[0] * x[0] + x[1] * x[1]).powf(-1.0 / 3.0)),
            gamma: 1.0,
            tau2: Tau2::Constant(1.0),
            tau1_rule: Tau1Rule::Coupled,
            length: 0.125,
            degree,
            singular_point: Some([0.0, 0.0]),
            singular_depth: DEFAULT_SINGULAR_DEPTH,
        }
    }
}

/// Smooth forward case `y = sin(2 pi x / L) sin(2 pi y / L)` with flux `q = -grad y`.
#[derive(Clone)]
pub struct MmsCase {
    pub beta: [f64; 2],
    pub length: f64,
    pub state: ScalarFn,
    pub flux: VectorFn,
    pub source: ScalarFn,
    pub boundary: ScalarFn,
}

impl MmsCase {
    pub fn new(beta: [f64; 2], length: f64) -> Self {
        let a = 2.0 * PI / length;
        let state: ScalarFn = Arc::new(move |x: Point| (a * x[0]).sin() * (a * x[1]).sin());
        let flux: VectorFn = Arc::new(move |x: Point| {
            [-a * (a * x[0]).cos() * (a * x[1]).sin(), -a * (a * x[0]).sin() * (a * x[1]).cos()]
        });
        let source: ScalarFn = Arc::new(move |x: Point| {
            let (s0, c0) = (a * x[0]).sin_cos();
            let (s1, c1) = (a * x[1]).sin_cos();
            2.0 * a * a * s0 * s1 + beta[0] * a * c0 * s1 + beta[1] * a * s0 * c1
        });
        Self { beta, length, state, flux, source, boundary: Arc::new(|_| 0.0) }
    }

    pub fn problem_data(&self, degree: usize) -> ProblemData {
        ProblemData {
            beta: Convection::Constant(self.beta),
            source: self.source.clone(),
            ..ProblemData::zero(self.length, degree)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Worst value of the checked quantity over the mesh.
    pub worst: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<ConditionCheck>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ConditionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{:<5} {:<40} worst = {:.6e}", if c.passed { "ok" } else { "FAIL" }, c.name, c.worst)?;
        }
        Ok(())
    }
}

pub const CHECK_GAMMA: &str = "gamma > 0";
pub const CHECK_TAU2_POSITIVE: &str = "tau2 > 0";
pub const CHECK_A1: &str = "(A1) tau2 piecewise constant";
pub const CHECK_A2: &str = "(A2) tau1 = tau2 + beta.n";
pub const CHECK_A3: &str = "(A3) min(tau2 + beta.n/2) > 0";
pub const CHECK_TAU1: &str = "min(tau1 - beta.n/2) > 0";
pub const CHECK_DIV_BETA: &str = "div(beta) <= 0";

/// Checks the data against the assumptions of the method on `mesh`.
pub fn validate(data: &ProblemData, mesh: &Mesh) -> ValidationReport {
    let mut checks = vec![ConditionCheck { name: CHECK_GAMMA, passed: data.gamma > 0.0, worst: data.gamma }];

    let per_face_ok = match &data.tau2 {
        Tau2::Constant(_) => true,
        Tau2::PerFace(v) => v.len() == mesh.n_faces(),
    };
    checks.push(ConditionCheck {
        name: CHECK_A1,
        passed: per_face_ok,
        worst: match &data.tau2 {
            Tau2::Constant(_) => 0.0,
            Tau2::PerFace(v) => (v.len() as f64 - mesh.n_faces() as f64).abs(),
        },
    });
    if !per_face_ok {
        return ValidationReport { checks };
    }
    let min_tau2 = (0..mesh.n_faces()).map(|f| data.tau2.on_face(f)).fold(f64::INFINITY, f64::min);
    checks.push(ConditionCheck { name: CHECK_TAU2_POSITIVE, passed: min_tau2 > 0.0, worst: min_tau2 });

    let vol = quadrature_triangle(2 * (data.degree + 2) + 2).expect("supported degree");
    let mut max_div = f64::NEG_INFINITY;
    for e in 0..mesh.n_elements() {
        let map = mesh.element_map(e);
        for (xi, _) in vol.iter() {
            max_div = max_div.max(data.beta.divergence(map.to_physical(*xi)));
        }
    }
    checks.push(ConditionCheck { name: CHECK_DIV_BETA, passed: max_div <= 0.0, worst: max_div });

    let edge = quadrature_edge(2 * (data.degree + 2) + 2).expect("supported degree");
    let (mut min_a3, mut min_tau1, mut max_a2) = (f64::INFINITY, f64::INFINITY, 0.0f64);
    for e in 0..mesh.n_elements() {
        let faces = mesh.element_faces(e);
        for (l, &f) in faces.iter().enumerate() {
            let (n, _) = mesh.local_face_geometry(e, l);
            let (a, b) = mesh.face_endpoints(f);
            let tau2 = data.tau2.on_face(f);
            for (t, _) in edge.iter() {
                let x = [a[0] + t[0] * (b[0] - a[0]), a[1] + t[0] * (b[1] - a[1])];
                let beta = data.beta.at(x);
                let bn = beta[0] * n[0] + beta[1] * n[1];
                let tau1 = data.tau1(tau2, beta, n);
                min_a3 = min_a3.min(tau2 + 0.5 * bn);
                min_tau1 = min_tau1.min(tau1 - 0.5 * bn);
                max_a2 = max_a2.max((tau1 - tau2 - bn).abs());
            }
        }
    }
    checks.push(ConditionCheck { name: CHECK_A2, passed: max_a2 <= 1e-14 * (1.0 + min_tau2.abs()), worst: max_a2 });
    checks.push(ConditionCheck { name: CHECK_A3, passed: min_a3 > 0.0, worst: min_a3 });
    checks.push(ConditionCheck { name: CHECK_TAU1, passed: min_tau1 > 0.0, worst: min_tau1 });
    ValidationReport { checks }
}
