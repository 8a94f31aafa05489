//! Error norms, the cost functional, rate tables and convergence studies.

pub mod norms;
pub mod rates;
pub mod study;
pub mod table;

pub use norms::{
    cost_functional, error_quadrature_degree, l2_error_boundary, l2_error_boundary_exact, l2_error_volume,
    l2_error_volume_exact, BoundaryField, VolumeField,
};
pub use rates::{ExpectedRates, PolygonLimit, Regularity};
pub use study::{run_mms, run_study, ProblemKind, StudyConfig};
pub use table::{Column, LevelErrors, RateTable};
