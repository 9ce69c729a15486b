//! Manufactured solutions, error norms and convergence studies.

pub mod config;
pub mod exact;
pub mod infsup;
pub mod norms;
pub mod patch;
pub mod study;

pub use exact::{eval_exact, ExactField, Factor, Field, ManufacturedCase, Term};
pub use norms::{compute_error_norms, ErrorNorms};
pub use config::Settings;
pub use study::{run_convergence_study, ConvergenceReport, MeshPair, Method, StudyConfig};
