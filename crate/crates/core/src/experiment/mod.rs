//! Body generators, batch experiments, reports and certificate replay.

pub mod certificate;
pub mod config;
pub mod generators;
pub mod runner;

pub use certificate::{check_certificate, check_certificate_str, Certificate, CheckResult, CoverCert, LowerCert};
pub use config::{load_body, BodySource, Budgets, ExperimentConfig, Format, NamedBody, Output, Query, Tolerances};
pub use generators::{cross_polytope, cube, generate_body, random_hull, regular_polygon, simplex, GeneratorSpec};
pub use runner::{best_sandwich, run_experiment, Record, Report, Scalars, Status, VERSION};
