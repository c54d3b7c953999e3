//! Test drivers shared by the CLI and the acceptance suite.

pub mod config;
pub mod convergence;
pub mod manufactured;
pub mod suite;
pub mod zoo;

pub use config::RunConfig;
pub use convergence::{observed_rate, run_convergence, ConvergenceRow, ConvergenceStudy, CsvTable, RateCheck};
pub use manufactured::{ManufacturedSolution, SinPower, TrigSeries};
pub use suite::{check_cell, check_element, patch_test, random_polynomial, CellCheck, PatchReport};
pub use zoo::polygon_zoo;
