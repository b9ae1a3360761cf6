//! Scenario generators, the conditioning and geometry tables, error
//! sweeps, CSV and model file I/O, and the `gmiv` command line tool.

pub mod cli;
pub mod config;
pub mod csvio;
pub mod model_io;
pub mod rng;
pub mod scenarios;
pub mod sweep;
pub mod tables;

pub use config::{parse_methods, ExperimentConfig, Method, Scenario};
pub use scenarios::{gen_helmholtz, gen_transcendental, HelmholtzProblem, TranscendentalCurve};
pub use sweep::{run_error_sweep, ErrorRecord, SweepResult};
pub use tables::{run_conditioning_table, run_geometry_table, ConditioningRow, GeometryRow, GeometryTable};
