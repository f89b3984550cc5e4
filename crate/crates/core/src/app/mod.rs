//! Command-line front end, configuration files and output writers.

pub mod cli;
pub mod config;
pub mod output;
pub mod run;
pub mod scenario;

pub use cli::cli;
pub use config::{parse_config, parse_config_str, SimulationConfig};
pub use output::{write_isochrones_csv, write_vtk, IsochroneRecord};
pub use run::{run_config, RunSummary};
