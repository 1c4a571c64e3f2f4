//! Configuration, sweeps, figure presets and CSV output for `dimdot`.

pub mod config;
pub mod presets;
pub mod sweep;

pub use config::{parse_config, ConfigError, RunConfig, Series, Splitting, Sweep, Temperatures, Var};
pub use presets::{figure_config, FigureId, UnknownFigure};
pub use sweep::{render_csv, run_sweep, Column, ResultRow, Status};
