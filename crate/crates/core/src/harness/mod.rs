//! Experiment configs, records, fits and plots.

pub mod config;
pub mod fit;
pub mod plot;
pub mod record;
pub mod run;

pub use config::{ExperimentConfig, ExperimentKind, Family};
pub use fit::{fit_exponent, Fit};
pub use plot::{emit_plot, Axes, Series};
pub use record::{read_csv, write_csv, write_csv_file, ExperimentRecord, CSV_HEADER};
pub use run::{run, write_outputs, RunOutput, Summary};
