//! Configuration, run orchestration, checkpoints, the diagnostics table and
//! plot scripts.

mod checkpoint;
mod config;
mod plot;
mod run;
mod table;

pub use checkpoint::{Checkpoint, ParamBlock, FORMAT_VERSION, MAGIC};
pub use config::{parse_real, ConfinementMode, OutputConfig, RunConfig};
pub use plot::write_plot_scripts;
pub use run::{
    checkpoint_name, prepare, resume, simulate, ConfinementSummary, RunOutcome, RunSummary, Setup,
    CONFIG_ECHO, CSV_NAME, FINAL_CHECKPOINT, SUMMARY_NAME,
};
pub use table::{columns, CsvSink, CsvTable, SCHEMA};
