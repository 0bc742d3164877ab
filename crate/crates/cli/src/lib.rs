//! CLI plumbing for the stacking engine: CSV ingestion, TOML
//! configuration, report emission, and the subcommand implementations.

pub mod args;
pub mod commands;
pub mod config;
pub mod csv_io;
pub mod report_io;

/// Maps an error chain onto the documented exit codes: 2 for data
/// problems (I/O, parsing, shape, configuration), 3 for numeric
/// failures (singular systems, degenerate or non-finite inputs).
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(core_err) = cause.downcast_ref::<restack_core::Error>() {
            return match core_err {
                restack_core::Error::NonFinite(_)
                | restack_core::Error::Degenerate(_)
                | restack_core::Error::Singular(_) => 3,
                restack_core::Error::Predictor { .. } => 3,
                _ => 2,
            };
        }
    }
    2
}
