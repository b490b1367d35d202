//! Library side of the `gravent` command: configuration, sweeps, reports
//! and output records. `main.rs` only parses flags and writes files.

pub mod commands;
pub mod inputs;
pub mod record;
pub mod sweep;

pub use inputs::{OutputFormat, RunInputs, TauEntMode};
pub use record::{RunRecord, Value};
pub use sweep::SweepSpec;

/// Bad configuration or flags (exit code 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct InvalidInput(pub String);

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_NO_ENTANGLEMENT: u8 = 4;

/// Exit status for a core error.
pub fn core_exit_code(e: &gravent_core::Error) -> u8 {
    use gravent_core::Error as E;
    match e {
        E::InvalidParameter { .. } | E::Unsupported(_) | E::GeometryMismatch(_) | E::SuppressionInvalid { .. } => {
            EXIT_INVALID
        }
        E::NoCrossing { .. } | E::NoEntanglement { .. } => EXIT_NO_ENTANGLEMENT,
        E::Overflow { .. }
        | E::NonConvergence { .. }
        | E::StepSizeUnderflow { .. }
        | E::InvalidState(_)
        | E::Domain { .. } => EXIT_SOLVER,
    }
}

/// Exit status for any failure surfaced by a command.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(core) = e.downcast_ref::<gravent_core::Error>() {
        core_exit_code(core)
    } else {
        EXIT_INVALID
    }
}
