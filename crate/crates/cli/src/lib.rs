//! Command-line front end and review service for schemamatch.

pub mod args;
pub mod commands;
pub mod inputs;
pub mod review;
pub mod service;
pub mod settings;

/// Process exit status for a failed command.
///
/// Transport failures get 3, other engine errors 2, anything else 1.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<schemamatch::Error>() {
        Some(schemamatch::Error::Transport(_)) => 3,
        Some(schemamatch::Error::Io { .. }) => 1,
        Some(_) => 2,
        None => 1,
    }
}
