//! Report envelope and emission. One JSON document per run; standard
//! output carries it only when the destination is `-`.

use serde::Serialize;

use semibrick_core::verify::UniverseDescriptor;
use semibrick_core::{TruncationEvent, Verdict};

use crate::config::ConfigEcho;
use crate::CliError;

pub const SCHEMA: &str = "semibrick-lab/report/v1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
pub struct Envelope<'a, P: Serialize> {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: &'a str,
    pub config: &'a ConfigEcho,
    pub universe: Option<&'a UniverseDescriptor>,
    pub verdict: Verdict,
    pub payload: P,
    pub truncation_events: &'a [TruncationEvent],
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'static str,
    message: &'a str,
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    schema: &'static str,
    tool_version: &'static str,
    command: &'a str,
    error: ErrorBody<'a>,
}

pub fn emit(out: &str, doc: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(doc).expect("reports serialize");
    text.push('\n');
    if out == "-" {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(out, text)
            .map_err(|e| CliError::Config(format!("cannot write report to {out}: {e}")))?;
        eprintln!("report written to {out}");
        Ok(())
    }
}

/// Machine-readable failure document for exit codes 2 and 3.
pub fn emit_error(out: &str, command: &str, kind: &'static str, message: &str) {
    let doc = ErrorDoc {
        schema: SCHEMA,
        tool_version: TOOL_VERSION,
        command,
        error: ErrorBody { kind, message },
    };
    // Best effort: an unwritable destination must not mask the error.
    let _ = emit(out, &doc);
}
