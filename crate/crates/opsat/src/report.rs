//! Machine-readable reports for the command-line front end.
//!
//! Reports are versioned JSON documents with a fixed envelope: `schema`,
//! `command`, `verdict`, and a command-specific `detail` object. Every
//! numeric quantity is an exact fraction string (`p/q`), never a decimal,
//! and nothing time- or host-dependent enters the body, so identical inputs
//! produce byte-identical reports.

use serde::Serialize;

/// Identifier of the current report schema.
pub const SCHEMA: &str = "opsat-report/1";

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    command: &'a str,
    verdict: &'a str,
    detail: serde_json::Value,
}

/// Render a report document.
pub fn render(command: &str, verdict: &str, detail: serde_json::Value) -> String {
    let env = Envelope {
        schema: SCHEMA,
        command,
        verdict,
        detail,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("serialization cannot fail");
    s.push('\n');
    s
}

/// Render an error report (used by the CLI on input failures).
pub fn render_error(command: &str, error: &crate::error::Error) -> String {
    render(
        command,
        "error",
        serde_json::json!({ "message": error.to_string(), "exit_code": error.exit_code() }),
    )
}
