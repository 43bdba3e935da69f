//! The report envelope: command echo, input digest, payload, tool version.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "cosetcr";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub input_sha256: String,
    pub result: Value,
    /// Process exit code; not part of the JSON.
    #[serde(skip)]
    pub exit_code: i32,
    /// Human-readable rendering printed instead of the JSON.
    #[serde(skip)]
    pub text: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Report {
    pub fn new(command: Vec<String>, input: &[u8], result: Value) -> Self {
        Self { tool: TOOL, version: VERSION, command, input_sha256: sha256_hex(input), result, exit_code: 0, text: None }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
