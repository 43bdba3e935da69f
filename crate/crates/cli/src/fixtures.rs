//! The shipped table of unresolved prime-power-order arrays and the
//! literature annotations used when screening it.

use cosetcr_core::screen::{Annotation, AnnotationStatus};
use cosetcr_core::IntersectionArray;
use serde::Deserialize;

use crate::formats::parse_array;
use crate::CliError;

pub const BCN14: &str = include_str!("../data/bcn14.json");
pub const ANNOTATIONS: &str = include_str!("../data/annotations.json");

#[derive(Deserialize)]
struct Entry {
    array: String,
    v: u64,
}

#[derive(Deserialize)]
struct AnnotationEntry {
    array: String,
    status: String,
    citation: String,
}

/// Arrays with their tabulated orders.
pub fn parse_table(text: &str) -> Result<Vec<(IntersectionArray, u64)>, CliError> {
    let entries: Vec<Entry> = serde_json::from_str(text).map_err(|e| CliError::Input(format!("fixture table: {e}")))?;
    entries.into_iter().map(|e| Ok((parse_array(&e.array)?, e.v))).collect()
}

/// JSON list of `{array, status, citation}`; status is `exists` or `nonexistent`.
pub fn parse_annotations(text: &str) -> Result<Vec<Annotation>, CliError> {
    let entries: Vec<AnnotationEntry> =
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("annotation file: {e}")))?;
    entries
        .into_iter()
        .map(|e| {
            let status = match e.status.as_str() {
                "exists" => AnnotationStatus::Exists,
                "nonexistent" => AnnotationStatus::Nonexistent,
                other => return Err(CliError::Input(format!("unknown annotation status {other:?}"))),
            };
            Ok(Annotation { array: parse_array(&e.array)?, status, citation: e.citation })
        })
        .collect()
}

pub fn bcn14() -> Vec<(IntersectionArray, u64)> {
    parse_table(BCN14).expect("shipped table parses")
}

pub fn default_annotations() -> Vec<Annotation> {
    parse_annotations(ANNOTATIONS).expect("shipped annotations parse")
}
