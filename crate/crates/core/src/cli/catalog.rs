//! Curves bundled with the binary.

use super::document::CurveDocument;
use crate::error::{Error, Result};

const CATALOG: &str = include_str!("../../data/catalog.json");

/// Every bundled document, in file order.
pub fn entries() -> Vec<CurveDocument> {
    let v: serde_json::Value = serde_json::from_str(CATALOG).expect("bundled catalog is valid JSON");
    v.as_array().expect("bundled catalog is a list").iter().map(|d| CurveDocument::from_value(d).expect("bundled catalog documents validate")).collect()
}

pub fn names() -> Vec<String> {
    entries().into_iter().filter_map(|d| d.name).collect()
}

pub fn lookup(name: &str) -> Result<CurveDocument> {
    entries()
        .into_iter()
        .find(|d| d.name.as_deref() == Some(name))
        .ok_or_else(|| Error::Input(format!("no catalog entry {name:?}; known: {}", names().join(", "))))
}
