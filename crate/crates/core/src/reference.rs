//! Published reference values shipped with the crate, keyed by
//! table/row/column.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceKind {
    /// Exact classical bound.
    Local,
    /// k-producible quantum bound.
    Producible,
    /// Quantum maximum over all states.
    Tsirelson,
    /// Closed-form value of the γ-witness.
    Analytic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    pub table: String,
    pub row: String,
    pub column: String,
    pub value: f64,
    /// The value as printed, e.g. `2*sqrt(2)+1`.
    pub expr: String,
    pub kind: ReferenceKind,
    /// Whether the published value is known to be attained. Untight entries
    /// are only upper bounds.
    pub tight: bool,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub n: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct ReferenceFile {
    gamma_table3: f64,
    entries: Vec<ReferenceEntry>,
}

fn file() -> &'static ReferenceFile {
    static FILE: OnceLock<ReferenceFile> = OnceLock::new();
    FILE.get_or_init(|| {
        serde_json::from_str(include_str!("../data/reference_values.json"))
            .expect("bundled reference_values.json is valid")
    })
}

pub fn entries() -> &'static [ReferenceEntry] {
    &file().entries
}

pub fn table(name: &str) -> impl Iterator<Item = &'static ReferenceEntry> + '_ {
    entries().iter().filter(move |e| e.table == name)
}

pub fn lookup(table: &str, row: &str, column: &str) -> Option<&'static ReferenceEntry> {
    entries()
        .iter()
        .find(|e| e.table == table && e.row == row && e.column == column)
}

/// γ at which the closed-form witness values are tabulated.
pub fn analytic_gamma() -> f64 {
    file().gamma_table3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loads_and_indexes() {
        assert!(entries().len() > 60);
        let e = lookup("table1", "RG4", "2-prod").unwrap();
        assert!((e.value - (2.0 * 2f64.sqrt() + 1.0)).abs() < 1e-12);
        assert!(e.tight);
        assert_eq!(table("table3").count(), 8);
        assert_eq!(analytic_gamma(), 2.0);
    }

    #[test]
    fn printed_expressions_agree_with_values() {
        for e in entries().iter().filter(|e| e.kind != ReferenceKind::Analytic) {
            if let Ok(v) = e.expr.parse::<f64>() {
                assert_eq!(v, e.value, "{}/{}/{}", e.table, e.row, e.column);
            }
        }
    }
}
