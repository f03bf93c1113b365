use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::certify::Mode;
use crate::error::{CertError, Result};
use crate::types::{CertificateOutcome, LossKind};

/// Run settings recorded as the first element of `results.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsHeader {
    pub mode: Mode,
    #[serde(rename = "Np")]
    pub partitions: usize,
    pub loss: LossKind,
    #[serde(rename = "C")]
    pub c: f64,
    pub lambda: f64,
    pub kernel: String,
}

/// Serializes `[header, outcome, outcome, ...]`.
pub fn results_json(header: &ResultsHeader, outcomes: &[CertificateOutcome]) -> String {
    let mut items = Vec::with_capacity(outcomes.len() + 1);
    items.push(serde_json::to_value(header).expect("header serializes"));
    items.extend(
        outcomes
            .iter()
            .map(|o| serde_json::to_value(o).expect("outcome serializes")),
    );
    serde_json::to_string_pretty(&Value::Array(items)).expect("array serializes") + "\n"
}

pub fn write_results(path: &Path, header: &ResultsHeader, outcomes: &[CertificateOutcome]) -> Result<()> {
    fs::write(path, results_json(header, outcomes)).map_err(|source| CertError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_results(path: &Path) -> Result<(ResultsHeader, Vec<CertificateOutcome>)> {
    let parse_err = |message: String| CertError::Parse {
        path: path.to_path_buf(),
        message,
    };
    let bytes = fs::read(path).map_err(|source| CertError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let items: Vec<Value> = serde_json::from_slice(&bytes).map_err(|e| parse_err(e.to_string()))?;
    let mut items = items.into_iter();
    let header = items.next().ok_or_else(|| parse_err("missing header object".into()))?;
    let header: ResultsHeader = serde_json::from_value(header).map_err(|e| parse_err(format!("header: {e}")))?;
    let outcomes = items
        .map(|v| serde_json::from_value(v).map_err(|e| parse_err(format!("record: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((header, outcomes))
}
