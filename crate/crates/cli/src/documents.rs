//! JSON files passed between subcommands.

use std::path::Path;

use fvbm::graph::NetworkSpec;
use fvbm::{FitResult, FvbmParams, InferenceReport, PairwiseJoint};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
pub struct FitDocument {
    pub schema_version: u32,
    pub labels: Vec<String>,
    pub fit: FitResult,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub labels: Vec<String>,
    pub report: InferenceReport,
}

#[derive(Debug, Serialize)]
pub struct ProbsDocument {
    pub schema_version: u32,
    pub labels: Vec<String>,
    pub log_normalization_constant: f64,
    pub marginals: Vec<f64>,
    pub pairs: Vec<PairDocument>,
}

#[derive(Debug, Serialize)]
pub struct PairDocument {
    pub first: String,
    pub second: String,
    #[serde(flatten)]
    pub joint: PairwiseJoint,
    pub concordance: f64,
}

#[derive(Debug, Serialize)]
pub struct GraphDocument<'a> {
    pub schema_version: u32,
    pub network: &'a NetworkSpec,
}

/// Anything that carries parameters: a fit, a `{labels, params}` wrapper or
/// bare parameters.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ParamsSource {
    Fit(FitDocument),
    Wrapped { labels: Option<Vec<String>>, params: FvbmParams },
    Bare(FvbmParams),
}

pub fn default_labels(d: usize) -> Vec<String> {
    (1..=d).map(|j| format!("X{j}")).collect()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

pub fn read_params(path: &Path) -> Result<(FvbmParams, Vec<String>), CliError> {
    check_schema(path)?;
    let (params, labels) = match read_json::<ParamsSource>(path)? {
        ParamsSource::Fit(doc) => (doc.fit.params, Some(doc.labels)),
        ParamsSource::Wrapped { labels, params } => (params, labels),
        ParamsSource::Bare(params) => (params, None),
    };
    let labels = labels.unwrap_or_else(|| default_labels(params.dim()));
    if labels.len() != params.dim() {
        return Err(CliError::Data(format!(
            "{}: {} labels for {} coordinates",
            path.display(),
            labels.len(),
            params.dim()
        )));
    }
    Ok((params, labels))
}

/// Reject files written by an incompatible version.
pub fn check_schema(path: &Path) -> Result<(), CliError> {
    let value: serde_json::Value = read_json(path)?;
    match value.get("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v != SCHEMA_VERSION as u64 => Err(CliError::Data(format!(
            "{}: schema_version {v} is not supported (expected {SCHEMA_VERSION})",
            path.display()
        ))),
        _ => Ok(()),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    text.push('\n');
    Ok(text)
}
