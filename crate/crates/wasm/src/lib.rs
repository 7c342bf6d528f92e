//! Browser bindings for `fvbm`.
//!
//! Every export takes and returns strings (JSON or CSV) so the page needs no
//! generated type glue; errors are thrown as plain messages.

use fvbm::exact::{log_normalization_constant, sample};
use fvbm::graph::{build_network, emit_dot, NetworkSpec};
use fvbm::{
    build_report, enumerate_pmf, fit, AdjustmentGroups, FdrMethod, FitConfig, FitResult, FvbmParams,
    InferenceReport, SpinMatrix, SpinVector,
};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// States listed by [`explore`].
pub const TOP_STATES: usize = 10;
/// Largest sample [`simulate`] will draw.
pub const MAX_SAMPLE: usize = 100_000;

#[derive(Deserialize)]
#[serde(untagged)]
enum ParamsInput {
    Wrapped { labels: Option<Vec<String>>, params: FvbmParams },
    Bare(FvbmParams),
}

fn parse_params(json: &str) -> Result<(FvbmParams, Vec<String>), String> {
    let input: ParamsInput = serde_json::from_str(json).map_err(|e| format!("parameters: {e}"))?;
    let (params, labels) = match input {
        ParamsInput::Wrapped { labels, params } => (params, labels),
        ParamsInput::Bare(params) => (params, None),
    };
    let labels = labels.unwrap_or_else(|| (1..=params.dim()).map(|j| format!("X{j}")).collect());
    if labels.len() != params.dim() {
        return Err(format!("{} labels for {} variables", labels.len(), params.dim()));
    }
    Ok((params, labels))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct State {
    pub spins: Vec<i8>,
    pub probability: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Exploration {
    pub labels: Vec<String>,
    pub log_normalization_constant: f64,
    pub marginals: Vec<f64>,
    /// `P(X_j = X_k)`, with ones on the diagonal.
    pub concordance: Vec<Vec<f64>>,
    pub top_states: Vec<State>,
}

/// Exact marginals, pairwise concordance and the most probable states.
#[wasm_bindgen]
pub fn explore(params_json: &str) -> Result<String, String> {
    let (params, labels) = parse_params(params_json)?;
    let d = params.dim();
    let table = enumerate_pmf(&params).map_err(|e| e.to_string())?;
    let mut concordance = vec![vec![1.0; d]; d];
    for j in 0..d {
        for k in j + 1..d {
            let c = table.pairwise_joint(j, k).map_err(|e| e.to_string())?.concordance();
            concordance[j][k] = c;
            concordance[k][j] = c;
        }
    }
    let mut order: Vec<usize> = (0..table.probabilities().len()).collect();
    order.sort_by(|&a, &b| table.probabilities()[b].total_cmp(&table.probabilities()[a]));
    let top_states = order
        .into_iter()
        .take(TOP_STATES)
        .map(|index| State {
            spins: SpinVector::from_state_index(index, d).as_slice().to_vec(),
            probability: table.probabilities()[index],
        })
        .collect();
    to_json(&Exploration {
        log_normalization_constant: log_normalization_constant(&params).map_err(|e| e.to_string())?,
        marginals: table.marginals(),
        labels,
        concordance,
        top_states,
    })
}

/// Exact draws from the model as a `±1` CSV with a header row.
#[wasm_bindgen]
pub fn simulate(params_json: &str, n: usize, seed: u32) -> Result<String, String> {
    if n > MAX_SAMPLE {
        return Err(format!("sample size is limited to {MAX_SAMPLE}"));
    }
    let (params, labels) = parse_params(params_json)?;
    let data = sample(&params, n, u64::from(seed)).map_err(|e| e.to_string())?;
    data.to_csv(&labels).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Analysis {
    pub labels: Vec<String>,
    pub fit: FitResult,
    pub report: InferenceReport,
    pub network: NetworkSpec,
    pub dot: String,
    pub tables: String,
}

/// Fit a `±1` CSV, test every coordinate and build the significance network.
///
/// `fdr` is `by` or `bh`, `mode` is `raw` or `fdr`; biases and interactions
/// are adjusted as separate families.
#[wasm_bindgen]
pub fn analyze(csv: &str, fdr: &str, mode: &str, level: f64) -> Result<String, String> {
    let method: FdrMethod = fdr.parse().map_err(|e: fvbm::Error| e.to_string())?;
    let mode = mode.parse().map_err(|e: fvbm::Error| e.to_string())?;
    if !(level > 0.0 && level < 1.0) {
        return Err("level must lie in (0, 1)".into());
    }
    let (data, labels) = SpinMatrix::from_csv(csv.as_bytes()).map_err(|e| e.to_string())?;
    if data.is_empty() {
        return Err("no observations".into());
    }
    let result = fit(&data, &FitConfig::default()).map_err(|e| e.to_string())?;
    if !result.degenerate_columns.is_empty() {
        let names: Vec<&str> = result.degenerate_columns.iter().map(|&j| labels[j].as_str()).collect();
        return Err(format!("columns never change sign: {}", names.join(", ")));
    }
    let report =
        build_report(&result, &data, &AdjustmentGroups::Subtables, method).map_err(|e| e.to_string())?;
    let network = build_network(&report, &labels, mode, level).map_err(|e| e.to_string())?;
    to_json(&Analysis {
        dot: emit_dot(&network),
        tables: report.to_text(&labels),
        labels,
        fit: result,
        report,
        network,
    })
}
