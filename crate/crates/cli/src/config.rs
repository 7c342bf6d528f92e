//! Optional TOML settings file. Values given on the command line win over the
//! file, and the file wins over built-in defaults.
//!
//! ```toml
//! [prepare]
//! reference = "LNP"
//! k = 3
//! drop_threshold = 0.5
//! extract_member = "Culleton"
//! member_label = "CULL"
//!
//! [fit]
//! tol = 1e-8
//! step_tol = 1e-10
//! max_iter = 1000
//! init = "zeros"        # or a path to a params/fit JSON file
//! strict = false
//!
//! [infer]
//! fdr = "by"            # or "bh"
//! groups = "subtables"  # or "single"
//!
//! [graph]
//! mode = "raw"          # or "fdr"
//! level = 0.05
//!
//! [simulate]
//! seed = 0
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub prepare: PrepareSection,
    #[serde(default)]
    pub fit: FitSection,
    #[serde(default)]
    pub infer: InferSection,
    #[serde(default)]
    pub graph: GraphSection,
    #[serde(default)]
    pub simulate: SimulateSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepareSection {
    pub reference: Option<String>,
    pub k: Option<usize>,
    pub drop_threshold: Option<f64>,
    pub extract_member: Option<String>,
    pub member_label: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    pub tol: Option<f64>,
    pub step_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub init: Option<String>,
    pub strict: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InferSection {
    pub fdr: Option<String>,
    pub groups: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    pub mode: Option<String>,
    pub level: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}
