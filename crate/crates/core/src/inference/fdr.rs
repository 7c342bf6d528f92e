//! Step-up false discovery rate adjustment with `p.adjust` semantics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdrMethod {
    /// Benjamini–Hochberg.
    #[serde(rename = "bh")]
    BenjaminiHochberg,
    /// Benjamini–Yekutieli, valid under arbitrary dependence.
    #[serde(rename = "by")]
    BenjaminiYekutieli,
}

impl FdrMethod {
    /// Dependence correction `c(m)`: `Σ_{k≤m} 1/k` for BY, 1 for BH.
    pub fn correction(self, m: usize) -> f64 {
        match self {
            FdrMethod::BenjaminiHochberg => 1.0,
            FdrMethod::BenjaminiYekutieli => (1..=m).map(|k| 1.0 / k as f64).sum(),
        }
    }
}

impl std::str::FromStr for FdrMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bh" => Ok(FdrMethod::BenjaminiHochberg),
            "by" => Ok(FdrMethod::BenjaminiYekutieli),
            other => Err(Error::Config(format!("unknown FDR method {other:?}; expected bh or by"))),
        }
    }
}

/// Adjusted p-values `min(1, min_{j≥i} c(m)·m·p_(j)/j)` in the input order.
pub fn fdr_adjust(p_values: &[f64], method: FdrMethod) -> Result<Vec<f64>> {
    if let Some(index) = p_values.iter().position(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::PValueOutOfRange { index, value: p_values[index] });
    }
    let m = p_values.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let scale = method.correction(m) * m as f64;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p_values[a].total_cmp(&p_values[b]).then(a.cmp(&b)));

    let mut adjusted = vec![0.0; m];
    let mut running = f64::INFINITY;
    for rank in (0..m).rev() {
        let index = order[rank];
        // multiplier first, as in R, so that it is never below one
        running = running.min(scale / (rank + 1) as f64 * p_values[index]);
        adjusted[index] = running.min(1.0);
    }
    Ok(adjusted)
}
