//! Sandwich covariance, Wald tests and multiplicity-adjusted p-values for a
//! fitted FVBM.

mod fdr;
mod normal;

pub use fdr::{fdr_adjust, FdrMethod};
pub use normal::{normal_cdf, normal_sf, two_sided_p_value};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mple::FitResult;
use crate::params::{FlatLayout, FvbmParams, SpinMatrix};
use crate::pseudolikelihood::{observation_scores, pseudo_hessian};

/// Condition number above which `Ĩ1` is treated as singular.
pub const MAX_CONDITION_NUMBER: f64 = 1e12;

/// `Ĩ1(θ) = −n⁻¹ Σ_i ∂² log PL_i / ∂θ∂θᵀ`.
pub fn empirical_info_1(params: &FvbmParams, data: &SpinMatrix) -> Result<DMatrix<f64>> {
    let hessian = pseudo_hessian(params, data)?;
    Ok(hessian.matrix / -(data.nrows() as f64))
}

/// `Ĩ2(θ) = n⁻¹ Σ_i s_i s_iᵀ` with `s_i` the total pseudo-score of row `i`.
pub fn empirical_info_2(params: &FvbmParams, data: &SpinMatrix) -> Result<DMatrix<f64>> {
    let scores = observation_scores(params, data)?;
    let p = params.layout().len();
    let mut gram = DMatrix::zeros(p, p);
    for s in &scores {
        for r in 0..p {
            if s[r] == 0.0 {
                continue;
            }
            for c in 0..p {
                gram[(r, c)] += s[r] * s[c];
            }
        }
    }
    Ok(gram / data.nrows() as f64)
}

/// `n⁻¹ Ĩ1⁻¹ Ĩ2 Ĩ1⁻¹` over the flat layout.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichCovariance {
    pub matrix: DMatrix<f64>,
}

impl SandwichCovariance {
    pub fn standard_errors(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|v| v.max(0.0).sqrt()).collect()
    }
}

/// Inverse of a symmetric positive definite matrix, refusing ill-conditioned input.
fn guarded_inverse(matrix: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eigen = matrix.clone().symmetric_eigen();
    let (mut min_index, mut min, mut max) = (0, f64::INFINITY, 0.0f64);
    for (i, &v) in eigen.eigenvalues.iter().enumerate() {
        if v < min {
            min = v;
            min_index = i;
        }
        max = max.max(v.abs());
    }
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION_NUMBER) {
        let vector = eigen.eigenvectors.column(min_index);
        let mut coordinates: Vec<usize> = (0..vector.len()).filter(|&i| vector[i].abs() >= 0.1).collect();
        coordinates.sort_by(|&a, &b| vector[b].abs().total_cmp(&vector[a].abs()));
        return Err(Error::IllConditioned { condition, coordinates });
    }
    let cholesky = matrix.clone().cholesky().ok_or(Error::IllConditioned {
        condition,
        coordinates: Vec::new(),
    })?;
    Ok(cholesky.inverse())
}

pub fn sandwich(params: &FvbmParams, data: &SpinMatrix) -> Result<SandwichCovariance> {
    let bread = empirical_info_1(params, data)?;
    let meat = empirical_info_2(params, data)?;
    let inverse = guarded_inverse(&bread)?;
    let product = &inverse * meat * &inverse / data.nrows() as f64;
    let symmetric = (&product + product.transpose()) * 0.5;
    Ok(SandwichCovariance { matrix: symmetric })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaldTest {
    pub z_scores: Vec<f64>,
    pub p_values: Vec<f64>,
}

/// `Z_k = (θ̂_k − θ0_k)/se_k` with two-sided normal p-values.
pub fn wald_test(estimates: &[f64], standard_errors: &[f64], null_values: &[f64]) -> Result<WaldTest> {
    let m = estimates.len();
    for len in [standard_errors.len(), null_values.len()] {
        if len != m {
            return Err(Error::DimensionMismatch { expected: m, found: len });
        }
    }
    if let Some(index) = standard_errors.iter().position(|se| !(*se > 0.0)) {
        return Err(Error::NonPositiveStandardError { index, value: standard_errors[index] });
    }
    let z_scores: Vec<f64> = estimates
        .iter()
        .zip(standard_errors)
        .zip(null_values)
        .map(|((est, se), null)| (est - null) / se)
        .collect();
    let p_values = z_scores.iter().map(|&z| two_sided_p_value(z)).collect();
    Ok(WaldTest { z_scores, p_values })
}

/// Families of hypotheses that are adjusted independently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdjustmentGroups {
    /// Biases and interactions as two separate families.
    Subtables,
    /// One family over every coordinate.
    Single,
    Custom(Vec<Vec<usize>>),
}

impl AdjustmentGroups {
    pub fn partition(&self, layout: FlatLayout) -> Result<Vec<Vec<usize>>> {
        let groups = match self {
            AdjustmentGroups::Subtables => {
                let mut groups = vec![layout.bias_indices()];
                if layout.dim() > 1 {
                    groups.push(layout.interaction_indices());
                }
                groups
            }
            AdjustmentGroups::Single => vec![(0..layout.len()).collect()],
            AdjustmentGroups::Custom(groups) => groups.clone(),
        };
        let mut seen = vec![false; layout.len()];
        for &i in groups.iter().flatten() {
            if i >= layout.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Config(format!("adjustment groups do not partition the layout (index {i})")));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config("adjustment groups leave coordinates uncovered".into()));
        }
        Ok(groups)
    }
}

impl std::str::FromStr for AdjustmentGroups {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "subtables" => Ok(AdjustmentGroups::Subtables),
            "single" => Ok(AdjustmentGroups::Single),
            other => Err(Error::Config(format!("unknown grouping {other:?}; expected subtables or single"))),
        }
    }
}

/// Adjust each group of `p_values` separately.
pub fn grouped_fdr_adjust(p_values: &[f64], groups: &[Vec<usize>], method: FdrMethod) -> Result<Vec<f64>> {
    let mut adjusted = vec![f64::NAN; p_values.len()];
    for group in groups {
        let subset: Vec<f64> = group.iter().map(|&i| p_values[i]).collect();
        for (&i, a) in group.iter().zip(fdr_adjust(&subset, method)?) {
            adjusted[i] = a;
        }
    }
    Ok(adjusted)
}

/// Estimates, standard errors, Wald statistics and adjusted p-values keyed to
/// the flat layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceReport {
    pub d: usize,
    #[serde(serialize_with = "crate::json::serialize_f64_slice")]
    pub estimates: Vec<f64>,
    #[serde(serialize_with = "crate::json::serialize_f64_slice")]
    pub standard_errors: Vec<f64>,
    #[serde(serialize_with = "crate::json::serialize_f64_slice")]
    pub z_scores: Vec<f64>,
    #[serde(serialize_with = "crate::json::serialize_f64_slice")]
    pub p_values: Vec<f64>,
    #[serde(serialize_with = "crate::json::serialize_f64_slice")]
    pub adjusted_p_values: Vec<f64>,
    pub adjustment_groups: Vec<Vec<usize>>,
    pub method: FdrMethod,
}

impl InferenceReport {
    pub fn layout(&self) -> FlatLayout {
        FlatLayout::new(self.d)
    }

    /// Assemble a report from published or externally computed columns.
    pub fn from_tests(
        d: usize,
        estimates: Vec<f64>,
        standard_errors: Vec<f64>,
        groups: &AdjustmentGroups,
        method: FdrMethod,
    ) -> Result<Self> {
        let layout = FlatLayout::new(d);
        if estimates.len() != layout.len() {
            return Err(Error::DimensionMismatch { expected: layout.len(), found: estimates.len() });
        }
        let nulls = vec![0.0; estimates.len()];
        let test = wald_test(&estimates, &standard_errors, &nulls)?;
        let adjustment_groups = groups.partition(layout)?;
        let adjusted_p_values = grouped_fdr_adjust(&test.p_values, &adjustment_groups, method)?;
        Ok(Self {
            d,
            estimates,
            standard_errors,
            z_scores: test.z_scores,
            p_values: test.p_values,
            adjusted_p_values,
            adjustment_groups,
            method,
        })
    }

    /// Plain-text rendering: sub-table A holds the bias row, sub-table B the
    /// interaction lower triangle.
    pub fn to_text(&self, labels: &[String]) -> String {
        let layout = self.layout();
        let names: Vec<String> = (0..self.d)
            .map(|j| labels.get(j).cloned().unwrap_or_else(|| format!("X{}", j + 1)))
            .collect();
        let sections: [(&str, &[f64], fn(f64) -> String); 4] = [
            ("Estimates", &self.estimates, |v| format!("{v:.3}")),
            ("Standard errors", &self.standard_errors, |v| format!("{v:.3}")),
            ("p-values", &self.p_values, |v| format!("{v:.2E}")),
            ("Adjusted p-values", &self.adjusted_p_values, |v| format!("{v:.2E}")),
        ];
        let width = names.iter().map(String::len).max().unwrap_or(0).max(9) + 2;
        let mut out = String::new();
        for (title, values, fmt) in sections {
            out.push_str(&format!("{title}\nA\n{:<width$}", "Party"));
            for name in &names {
                out.push_str(&format!("{name:>width$}"));
            }
            out.push_str(&format!("\n{:<width$}", "Bias"));
            for j in 0..self.d {
                out.push_str(&format!("{:>width$}", fmt(values[layout.bias_index(j)])));
            }
            out.push_str(&format!("\nB\n{:<width$}", "Party"));
            for name in names.iter().take(self.d.saturating_sub(1)) {
                out.push_str(&format!("{name:>width$}"));
            }
            out.push('\n');
            for k in 1..self.d {
                out.push_str(&format!("{:<width$}", names[k]));
                for j in 0..k {
                    out.push_str(&format!("{:>width$}", fmt(values[layout.pair_index(j, k)])));
                }
                out.push('\n');
            }
            out.push('\n');
        }
        out
    }
}

/// Standard errors, Wald tests against zero, and grouped FDR adjustment for a fit.
pub fn build_report(
    fit: &FitResult,
    data: &SpinMatrix,
    groups: &AdjustmentGroups,
    method: FdrMethod,
) -> Result<InferenceReport> {
    let covariance = sandwich(&fit.params, data)?;
    InferenceReport::from_tests(
        fit.params.dim(),
        fit.params.to_flat(),
        covariance.standard_errors(),
        groups,
        method,
    )
}
