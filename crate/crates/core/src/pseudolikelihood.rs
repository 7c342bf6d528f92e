//! Log-pseudolikelihood of the FVBM and its derivatives over the flat
//! parameter layout.
//!
//! With activation `a_j = m_jᵀx + b_j`, each conditional term is
//! `log σ(2 x_j a_j)`. Its derivative in `a_j` is `x_j − tanh(a_j)` and its
//! curvature is `−sech²(a_j)`. Because `a_j` is linear in θ with gradient
//! `v_j = e_{b_j} + Σ_{k≠j} x_k e_{m_jk}`, the score is `Σ_j (x_j − tanh a_j) v_j`
//! and the Hessian is `−Σ_j sech²(a_j) v_j v_jᵀ`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::params::{check_spins, FvbmParams, SpinMatrix};

/// Gradient of the log-pseudolikelihood over the flat layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoScore {
    pub gradient: Vec<f64>,
}

impl PseudoScore {
    pub fn max_abs(&self) -> f64 {
        self.gradient.iter().fold(0.0, |m, g| m.max(g.abs()))
    }
}

/// Second derivatives of the log-pseudolikelihood over the flat layout.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoHessian {
    pub matrix: DMatrix<f64>,
}

/// `log σ(t)` without overflow.
pub(crate) fn log_sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        -(-t).exp().ln_1p()
    } else {
        t - t.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// `a_j = m_jᵀx + b_j` for one observation.
pub(crate) fn activation(params: &FvbmParams, x: &[i8], j: usize) -> f64 {
    let column = params.interaction_column(j);
    let mut a = params.bias()[j];
    for (m, &xk) in column.iter().zip(x) {
        a += m * f64::from(xk);
    }
    a
}

fn check_data(params: &FvbmParams, data: &SpinMatrix) -> Result<()> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if data.ncols() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: data.ncols() });
    }
    Ok(())
}

/// `f(x_j | x_(j); θ)` for the observed value of `x_j`.
pub fn conditional_pmf(params: &FvbmParams, x: &[i8], j: usize) -> Result<f64> {
    if x.len() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: x.len() });
    }
    check_spins(x)?;
    if j >= params.dim() {
        return Err(Error::IndexOutOfRange { index: j, d: params.dim() });
    }
    Ok(sigmoid(2.0 * f64::from(x[j]) * activation(params, x, j)))
}

pub(crate) fn row_log_pseudolikelihood(params: &FvbmParams, x: &[i8]) -> f64 {
    (0..params.dim()).map(|j| log_sigmoid(2.0 * f64::from(x[j]) * activation(params, x, j))).sum()
}

/// `p_n(θ) = Σ_i Σ_j log f(x_ij | x_i(j); θ)`.
pub fn log_pseudolikelihood(params: &FvbmParams, data: &SpinMatrix) -> Result<f64> {
    check_data(params, data)?;
    Ok(data.rows().map(|x| row_log_pseudolikelihood(params, x)).sum())
}

/// Score of a single observation, `s_i = Σ_j ∂ log f(x_ij | x_i(j)) / ∂θ`.
pub(crate) fn row_score(params: &FvbmParams, x: &[i8], out: &mut [f64]) {
    let d = params.dim();
    let layout = params.layout();
    out.iter_mut().for_each(|v| *v = 0.0);
    for j in 0..d {
        let g = f64::from(x[j]) - activation(params, x, j).tanh();
        out[j] += g;
        for k in 0..d {
            if k != j {
                out[layout.pair_index(j, k)] += g * f64::from(x[k]);
            }
        }
    }
}

/// Per-observation score vectors, in row order.
pub fn observation_scores(params: &FvbmParams, data: &SpinMatrix) -> Result<Vec<Vec<f64>>> {
    check_data(params, data)?;
    let p = params.layout().len();
    Ok(data
        .rows()
        .map(|x| {
            let mut s = vec![0.0; p];
            row_score(params, x, &mut s);
            s
        })
        .collect())
}

/// Analytic gradient of [`log_pseudolikelihood`].
pub fn pseudo_score(params: &FvbmParams, data: &SpinMatrix) -> Result<PseudoScore> {
    check_data(params, data)?;
    let p = params.layout().len();
    let mut gradient = vec![0.0; p];
    let mut row = vec![0.0; p];
    for x in data.rows() {
        row_score(params, x, &mut row);
        gradient.iter_mut().zip(&row).for_each(|(g, r)| *g += r);
    }
    Ok(PseudoScore { gradient })
}

/// Analytic Hessian of [`log_pseudolikelihood`].
pub fn pseudo_hessian(params: &FvbmParams, data: &SpinMatrix) -> Result<PseudoHessian> {
    check_data(params, data)?;
    let d = params.dim();
    let layout = params.layout();
    let p = layout.len();
    let mut matrix = DMatrix::zeros(p, p);
    // (flat index, coefficient) pairs forming ∂a_j/∂θ
    let mut direction: Vec<(usize, f64)> = Vec::with_capacity(d);
    for x in data.rows() {
        for j in 0..d {
            let t = activation(params, x, j).tanh();
            let weight = 1.0 - t * t;
            direction.clear();
            direction.push((j, 1.0));
            for k in (0..d).filter(|&k| k != j) {
                direction.push((layout.pair_index(j, k), f64::from(x[k])));
            }
            for &(r, vr) in &direction {
                for &(c, vc) in &direction {
                    matrix[(r, c)] -= weight * vr * vc;
                }
            }
        }
    }
    Ok(PseudoHessian { matrix })
}
