//! Exact evaluation of the FVBM probability mass function by enumerating all
//! `2^d` states.
//!
//! States are indexed so that bit `j` of the index encodes coordinate `j`,
//! with a set bit meaning `+1` (see [`SpinVector::from_state_index`]).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{check_spins, FvbmParams, SpinMatrix, SpinVector};

/// Largest dimension accepted by operations that enumerate the state space.
pub const ENUMERATION_CAP: usize = 20;

fn check_cap(d: usize) -> Result<()> {
    if d > ENUMERATION_CAP {
        Err(Error::EnumerationCap { d, cap: ENUMERATION_CAP })
    } else {
        Ok(())
    }
}

fn check_dim(params: &FvbmParams, x: &[i8]) -> Result<()> {
    if x.len() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: x.len() });
    }
    check_spins(x)
}

/// `½ xᵀMx + xᵀb` without validation; `x` must have length `d`.
pub(crate) fn energy(params: &FvbmParams, x: &[i8]) -> f64 {
    let d = params.dim();
    let mut total = 0.0;
    for j in 0..d {
        let xj = f64::from(x[j]);
        let column = params.interaction_column(j);
        let mut pair = 0.0;
        for k in j + 1..d {
            pair += column[k] * f64::from(x[k]);
        }
        total += xj * (params.bias()[j] + pair);
    }
    total
}

/// The exponent `½ xᵀMx + xᵀb` of the unnormalized mass function.
pub fn log_unnormalized(params: &FvbmParams, x: &[i8]) -> Result<f64> {
    check_dim(params, x)?;
    Ok(energy(params, x))
}

fn state_energies(params: &FvbmParams) -> Vec<f64> {
    let d = params.dim();
    let mut x = vec![-1i8; d];
    (0..1usize << d)
        .map(|state| {
            for (j, v) in x.iter_mut().enumerate() {
                *v = if state >> j & 1 == 1 { 1 } else { -1 };
            }
            energy(params, &x)
        })
        .collect()
}

/// Streaming log-sum-exp in state order.
fn log_sum_exp(values: &[f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    let mut sum = 0.0;
    for &v in values {
        if v > max {
            sum = sum * (max - v).exp() + 1.0;
            max = v;
        } else {
            sum += (v - max).exp();
        }
    }
    max + sum.ln()
}

/// `log z(θ)`, accumulated with a streaming log-sum-exp.
pub fn log_normalization_constant(params: &FvbmParams) -> Result<f64> {
    check_cap(params.dim())?;
    Ok(log_sum_exp(&state_energies(params)))
}

/// `z(θ) = Σ_ξ exp(½ ξᵀMξ + ξᵀb)`. May overflow to infinity for extreme
/// parameters; use [`log_normalization_constant`] in that case.
pub fn normalization_constant(params: &FvbmParams) -> Result<f64> {
    log_normalization_constant(params).map(f64::exp)
}

pub fn pmf(params: &FvbmParams, x: &[i8]) -> Result<f64> {
    check_dim(params, x)?;
    let log_z = log_normalization_constant(params)?;
    Ok((energy(params, x) - log_z).exp())
}

/// Probabilities of every state under a fitted model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPmfTable")]
pub struct PmfTable {
    d: usize,
    #[serde(serialize_with = "crate::json::serialize_f64_slice")]
    probabilities: Vec<f64>,
}

#[derive(Deserialize)]
struct RawPmfTable {
    d: usize,
    probabilities: Vec<f64>,
}

impl TryFrom<RawPmfTable> for PmfTable {
    type Error = Error;

    fn try_from(raw: RawPmfTable) -> Result<Self> {
        check_cap(raw.d)?;
        if raw.probabilities.len() != 1 << raw.d {
            return Err(Error::DimensionMismatch { expected: 1 << raw.d, found: raw.probabilities.len() });
        }
        if raw.probabilities.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParams("probabilities must lie in [0, 1]".into()));
        }
        let total: f64 = raw.probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!("probabilities sum to {total}, not 1")));
        }
        Ok(PmfTable { d: raw.d, probabilities: raw.probabilities })
    }
}

/// Joint distribution of two coordinates; `plus_minus` is `P(X_j=+1, X_k=-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairwiseJoint {
    pub plus_plus: f64,
    pub minus_minus: f64,
    pub plus_minus: f64,
    pub minus_plus: f64,
}

impl PairwiseJoint {
    /// Probability that the two coordinates agree.
    pub fn concordance(&self) -> f64 {
        self.plus_plus + self.minus_minus
    }
}

impl PmfTable {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn probability(&self, x: &SpinVector) -> Result<f64> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: x.len() });
        }
        Ok(self.probabilities[x.state_index()])
    }

    /// `P(X_j = +1)`, with `j` zero-based.
    pub fn marginal_probability(&self, j: usize) -> Result<f64> {
        if j >= self.d {
            return Err(Error::IndexOutOfRange { index: j, d: self.d });
        }
        Ok(self
            .probabilities
            .iter()
            .enumerate()
            .filter(|(state, _)| state >> j & 1 == 1)
            .map(|(_, p)| p)
            .sum())
    }

    pub fn marginals(&self) -> Vec<f64> {
        (0..self.d).map(|j| self.marginal_probability(j).expect("index in range")).collect()
    }

    pub fn pairwise_joint(&self, j: usize, k: usize) -> Result<PairwiseJoint> {
        for index in [j, k] {
            if index >= self.d {
                return Err(Error::IndexOutOfRange { index, d: self.d });
            }
        }
        if j == k {
            return Err(Error::InvalidParams(format!("pairwise joint needs two distinct coordinates, got {j} twice")));
        }
        let mut cells = [0.0; 4];
        for (state, p) in self.probabilities.iter().enumerate() {
            let a = state >> j & 1;
            let b = state >> k & 1;
            cells[(1 - a) * 2 + (1 - b)] += p;
        }
        Ok(PairwiseJoint {
            plus_plus: cells[0],
            plus_minus: cells[1],
            minus_plus: cells[2],
            minus_minus: cells[3],
        })
    }

    /// Inverse-CDF sampling with a seeded ChaCha generator.
    pub fn sample(&self, n: usize, seed: u64) -> SpinMatrix {
        let mut cumulative = Vec::with_capacity(self.probabilities.len());
        let mut acc = 0.0;
        for p in &self.probabilities {
            acc += p;
            cumulative.push(acc);
        }
        let last = cumulative.len() - 1;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::with_capacity(n * self.d);
        for _ in 0..n {
            let u: f64 = rng.gen::<f64>() * acc;
            let state = cumulative.partition_point(|&c| c <= u).min(last);
            values.extend((0..self.d).map(|j| if state >> j & 1 == 1 { 1i8 } else { -1 }));
        }
        SpinMatrix::from_flat(n, self.d, values).expect("sampled spins are valid")
    }
}

/// Probability of every state, in state-index order.
pub fn enumerate_pmf(params: &FvbmParams) -> Result<PmfTable> {
    check_cap(params.dim())?;
    let energies = state_energies(params);
    let log_z = log_sum_exp(&energies);
    Ok(PmfTable {
        d: params.dim(),
        probabilities: energies.into_iter().map(|e| (e - log_z).exp()).collect(),
    })
}

/// `P(X_j = +1)` under `params`.
pub fn marginal_probability(table: &PmfTable, j: usize) -> Result<f64> {
    table.marginal_probability(j)
}

pub fn pairwise_joint(table: &PmfTable, j: usize, k: usize) -> Result<PairwiseJoint> {
    table.pairwise_joint(j, k)
}

/// `n` exact i.i.d. draws from the model.
pub fn sample(params: &FvbmParams, n: usize, seed: u64) -> Result<SpinMatrix> {
    check_cap(params.dim())?;
    if n == 0 {
        return Ok(SpinMatrix::empty(params.dim()));
    }
    Ok(enumerate_pmf(params)?.sample(n, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(b: [f64; 2], m: f64) -> FvbmParams {
        FvbmParams::new(b.to_vec(), &[m]).unwrap()
    }

    #[test]
    fn log_unnormalized_examples() {
        assert_eq!(log_unnormalized(&FvbmParams::zeros(3), &[1, -1, 1]).unwrap(), 0.0);
        assert_eq!(log_unnormalized(&pair([0.0, 0.0], 0.5), &[1, 1]).unwrap(), 0.5);
        assert_eq!(log_unnormalized(&pair([1.0, -1.0], 0.5), &[1, -1]).unwrap(), 1.5);
        assert!(matches!(
            log_unnormalized(&FvbmParams::zeros(2), &[1]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn normalization_examples() {
        assert!((normalization_constant(&FvbmParams::zeros(1)).unwrap() - 2.0).abs() < 1e-15);
        let expected = 2.0 * 0.5f64.exp() + 2.0 * (-0.5f64).exp();
        assert!((normalization_constant(&pair([0.0, 0.0], 0.5)).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 4.51050).abs() < 1e-5);
        assert!((normalization_constant(&FvbmParams::zeros(3)).unwrap() - 8.0).abs() < 1e-14);
    }

    #[test]
    fn log_z_survives_large_parameters() {
        let p = FvbmParams::new(vec![800.0, 800.0], &[400.0]).unwrap();
        let log_z = log_normalization_constant(&p).unwrap();
        assert!((log_z - 2000.0).abs() < 1e-9);
        let table = enumerate_pmf(&p).unwrap();
        assert!((table.probabilities()[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_examples() {
        let one = FvbmParams::new(vec![0.0], &[]).unwrap();
        assert!((pmf(&one, &[1]).unwrap() - 0.5).abs() < 1e-15);
        let biased = FvbmParams::new(vec![1.0], &[]).unwrap();
        let e = 1f64.exp();
        assert!((pmf(&biased, &[1]).unwrap() - e / (e + 1.0 / e)).abs() < 1e-15);
        let p = pmf(&pair([0.0, 0.0], 0.5), &[1, 1]).unwrap();
        assert!((p - 0.36553).abs() < 1e-5);
    }

    #[test]
    fn enumerate_examples() {
        let t = enumerate_pmf(&FvbmParams::new(vec![0.0], &[]).unwrap()).unwrap();
        assert_eq!(t.probabilities(), &[0.5, 0.5]);
        let t = enumerate_pmf(&FvbmParams::zeros(2)).unwrap();
        assert!(t.probabilities().iter().all(|&p| (p - 0.25).abs() < 1e-15));
        let t = enumerate_pmf(&pair([0.0, 0.0], 0.5)).unwrap();
        let joint = t.pairwise_joint(0, 1).unwrap();
        assert!((joint.concordance() - 0.73106).abs() < 1e-5);
    }

    #[test]
    fn cap_is_enforced() {
        let p = FvbmParams::zeros(ENUMERATION_CAP + 1);
        assert!(matches!(enumerate_pmf(&p), Err(Error::EnumerationCap { .. })));
        assert!(matches!(sample(&p, 1, 0), Err(Error::EnumerationCap { .. })));
    }

    #[test]
    fn marginal_and_joint_errors() {
        let t = enumerate_pmf(&FvbmParams::zeros(3)).unwrap();
        assert!((t.marginal_probability(2).unwrap() - 0.5).abs() < 1e-15);
        assert!(t.marginal_probability(3).is_err());
        assert!(t.pairwise_joint(1, 1).is_err());
        assert!(t.pairwise_joint(0, 5).is_err());
        let j = t.pairwise_joint(0, 2).unwrap();
        for v in [j.plus_plus, j.minus_minus, j.plus_minus, j.minus_plus] {
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn sampling_examples() {
        assert_eq!(sample(&FvbmParams::zeros(3), 0, 1).unwrap().nrows(), 0);

        let one = FvbmParams::new(vec![0.0], &[]).unwrap();
        let draws = sample(&one, 100_000, 7).unwrap();
        let mean: f64 = draws.column(0).map(f64::from).sum::<f64>() / 1e5;
        assert!(mean.abs() < 0.02, "mean {mean}");

        let draws = sample(&pair([0.0, 0.0], 0.5), 100_000, 11).unwrap();
        let agree = draws.rows().filter(|r| r[0] == r[1]).count() as f64 / 1e5;
        assert!((agree - 0.73106).abs() < 0.01, "agreement {agree}");

        assert_eq!(draws, sample(&pair([0.0, 0.0], 0.5), 100_000, 11).unwrap());
    }

    #[test]
    fn pmf_table_json_schema() {
        let t = enumerate_pmf(&FvbmParams::zeros(1)).unwrap();
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(text, r#"{"d":1,"probabilities":[5.0000000000000000e-1,5.0000000000000000e-1]}"#);
    }
}
