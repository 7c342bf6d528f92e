use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImputeConfig {
    /// Number of neighbours; odd values avoid vote ties for binary data.
    pub k: usize,
}

impl Default for ImputeConfig {
    fn default() -> Self {
        Self { k: 3 }
    }
}

/// Fraction of disagreeing cells over the columns both rows observe.
/// `None` when the rows share no observed column.
fn distance<T: PartialEq>(a: &[Option<T>], b: &[Option<T>]) -> Option<f64> {
    let (mut shared, mut differ) = (0usize, 0usize);
    for (x, y) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (x, y) {
            shared += 1;
            differ += usize::from(x != y);
        }
    }
    (shared > 0).then(|| differ as f64 / shared as f64)
}

/// Most frequent value; ties go to the most frequent value in `column_counts`,
/// then to whichever tied value the nearest neighbour holds.
fn vote<T: Copy + Ord>(neighbours: &[T], column_counts: &BTreeMap<T, usize>) -> T {
    let mut counts: BTreeMap<T, usize> = BTreeMap::new();
    for &v in neighbours {
        *counts.entry(v).or_default() += 1;
    }
    let best = counts.values().copied().max().unwrap_or(0);
    let tied: Vec<T> = counts.iter().filter(|(_, &c)| c == best).map(|(&v, _)| v).collect();
    if tied.len() == 1 {
        return tied[0];
    }
    let global = |v: &T| column_counts.get(v).copied().unwrap_or(0);
    let top = tied.iter().map(global).max().unwrap_or(0);
    let tied: Vec<T> = tied.into_iter().filter(|v| global(v) == top).collect();
    if tied.len() == 1 {
        return tied[0];
    }
    *neighbours.iter().find(|v| tied.contains(v)).expect("tied values come from the neighbours")
}

/// k-nearest-neighbour imputation over categorical rows.
///
/// For each missing cell `(i, j)` the candidates are the rows that observe
/// column `j`, ranked by normalized Hamming distance to row `i` over the
/// columns both observe (rows sharing no column rank last), ties broken by
/// ascending row index. The imputed value is the majority among the `k`
/// nearest candidates' original column-`j` values. Observed cells are never
/// altered.
pub fn knn_impute<T: Copy + Ord>(rows: &[Vec<Option<T>>], config: &ImputeConfig) -> Result<Vec<Vec<T>>> {
    let n = rows.len();
    if config.k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    if n > 1 && config.k > n - 1 {
        return Err(Error::Config(format!("k = {} exceeds the {} available neighbours", config.k, n - 1)));
    }
    let d = rows.first().map_or(0, Vec::len);
    if let Some(row) = rows.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: row.len() });
    }

    let column_counts: Vec<BTreeMap<T, usize>> = (0..d)
        .map(|j| {
            let mut counts = BTreeMap::new();
            for v in rows.iter().filter_map(|r| r[j]) {
                *counts.entry(v).or_default() += 1;
            }
            counts
        })
        .collect();

    let mut out = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let mut filled = Vec::with_capacity(d);
        for (j, cell) in row.iter().enumerate() {
            if let Some(v) = cell {
                filled.push(*v);
                continue;
            }
            let mut candidates: Vec<(f64, usize)> = rows
                .iter()
                .enumerate()
                .filter(|&(r, other)| r != i && other[j].is_some())
                .map(|(r, other)| (distance(row, other).unwrap_or(f64::INFINITY), r))
                .collect();
            if candidates.is_empty() {
                return Err(Error::Unimputable { row: i, column: j });
            }
            candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let neighbours: Vec<T> = candidates
                .iter()
                .take(config.k)
                .map(|&(_, r)| rows[r][j].expect("candidates observe the column"))
                .collect();
            filled.push(vote(&neighbours, &column_counts[j]));
        }
        out.push(filled);
    }
    Ok(out)
}
