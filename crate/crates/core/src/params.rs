//! Parameter and data containers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of free parameters for `d` spins: `d` biases plus `d(d-1)/2` interactions.
pub fn num_params(d: usize) -> usize {
    d * (d - 1) / 2 + d
}

/// One coordinate of the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    Bias(usize),
    /// Interaction between spins `j < k`.
    Interaction(usize, usize),
}

/// Canonical flat layout: biases `b_1..b_d` first, then the upper-triangular
/// interactions in lexicographic order `(1,2),(1,3),...,(d-1,d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FlatLayout {
    d: usize,
}

impl FlatLayout {
    pub fn new(d: usize) -> Self {
        Self { d }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        num_params(self.d)
    }

    pub fn is_empty(&self) -> bool {
        self.d == 0
    }

    pub fn bias_index(&self, j: usize) -> usize {
        debug_assert!(j < self.d);
        j
    }

    /// Flat index of `m_jk`; the pair may be given in either order.
    pub fn pair_index(&self, j: usize, k: usize) -> usize {
        let (j, k) = if j < k { (j, k) } else { (k, j) };
        debug_assert!(j != k && k < self.d);
        self.d + j * (2 * self.d - j - 1) / 2 + (k - j - 1)
    }

    pub fn coordinate(&self, index: usize) -> Coordinate {
        if index < self.d {
            return Coordinate::Bias(index);
        }
        let mut offset = index - self.d;
        for j in 0..self.d {
            let row = self.d - j - 1;
            if offset < row {
                return Coordinate::Interaction(j, j + 1 + offset);
            }
            offset -= row;
        }
        panic!("flat index {index} out of range for d = {}", self.d);
    }

    pub fn bias_indices(&self) -> Vec<usize> {
        (0..self.d).collect()
    }

    pub fn interaction_indices(&self) -> Vec<usize> {
        (self.d..self.len()).collect()
    }

    /// Human-readable name of a coordinate, e.g. `b[ALP]` or `m[AG,NXT]`.
    pub fn label(&self, index: usize, names: &[String]) -> String {
        let name = |j: usize| names.get(j).cloned().unwrap_or_else(|| format!("X{}", j + 1));
        match self.coordinate(index) {
            Coordinate::Bias(j) => format!("b[{}]", name(j)),
            Coordinate::Interaction(j, k) => format!("m[{},{}]", name(j), name(k)),
        }
    }
}

/// Biases `b` and the symmetric, zero-diagonal interaction matrix `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ParamsFile", try_from = "ParamsFile")]
pub struct FvbmParams {
    d: usize,
    bias: Vec<f64>,
    /// Dense row-major `d x d` storage; kept symmetric with a zero diagonal.
    interaction: Vec<f64>,
}

impl FvbmParams {
    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            bias: vec![0.0; d],
            interaction: vec![0.0; d * d],
        }
    }

    /// Build from biases and the upper-triangular interactions in flat-layout order.
    pub fn new(bias: Vec<f64>, interaction_upper: &[f64]) -> Result<Self> {
        let d = bias.len();
        if d == 0 {
            return Err(Error::InvalidParams("dimension must be positive".into()));
        }
        if interaction_upper.len() != d * (d - 1) / 2 {
            return Err(Error::DimensionMismatch {
                expected: d * (d - 1) / 2,
                found: interaction_upper.len(),
            });
        }
        let mut params = Self { d, bias, interaction: vec![0.0; d * d] };
        let layout = params.layout();
        for j in 0..d {
            for k in j + 1..d {
                params.set_interaction(j, k, interaction_upper[layout.pair_index(j, k) - d]);
            }
        }
        params.check_finite()?;
        Ok(params)
    }

    /// Build from biases and a dense matrix; rejects asymmetric or nonzero-diagonal input.
    pub fn from_dense(bias: Vec<f64>, matrix: &[Vec<f64>]) -> Result<Self> {
        let d = bias.len();
        if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidParams(format!("interaction matrix must be {d}x{d}")));
        }
        let mut upper = Vec::with_capacity(d * (d - 1) / 2);
        for j in 0..d {
            if matrix[j][j] != 0.0 {
                return Err(Error::InvalidParams(format!("diagonal entry ({j},{j}) is nonzero")));
            }
            for k in j + 1..d {
                if matrix[j][k] != matrix[k][j] {
                    return Err(Error::InvalidParams(format!("matrix is not symmetric at ({j},{k})")));
                }
                upper.push(matrix[j][k]);
            }
        }
        Self::new(bias, &upper)
    }

    pub fn from_flat(d: usize, flat: &[f64]) -> Result<Self> {
        if d == 0 || flat.len() != num_params(d) {
            return Err(Error::DimensionMismatch { expected: num_params(d.max(1)), found: flat.len() });
        }
        Self::new(flat[..d].to_vec(), &flat[d..])
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = self.bias.clone();
        flat.extend(self.interaction_upper());
        flat
    }

    pub fn interaction_upper(&self) -> Vec<f64> {
        let mut upper = Vec::with_capacity(self.d * (self.d - 1) / 2);
        for j in 0..self.d {
            upper.extend_from_slice(&self.interaction[j * self.d + j + 1..(j + 1) * self.d]);
        }
        upper
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn layout(&self) -> FlatLayout {
        FlatLayout::new(self.d)
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn set_bias(&mut self, j: usize, value: f64) {
        self.bias[j] = value;
    }

    pub fn interaction(&self, j: usize, k: usize) -> f64 {
        self.interaction[j * self.d + k]
    }

    /// Column `j` of `M` (equal to row `j` by symmetry).
    pub fn interaction_column(&self, j: usize) -> &[f64] {
        &self.interaction[j * self.d..(j + 1) * self.d]
    }

    /// Sets `m_jk` and `m_kj` together. Panics on a diagonal entry.
    pub fn set_interaction(&mut self, j: usize, k: usize, value: f64) {
        assert!(j != k, "the interaction diagonal is fixed at zero");
        self.interaction[j * self.d + k] = value;
        self.interaction[k * self.d + j] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.bias.iter().chain(&self.interaction).all(|v| v.is_finite())
    }

    fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParams("parameters must be finite".into()))
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ParamsFile {
    d: usize,
    #[serde(serialize_with = "crate::json::serialize_f64_slice")]
    bias: Vec<f64>,
    #[serde(serialize_with = "crate::json::serialize_f64_slice")]
    interaction_upper: Vec<f64>,
}

impl From<FvbmParams> for ParamsFile {
    fn from(p: FvbmParams) -> Self {
        Self { d: p.d, interaction_upper: p.interaction_upper(), bias: p.bias }
    }
}

impl TryFrom<ParamsFile> for FvbmParams {
    type Error = Error;

    fn try_from(file: ParamsFile) -> Result<Self> {
        if file.bias.len() != file.d {
            return Err(Error::DimensionMismatch { expected: file.d, found: file.bias.len() });
        }
        FvbmParams::new(file.bias, &file.interaction_upper)
    }
}

pub(crate) fn check_spins(values: &[i8]) -> Result<()> {
    match values.iter().position(|&v| v != 1 && v != -1) {
        Some(position) => Err(Error::InvalidSpin { position, value: values[position] as i64 }),
        None => Ok(()),
    }
}

/// A single observation over `{-1, +1}^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinVector(Vec<i8>);

impl SpinVector {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        check_spins(&values)?;
        Ok(Self(values))
    }

    /// The state whose bit `j` (set ↔ +1) encodes coordinate `j`.
    pub fn from_state_index(index: usize, d: usize) -> Self {
        Self((0..d).map(|j| if index >> j & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn state_index(&self) -> usize {
        self.0.iter().enumerate().filter(|(_, &v)| v == 1).map(|(j, _)| 1usize << j).sum()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::ops::Deref for SpinVector {
    type Target = [i8];

    fn deref(&self) -> &[i8] {
        &self.0
    }
}

/// `n` observations of a `d`-dimensional spin vector, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinMatrix {
    n: usize,
    d: usize,
    values: Vec<i8>,
}

impl SpinMatrix {
    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: row.len() });
            }
            check_spins(row)?;
            values.extend_from_slice(row);
        }
        Ok(Self { n: rows.len(), d, values })
    }

    pub fn from_flat(n: usize, d: usize, values: Vec<i8>) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::DimensionMismatch { expected: n * d, found: values.len() });
        }
        check_spins(&values)?;
        Ok(Self { n, d, values })
    }

    /// An empty matrix that still remembers its column count.
    pub fn empty(d: usize) -> Self {
        Self { n: 0, d, values: Vec::new() }
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.d
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        // chunks_exact panics on a zero chunk size
        self.values.chunks_exact(self.d.max(1)).take(self.n)
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.values[i * self.d + j]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = i8> + '_ {
        (0..self.n).map(move |i| self.get(i, j))
    }

    pub fn as_flat(&self) -> &[i8] {
        &self.values
    }

    /// Columns where every observation takes the same sign.
    pub fn constant_columns(&self) -> Vec<usize> {
        if self.n == 0 {
            return Vec::new();
        }
        (0..self.d).filter(|&j| self.column(j).all(|v| v == self.get(0, j))).collect()
    }

    /// CSV with a header row and `1`/`-1` cells.
    pub fn to_csv(&self, labels: &[String]) -> Result<String> {
        if labels.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, found: labels.len() });
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Parse { line: 0, column: 0, message: e.to_string() };
        writer.write_record(labels).map_err(io)?;
        for row in self.rows() {
            writer.write_record(row.iter().map(|v| v.to_string())).map_err(io)?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Parse { line: 0, column: 0, message: e.to_string() })?;
        Ok(String::from_utf8(bytes).expect("csv output is ascii"))
    }

    /// Parse a `±1` CSV with a header row. Accepts `1`, `+1` and `-1`.
    pub fn from_csv<R: std::io::Read>(reader: R) -> Result<(Self, Vec<String>)> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let labels: Vec<String> = reader
            .headers()
            .map_err(|e| Error::Parse { line: 1, column: 0, message: e.to_string() })?
            .iter()
            .map(str::to_string)
            .collect();
        if labels.is_empty() || labels.iter().all(String::is_empty) {
            return Err(Error::EmptyData);
        }
        let d = labels.len();
        let mut values = Vec::new();
        let mut n = 0;
        for (i, record) in reader.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| Error::Parse { line, column: 0, message: e.to_string() })?;
            if record.len() != d {
                return Err(Error::Parse {
                    line,
                    column: record.len().min(d) + 1,
                    message: format!("expected {d} fields, found {}", record.len()),
                });
            }
            for (j, cell) in record.iter().enumerate() {
                let v = match cell {
                    "1" | "+1" => 1,
                    "-1" => -1,
                    other => {
                        return Err(Error::Parse {
                            line,
                            column: j + 1,
                            message: format!("expected 1 or -1, found {other:?}"),
                        })
                    }
                };
                values.push(v);
            }
            n += 1;
        }
        Ok((Self { n, d, values }, labels))
    }
}
