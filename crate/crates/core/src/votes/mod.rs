//! Party-level division records: parsing, split resolution, sparse-column
//! removal, nearest-neighbour imputation and agreement encoding.

mod impute;
mod splits;

pub use impute::{knn_impute, ImputeConfig};
pub use splits::{resolve_splits, MemberExtraction, MemberRecord, SplitResolution};

use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::SpinMatrix;

/// A recorded vote direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Vote {
    Yes,
    No,
}

/// One cell of a division table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Cell {
    Yes,
    No,
    Split,
    Missing,
}

impl Cell {
    pub fn parse(token: &str) -> Option<Cell> {
        match token.trim().to_ascii_lowercase().as_str() {
            "yes" => Some(Cell::Yes),
            "no" => Some(Cell::No),
            "split" => Some(Cell::Split),
            "-" | "" => Some(Cell::Missing),
            _ => None,
        }
    }

    pub fn vote(self) -> Option<Vote> {
        match self {
            Cell::Yes => Some(Vote::Yes),
            Cell::No => Some(Vote::No),
            _ => None,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Cell::Yes => "Yes",
            Cell::No => "No",
            Cell::Split => "Split",
            Cell::Missing => "-",
        }
    }
}

impl From<Option<Vote>> for Cell {
    fn from(vote: Option<Vote>) -> Self {
        match vote {
            Some(Vote::Yes) => Cell::Yes,
            Some(Vote::No) => Cell::No,
            None => Cell::Missing,
        }
    }
}

/// Date and per-day item number identifying a division.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct DivisionKey {
    pub date: String,
    pub number: u32,
}

/// Rectangular table of party votes, one row per division.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteTable {
    parties: Vec<String>,
    divisions: Vec<DivisionKey>,
    cells: Vec<Vec<Cell>>,
}

impl VoteTable {
    pub fn new(parties: Vec<String>, divisions: Vec<DivisionKey>, cells: Vec<Vec<Cell>>) -> Result<Self> {
        for (i, name) in parties.iter().enumerate() {
            if parties[..i].contains(name) {
                return Err(Error::Parse { line: 1, column: i + 3, message: format!("duplicate party {name:?}") });
            }
        }
        if divisions.len() != cells.len() {
            return Err(Error::DimensionMismatch { expected: divisions.len(), found: cells.len() });
        }
        if let Some(row) = cells.iter().find(|row| row.len() != parties.len()) {
            return Err(Error::DimensionMismatch { expected: parties.len(), found: row.len() });
        }
        Ok(Self { parties, divisions, cells })
    }

    pub fn parties(&self) -> &[String] {
        &self.parties
    }

    pub fn divisions(&self) -> &[DivisionKey] {
        &self.divisions
    }

    pub fn cells(&self) -> &[Vec<Cell>] {
        &self.cells
    }

    pub fn nrows(&self) -> usize {
        self.divisions.len()
    }

    pub fn cell(&self, row: usize, column: usize) -> Cell {
        self.cells[row][column]
    }

    pub fn column_index(&self, party: &str) -> Option<usize> {
        self.parties.iter().position(|p| p.eq_ignore_ascii_case(party))
    }

    pub fn missing_count(&self, column: usize) -> usize {
        self.cells.iter().filter(|row| row[column] == Cell::Missing).count()
    }

    pub fn total_missing(&self) -> usize {
        self.cells.iter().flatten().filter(|&&c| c == Cell::Missing).count()
    }

    /// Rows as `Option<Vote>`, failing if any split remains.
    pub fn to_vote_rows(&self) -> Result<Vec<Vec<Option<Vote>>>> {
        self.cells
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &c)| match c {
                        Cell::Split => Err(Error::IncompleteTable { kind: "Split", row: i, column: self.parties[j].clone() }),
                        other => Ok(other.vote()),
                    })
                    .collect()
            })
            .collect()
    }

    fn with_cells(&self, cells: Vec<Vec<Cell>>) -> Self {
        Self { parties: self.parties.clone(), divisions: self.divisions.clone(), cells }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("date,number,{}\n", self.parties.join(","));
        for (key, row) in self.divisions.iter().zip(&self.cells) {
            out.push_str(&format!("{},{}", key.date, key.number));
            for c in row {
                out.push(',');
                out.push_str(c.label());
            }
            out.push('\n');
        }
        out
    }
}

fn csv_error(e: csv::Error) -> Error {
    let (line, column) = match e.position() {
        Some(p) => (p.line() as usize, 0),
        None => (0, 0),
    };
    Error::Parse { line, column, message: e.to_string() }
}

/// Parse `date,number,<party>,...` records.
pub fn parse_votes<R: Read>(source: R) -> Result<VoteTable> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(source);
    let header = reader.headers().map_err(csv_error)?.clone();
    if header.len() < 3 {
        return Err(Error::Parse { line: 1, column: header.len(), message: "expected date, number and at least one party".into() });
    }
    let parties: Vec<String> = header.iter().skip(2).map(|s| s.trim().to_string()).collect();
    let mut divisions = Vec::new();
    let mut cells = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(csv_error)?;
        if record.len() != header.len() {
            return Err(Error::Parse {
                line,
                column: record.len().min(header.len()) + 1,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let number = record[1].trim().parse::<u32>().map_err(|_| Error::Parse {
            line,
            column: 2,
            message: format!("division number {:?} is not an integer", &record[1]),
        })?;
        divisions.push(DivisionKey { date: record[0].trim().to_string(), number });
        let row = record
            .iter()
            .skip(2)
            .enumerate()
            .map(|(j, token)| {
                Cell::parse(token).ok_or_else(|| Error::Parse {
                    line,
                    column: j + 3,
                    message: format!("unknown vote token {token:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        cells.push(row);
    }
    VoteTable::new(parties, divisions, cells)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedColumn {
    pub party: String,
    pub missing: usize,
    pub fraction: f64,
}

/// Remove columns whose missing fraction exceeds `threshold`.
pub fn drop_sparse_columns(table: &VoteTable, threshold: f64) -> Result<(VoteTable, Vec<DroppedColumn>)> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Config(format!("drop threshold must lie in (0, 1], got {threshold}")));
    }
    let n = table.nrows().max(1) as f64;
    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    for (j, party) in table.parties.iter().enumerate() {
        let missing = table.missing_count(j);
        let fraction = missing as f64 / n;
        if fraction > threshold {
            dropped.push(DroppedColumn { party: party.clone(), missing, fraction });
        } else {
            keep.push(j);
        }
    }
    let cells = table.cells.iter().map(|row| keep.iter().map(|&j| row[j]).collect()).collect();
    let parties = keep.iter().map(|&j| table.parties[j].clone()).collect();
    Ok((VoteTable { parties, divisions: table.divisions.clone(), cells }, dropped))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImputedCell {
    pub row: usize,
    pub party: String,
    pub value: Vote,
}

/// Fill every missing cell by k-nearest-neighbour majority vote.
pub fn impute_table(table: &VoteTable, config: &ImputeConfig) -> Result<(VoteTable, Vec<ImputedCell>)> {
    let rows = table.to_vote_rows()?;
    let filled = knn_impute(&rows, config)?;
    let mut log = Vec::new();
    for (i, (before, after)) in rows.iter().zip(&filled).enumerate() {
        for (j, (b, &a)) in before.iter().zip(after).enumerate() {
            if b.is_none() {
                log.push(ImputedCell { row: i, party: table.parties[j].clone(), value: a });
            }
        }
    }
    let cells = filled.into_iter().map(|row| row.into_iter().map(|v| Cell::from(Some(v))).collect()).collect();
    Ok((table.with_cells(cells), log))
}

/// `+1` where a party voted with `reference`, `−1` otherwise; the reference
/// column is dropped and the remaining order is preserved.
pub fn encode_agreement(table: &VoteTable, reference: &str) -> Result<(SpinMatrix, Vec<String>)> {
    let r = table.column_index(reference).ok_or_else(|| Error::MissingColumn(reference.to_string()))?;
    let labels: Vec<String> = table.parties.iter().enumerate().filter(|&(j, _)| j != r).map(|(_, p)| p.clone()).collect();
    let mut values = Vec::with_capacity(table.nrows() * labels.len());
    for (i, row) in table.cells.iter().enumerate() {
        let incomplete = |j: usize| {
            let kind = if row[j] == Cell::Split { "Split" } else { "Missing" };
            Error::IncompleteTable { kind, row: i, column: table.parties[j].clone() }
        };
        let reference_vote = row[r].vote().ok_or_else(|| incomplete(r))?;
        for j in (0..row.len()).filter(|&j| j != r) {
            let vote = row[j].vote().ok_or_else(|| incomplete(j))?;
            values.push(if vote == reference_vote { 1 } else { -1 });
        }
    }
    Ok((SpinMatrix::from_flat(table.nrows(), labels.len(), values)?, labels))
}

/// Proportion of `+1` entries per column with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Proportion {
    pub proportion: f64,
    pub standard_error: f64,
}

pub fn empirical_proportions(data: &SpinMatrix) -> Vec<Proportion> {
    let n = data.nrows() as f64;
    (0..data.ncols())
        .map(|j| {
            let proportion = data.column(j).filter(|&v| v == 1).count() as f64 / n;
            Proportion { proportion, standard_error: (proportion * (1.0 - proportion) / n).sqrt() }
        })
        .collect()
}

/// Settings for the full preparation pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PrepareConfig {
    pub reference: String,
    pub extract: Option<MemberExtraction>,
    pub drop_threshold: f64,
    pub impute: ImputeConfig,
}

impl Default for PrepareConfig {
    fn default() -> Self {
        Self { reference: "LNP".into(), extract: None, drop_threshold: 0.5, impute: ImputeConfig::default() }
    }
}

/// What the pipeline did to the input, in order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrepareLog {
    pub splits_resolved: usize,
    pub extracted_column: Option<String>,
    pub dropped_columns: Vec<DroppedColumn>,
    pub missing_after_drop: usize,
    pub imputed: Vec<ImputedCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub data: SpinMatrix,
    pub labels: Vec<String>,
    pub log: PrepareLog,
}

/// parse → resolve splits → drop sparse columns → impute → encode.
pub fn prepare(table: &VoteTable, splits: &SplitResolution, config: &PrepareConfig) -> Result<Prepared> {
    let splits_resolved = table.cells.iter().flatten().filter(|&&c| c == Cell::Split).count();
    let resolved = resolve_splits(table, splits, config.extract.as_ref())?;
    let (kept, dropped_columns) = drop_sparse_columns(&resolved, config.drop_threshold)?;
    if kept.parties.is_empty() {
        return Err(Error::EmptyData);
    }
    let missing_after_drop = kept.total_missing();
    let (complete, imputed) = impute_table(&kept, &config.impute)?;
    let (data, labels) = encode_agreement(&complete, &config.reference)?;
    Ok(Prepared {
        data,
        labels,
        log: PrepareLog {
            splits_resolved,
            extracted_column: config.extract.as_ref().map(|e| e.label.clone()),
            dropped_columns,
            missing_after_drop,
            imputed,
        },
    })
}
