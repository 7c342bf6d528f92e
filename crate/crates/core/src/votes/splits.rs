use std::collections::BTreeMap;
use std::io::Read;

use super::{csv_error, Cell, DivisionKey, Vote, VoteTable};
use crate::error::{Error, Result};

/// One member's vote on a split division.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberRecord {
    pub senator: String,
    /// Party the member's vote belongs to; may be omitted when only one party split.
    pub party: Option<String>,
    pub vote: Option<Vote>,
}

/// Member-level votes for split divisions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitResolution {
    records: BTreeMap<DivisionKey, Vec<MemberRecord>>,
}

/// Pull one member out of their party into a column of their own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberExtraction {
    pub senator: String,
    /// Column name for the extracted member.
    pub label: String,
}

impl MemberExtraction {
    pub fn new(senator: impl Into<String>) -> Self {
        let senator = senator.into();
        Self { label: senator.to_ascii_uppercase(), senator }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

impl SplitResolution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: DivisionKey, record: MemberRecord) {
        self.records.entry(key).or_default().push(record);
    }

    pub fn records(&self, key: &DivisionKey) -> &[MemberRecord] {
        self.records.get(key).map_or(&[], Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Parse `date,number,senator,vote` rows, with an optional `party` column.
    pub fn parse<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
        let header = reader.headers().map_err(csv_error)?.clone();
        let find = |name: &str| header.iter().position(|h| h.eq_ignore_ascii_case(name));
        let missing = |name: &str| Error::Parse { line: 1, column: 0, message: format!("split file lacks a {name:?} column") };
        let date = find("date").ok_or_else(|| missing("date"))?;
        let number = find("number").ok_or_else(|| missing("number"))?;
        let senator = find("senator").ok_or_else(|| missing("senator"))?;
        let vote = find("vote").ok_or_else(|| missing("vote"))?;
        let party = find("party");

        let mut resolution = Self::new();
        for (i, record) in reader.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(csv_error)?;
            let num = record[number].parse::<u32>().map_err(|_| Error::Parse {
                line,
                column: number + 1,
                message: format!("division number {:?} is not an integer", &record[number]),
            })?;
            let cell = Cell::parse(&record[vote]).filter(|c| *c != Cell::Split).ok_or_else(|| Error::Parse {
                line,
                column: vote + 1,
                message: format!("member vote must be Yes, No or -, found {:?}", &record[vote]),
            })?;
            resolution.insert(
                DivisionKey { date: record[date].to_string(), number: num },
                MemberRecord {
                    senator: record[senator].to_string(),
                    party: party.map(|p| record[p].to_string()).filter(|p| !p.is_empty()),
                    vote: cell.vote(),
                },
            );
        }
        Ok(resolution)
    }
}

fn majority(votes: impl Iterator<Item = Option<Vote>>) -> Option<Vote> {
    let (mut yes, mut no) = (0usize, 0usize);
    for v in votes.flatten() {
        match v {
            Vote::Yes => yes += 1,
            Vote::No => no += 1,
        }
    }
    match yes.cmp(&no) {
        std::cmp::Ordering::Greater => Some(Vote::Yes),
        std::cmp::Ordering::Less => Some(Vote::No),
        std::cmp::Ordering::Equal => None,
    }
}

/// Member records that belong to the split in column `column` of `row`.
fn split_records<'a>(
    table: &VoteTable,
    resolution: &'a SplitResolution,
    row: usize,
    column: usize,
) -> Result<Vec<&'a MemberRecord>> {
    let key = &table.divisions[row];
    let party = &table.parties[column];
    let single_split = table.cells[row].iter().filter(|&&c| c == Cell::Split).count() == 1;
    let records: Vec<&MemberRecord> = resolution
        .records(key)
        .iter()
        .filter(|r| match &r.party {
            Some(p) => p.eq_ignore_ascii_case(party),
            None => single_split,
        })
        .collect();
    if records.is_empty() {
        return Err(Error::UnresolvedSplit { party: party.clone(), date: key.date.clone(), number: key.number });
    }
    Ok(records)
}

/// Replace every `Split` cell by the majority of the party's members (exact
/// ties become `Missing`). With `extract`, that member is appended as a new
/// column and excluded from their party's majority.
pub fn resolve_splits(
    table: &VoteTable,
    resolution: &SplitResolution,
    extract: Option<&MemberExtraction>,
) -> Result<VoteTable> {
    let n = table.nrows();
    let mut per_cell: BTreeMap<(usize, usize), Vec<&MemberRecord>> = BTreeMap::new();
    for i in 0..n {
        for j in 0..table.parties.len() {
            if table.cells[i][j] == Cell::Split {
                per_cell.insert((i, j), split_records(table, resolution, i, j)?);
            }
        }
    }

    let is_member = |r: &MemberRecord, e: &MemberExtraction| r.senator.eq_ignore_ascii_case(&e.senator);
    let member_party = match extract {
        Some(e) => {
            let column = per_cell
                .iter()
                .find(|(_, records)| records.iter().any(|r| is_member(r, e)))
                .map(|(&(_, j), _)| j)
                .ok_or_else(|| Error::Config(format!("member {:?} does not appear in any split record", e.senator)))?;
            if table.column_index(&e.label).is_some() {
                return Err(Error::Config(format!("column {:?} already exists", e.label)));
            }
            Some(column)
        }
        None => None,
    };

    let mut cells = table.cells.clone();
    for (&(i, j), records) in &per_cell {
        let remaining = records.iter().filter(|r| match (extract, member_party) {
            (Some(e), Some(column)) if column == j => !is_member(r, e),
            _ => true,
        });
        cells[i][j] = Cell::from(majority(remaining.map(|r| r.vote)));
    }

    let mut parties = table.parties.clone();
    if let (Some(e), Some(column)) = (extract, member_party) {
        parties.push(e.label.clone());
        for i in 0..n {
            let value = match table.cells[i][column] {
                Cell::Split => Cell::from(per_cell[&(i, column)].iter().find(|r| is_member(r, e)).and_then(|r| r.vote)),
                other => other,
            };
            cells[i].push(value);
        }
    }
    VoteTable::new(parties, table.divisions.clone(), cells)
}
