use fvbm::votes::{
    drop_sparse_columns, encode_agreement, impute_table, knn_impute, parse_votes, prepare, resolve_splits, Cell,
    DivisionKey, ImputeConfig, MemberExtraction, MemberRecord, PrepareConfig, SplitResolution, Vote, VoteTable,
};
use fvbm::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SENATE: [&str; 9] = ["LNP", "ALP", "AG", "NXT", "PHON", "LDP", "FFP", "JLN", "DHJP"];

fn keys(n: usize) -> Vec<DivisionKey> {
    (0..n).map(|i| DivisionKey { date: format!("{}/{}", 1 + i % 28, 9 + i / 28), number: 1 + (i % 5) as u32 }).collect()
}

/// Senate-shaped table: 147 divisions, the FFP column almost empty and 54
/// missing cells elsewhere.
fn senate_like(seed: u64) -> VoteTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 147;
    let mut cells: Vec<Vec<Cell>> = (0..n)
        .map(|_| (0..SENATE.len()).map(|_| if rng.gen_bool(0.6) { Cell::Yes } else { Cell::No }).collect())
        .collect();
    let ffp = 6;
    for row in cells.iter_mut().skip(5) {
        row[ffp] = Cell::Missing;
    }
    let mut placed = 0;
    while placed < 54 {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(1..SENATE.len()));
        if j != ffp && cells[i][j] != Cell::Missing {
            cells[i][j] = Cell::Missing;
            placed += 1;
        }
    }
    VoteTable::new(SENATE.iter().map(|s| s.to_string()).collect(), keys(n), cells).unwrap()
}

#[test]
fn sparse_column_is_dropped_and_rest_kept() {
    let table = senate_like(1);
    let (kept, dropped) = drop_sparse_columns(&table, 0.5).unwrap();
    assert_eq!(dropped.len(), 1);
    assert_eq!(dropped[0].party, "FFP");
    assert_eq!(dropped[0].missing, 142);
    assert_eq!(kept.parties().len(), 8);
    let (kept, _) = drop_sparse_columns(&table, 0.5).unwrap();
    let fraction = kept.total_missing() as f64 / (147.0 * 8.0);
    assert_eq!(kept.total_missing(), 54);
    assert!(fraction < 0.5);
}

#[test]
fn nine_column_missing_rate() {
    // 54 of 147 x 9 cells
    assert!((54.0f64 / (147.0 * 9.0) - 0.0408).abs() < 5e-5);
}

#[test]
fn drop_then_impute_leaves_nothing_missing() {
    let table = senate_like(2);
    let (kept, _) = drop_sparse_columns(&table, 0.5).unwrap();
    let (complete, imputed) = impute_table(&kept, &ImputeConfig::default()).unwrap();
    assert_eq!(complete.total_missing(), 0);
    assert_eq!(imputed.len(), 54);
}

#[test]
fn impute_fails_loudly_on_empty_column() {
    let text = "date,number,A,B\n1,1,Yes,-\n1,2,No,-\n1,3,Yes,-\n";
    let table = parse_votes(text.as_bytes()).unwrap();
    assert!(matches!(impute_table(&table, &ImputeConfig { k: 1 }), Err(Error::Unimputable { .. })));
}

#[test]
fn pipeline_is_deterministic() {
    let table = senate_like(3);
    let config = PrepareConfig::default();
    let a = prepare(&table, &SplitResolution::new(), &config).unwrap();
    let b = prepare(&table, &SplitResolution::new(), &config).unwrap();
    assert_eq!(a.data.to_csv(&a.labels).unwrap(), b.data.to_csv(&b.labels).unwrap());
    assert_eq!(a.log, b.log);
    assert_eq!(a.labels, ["ALP", "AG", "NXT", "PHON", "LDP", "JLN", "DHJP"]);
    assert_eq!(a.data.nrows(), 147);
}

#[test]
fn csv_round_trip() {
    let table = senate_like(4);
    assert_eq!(parse_votes(table.to_csv().as_bytes()).unwrap(), table);
}

fn vote_cell(allow_missing: bool) -> impl Strategy<Value = Cell> {
    let weights = if allow_missing { 1 } else { 0 };
    prop_oneof![3 => Just(Cell::Yes), 3 => Just(Cell::No), weights => Just(Cell::Missing)]
}

fn table_strategy(allow_missing: bool) -> impl Strategy<Value = VoteTable> {
    (2usize..6, 4usize..15).prop_flat_map(move |(d, n)| {
        prop::collection::vec(prop::collection::vec(vote_cell(allow_missing), d), n).prop_map(move |mut cells| {
            // keep the reference column complete
            for row in &mut cells {
                if row[0] == Cell::Missing {
                    row[0] = Cell::Yes;
                }
            }
            let parties = std::iter::once("REF".to_string()).chain((1..d).map(|j| format!("P{j}"))).collect();
            VoteTable::new(parties, keys(n), cells).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn encoding_counts_disagreements(table in table_strategy(false)) {
        let (data, labels) = encode_agreement(&table, "REF").unwrap();
        prop_assert_eq!(labels.len(), table.parties().len() - 1);
        for (c, label) in labels.iter().enumerate() {
            let j = table.column_index(label).unwrap();
            let disagreements = (0..table.nrows()).filter(|&i| table.cell(i, j) != table.cell(i, 0)).count();
            prop_assert_eq!(data.column(c).filter(|&v| v == -1).count(), disagreements);
            prop_assert!(data.column(c).all(|v| v == 1 || v == -1));
        }
    }

    #[test]
    fn imputation_keeps_observed_cells(table in table_strategy(true)) {
        let rows = table.to_vote_rows().unwrap();
        match knn_impute(&rows, &ImputeConfig { k: 1 }) {
            Ok(out) => {
                for (a, b) in rows.iter().zip(&out) {
                    for (x, y) in a.iter().zip(b) {
                        if let Some(v) = x {
                            prop_assert_eq!(v, y);
                        }
                    }
                }
            }
            Err(e) => prop_assert!(matches!(e, Error::Unimputable { .. }), "unexpected error {:?}", e),
        }
    }

    #[test]
    fn splits_touch_only_split_cells(table in table_strategy(false), split_rows in prop::collection::vec(any::<bool>(), 15)) {
        // mark PHON-like splits in column 1 and resolve them from member votes
        let mut cells = table.cells().to_vec();
        let mut members = SplitResolution::new();
        for (i, row) in cells.iter_mut().enumerate() {
            if split_rows[i] {
                row[1] = Cell::Split;
                let key = table.divisions()[i].clone();
                for (name, vote) in [("x", Vote::Yes), ("y", Vote::No), ("z", Vote::No)] {
                    let vote = if name == "x" && i % 2 == 0 { Vote::No } else { vote };
                    members.insert(key.clone(), MemberRecord { senator: name.into(), party: None, vote: Some(vote) });
                }
            }
        }
        let with_splits = VoteTable::new(table.parties().to_vec(), table.divisions().to_vec(), cells).unwrap();
        let any_split = split_rows[..table.nrows()].iter().any(|&s| s);
        let extract = MemberExtraction::new("x");
        let resolved = resolve_splits(&with_splits, &members, any_split.then_some(&extract));
        let resolved = resolved.unwrap();
        for i in 0..table.nrows() {
            for j in 0..table.parties().len() {
                if with_splits.cell(i, j) != Cell::Split {
                    prop_assert_eq!(resolved.cell(i, j), with_splits.cell(i, j));
                }
            }
            if any_split && with_splits.cell(i, 1) != Cell::Split {
                prop_assert_eq!(resolved.cell(i, table.parties().len()), with_splits.cell(i, 1));
            }
        }
    }
}
