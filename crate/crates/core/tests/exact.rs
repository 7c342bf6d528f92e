use fvbm::exact::{log_unnormalized, pmf, sample};
use fvbm::{enumerate_pmf, FlatLayout, FvbmParams, SpinVector};
use proptest::prelude::*;

fn params_strategy(max_d: usize) -> impl Strategy<Value = FvbmParams> {
    (1..=max_d).prop_flat_map(|d| {
        prop::collection::vec(-2.0f64..2.0, FlatLayout::new(d).len())
            .prop_map(move |flat| FvbmParams::from_flat(d, &flat).unwrap())
    })
}

fn negate_bias(params: &FvbmParams) -> FvbmParams {
    let mut out = params.clone();
    for j in 0..params.dim() {
        out.set_bias(j, -params.bias()[j]);
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn table_sums_to_one(params in params_strategy(10)) {
        let total: f64 = enumerate_pmf(&params).unwrap().probabilities().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn direct_pmf_matches_table(params in params_strategy(6)) {
        let table = enumerate_pmf(&params).unwrap();
        for s in 0..1usize << params.dim() {
            let x = SpinVector::from_state_index(s, params.dim());
            let direct = pmf(&params, x.as_slice()).unwrap();
            prop_assert!((direct - table.probabilities()[s]).abs() <= 1e-12);
        }
    }

    #[test]
    fn negated_bias_reflects_states(params in params_strategy(6)) {
        let d = params.dim();
        let flipped = negate_bias(&params);
        for s in 0..1usize << d {
            let x = SpinVector::from_state_index(s, d);
            let minus: Vec<i8> = x.iter().map(|v| -v).collect();
            // the quadratic form is even, the linear term odd
            prop_assert_eq!(
                log_unnormalized(&params, x.as_slice()).unwrap(),
                log_unnormalized(&flipped, &minus).unwrap()
            );
            // z is the same sum taken in reflected order
            let a = pmf(&params, x.as_slice()).unwrap();
            let b = pmf(&flipped, &minus).unwrap();
            prop_assert!((a - b).abs() <= 1e-14 * a.max(b));
        }
    }

    #[test]
    fn marginals_and_joints_match_brute_force(params in params_strategy(6)) {
        let d = params.dim();
        let table = enumerate_pmf(&params).unwrap();
        let probs = table.probabilities();
        let states: Vec<SpinVector> = (0..probs.len()).map(|s| SpinVector::from_state_index(s, d)).collect();
        for j in 0..d {
            let mut brute = 0.0;
            for (s, x) in states.iter().enumerate() {
                if x[j] == 1 {
                    brute += probs[s];
                }
            }
            prop_assert_eq!(table.marginal_probability(j).unwrap(), brute);
            for k in 0..d {
                if k == j {
                    continue;
                }
                let joint = table.pairwise_joint(j, k).unwrap();
                let mut cells = [0.0f64; 4];
                for (s, x) in states.iter().enumerate() {
                    let slot = match (x[j], x[k]) {
                        (1, 1) => 0,
                        (-1, -1) => 1,
                        (1, -1) => 2,
                        _ => 3,
                    };
                    cells[slot] += probs[s];
                }
                prop_assert_eq!(
                    [joint.plus_plus, joint.minus_minus, joint.plus_minus, joint.minus_plus],
                    cells
                );
            }
        }
    }
}

/// Upper 0.1% points of the chi-square distribution.
fn chi_square_critical(df: usize) -> f64 {
    match df {
        1 => 10.828,
        3 => 16.266,
        7 => 24.322,
        15 => 37.697,
        _ => unreachable!(),
    }
}

#[test]
fn samples_pass_goodness_of_fit() {
    let cases = [
        FvbmParams::new(vec![0.4], &[]).unwrap(),
        FvbmParams::new(vec![0.2, -0.5], &[0.7]).unwrap(),
        FvbmParams::new(vec![-0.3, 0.1, 0.6], &[0.5, -0.4, 0.2]).unwrap(),
        FvbmParams::new(vec![0.3, -0.2, 0.5, -0.4], &[0.4, -0.3, 0.2, 0.1, -0.2, 0.3]).unwrap(),
    ];
    let n = 100_000;
    for (seed, params) in cases.iter().enumerate() {
        let table = enumerate_pmf(params).unwrap();
        let data = sample(params, n, seed as u64).unwrap();
        let mut counts = vec![0usize; table.probabilities().len()];
        for row in data.rows() {
            counts[SpinVector::new(row.to_vec()).unwrap().state_index()] += 1;
        }
        let statistic: f64 = counts
            .iter()
            .zip(table.probabilities())
            .map(|(&c, &p)| {
                let expected = p * n as f64;
                (c as f64 - expected).powi(2) / expected
            })
            .sum();
        assert!(statistic < chi_square_critical(counts.len() - 1), "d={} chi2={statistic}", params.dim());
    }
}

#[test]
fn sampling_is_seeded() {
    let params = FvbmParams::new(vec![0.2, -0.5], &[0.7]).unwrap();
    assert_eq!(sample(&params, 500, 9).unwrap(), sample(&params, 500, 9).unwrap());
    assert_ne!(sample(&params, 500, 9).unwrap(), sample(&params, 500, 10).unwrap());
}

#[test]
fn symmetric_scalar_sample_mean() {
    let data = sample(&FvbmParams::zeros(1), 100_000, 3).unwrap();
    let mean = data.column(0).map(f64::from).sum::<f64>() / 1e5;
    assert!(mean.abs() < 0.02);
}

#[test]
fn coupled_pair_sample_concordance() {
    let params = FvbmParams::new(vec![0.0, 0.0], &[0.5]).unwrap();
    let data = sample(&params, 100_000, 4).unwrap();
    let agree = data.rows().filter(|r| r[0] == r[1]).count() as f64 / 1e5;
    let exact = 0.5f64.exp() / (0.5f64.exp() + (-0.5f64).exp());
    assert!((agree - exact).abs() < 0.01);
}
