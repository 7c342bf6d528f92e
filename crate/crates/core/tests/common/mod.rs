#![allow(dead_code)]

use fvbm::{FlatLayout, FvbmParams};

pub const PARTIES: [&str; 8] = ["ALP", "AG", "NXT", "PHON", "LDP", "JLN", "DHJP", "CULL"];

pub fn labels() -> Vec<String> {
    PARTIES.iter().map(|s| s.to_string()).collect()
}

/// Published tables hold the interactions as a lower triangle: row `r` is
/// party `r + 1`, column `c` is party `c`.
fn flatten(bias: &[f64], lower: &[&[f64]]) -> Vec<f64> {
    let d = bias.len();
    let layout = FlatLayout::new(d);
    let mut flat = vec![f64::NAN; layout.len()];
    flat[..d].copy_from_slice(bias);
    for (r, row) in lower.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            flat[layout.pair_index(c, r + 1)] = v;
        }
    }
    flat
}

pub fn estimates() -> Vec<f64> {
    flatten(
        &[-0.321, -1.037, -0.209, 0.941, 0.384, -0.559, 0.693, -0.383],
        &[
            &[-0.203],
            &[-0.185, -0.284],
            &[-0.370, 0.147, 0.371],
            &[0.173, -0.053, -0.208, 0.512],
            &[0.321, 0.626, 0.419, 0.394, 0.024],
            &[0.059, 0.601, 0.808, -0.498, 0.224, 0.077],
            &[0.042, -0.710, -0.146, 1.287, 0.116, 0.397, 0.801],
        ],
    )
}

pub fn standard_errors() -> Vec<f64> {
    flatten(
        &[0.165, 0.207, 0.208, 0.274, 0.164, 0.194, 0.239, 0.326],
        &[
            &[0.130],
            &[0.130, 0.218],
            &[0.212, 0.240, 0.268],
            &[0.130, 0.141, 0.158, 0.219],
            &[0.117, 0.154, 0.141, 0.216, 0.131],
            &[0.144, 0.248, 0.163, 0.335, 0.149, 0.157],
            &[0.212, 0.274, 0.232, 0.260, 0.211, 0.178, 0.337],
        ],
    )
}

pub fn p_values() -> Vec<f64> {
    flatten(
        &[5.20e-02, 5.71e-07, 3.13e-01, 5.89e-04, 1.94e-02, 3.92e-03, 3.79e-03, 2.40e-01],
        &[
            &[1.16e-01],
            &[1.56e-01, 1.92e-01],
            &[8.13e-02, 5.39e-01, 1.66e-01],
            &[1.84e-01, 7.09e-01, 1.88e-01, 1.91e-02],
            &[5.87e-03, 5.01e-05, 2.90e-03, 6.75e-02, 8.56e-01],
            &[6.85e-01, 1.53e-02, 7.24e-07, 1.37e-01, 1.34e-01, 6.21e-01],
            &[8.42e-01, 9.55e-03, 5.29e-01, 7.58e-07, 5.83e-01, 2.57e-02, 1.74e-02],
        ],
    )
}

pub fn adjusted_p_values() -> Vec<f64> {
    flatten(
        &[1.88e-01, 1.24e-05, 8.52e-01, 6.41e-03, 8.45e-02, 2.13e-02, 2.13e-02, 7.45e-01],
        &[
            &[9.84e-01],
            &[1.00e+00, 1.00e+00],
            &[7.45e-01, 1.00e+00, 1.00e+00],
            &[1.00e+00, 1.00e+00, 1.00e+00, 2.33e-01],
            &[1.29e-01, 1.84e-03, 7.96e-02, 6.75e-01, 1.00e+00],
            &[1.00e+00, 2.33e-01, 4.17e-05, 1.00e+00, 1.00e+00, 1.00e+00],
            &[1.00e+00, 1.75e-01, 1.00e+00, 4.17e-05, 1.00e+00, 2.82e-01, 2.33e-01],
        ],
    )
}

/// Estimates after 1-nearest-neighbour imputation.
pub fn estimates_k1() -> Vec<f64> {
    flatten(
        &[-0.250, -1.031, -0.150, 1.026, 0.180, -0.636, 0.650, -0.352],
        &[
            &[-0.306],
            &[-0.209, -0.272],
            &[-0.345, 0.065, 0.327],
            &[0.093, 0.062, -0.103, 0.654],
            &[0.498, 0.752, 0.405, 0.506, -0.069],
            &[0.044, 0.594, 0.672, -0.525, 0.269, 0.067],
            &[0.014, -0.743, -0.049, 1.225, 0.169, 0.412, 0.746],
        ],
    )
}

/// Estimates after 5-nearest-neighbour imputation.
pub fn estimates_k5() -> Vec<f64> {
    flatten(
        &[-0.326, -1.077, -0.185, 0.830, 0.532, -0.555, 0.751, -0.433],
        &[
            &[-0.209],
            &[-0.197, -0.256],
            &[-0.355, 0.058, 0.349],
            &[0.149, 0.121, -0.199, 0.532],
            &[0.312, 0.623, 0.421, 0.358, 0.033],
            &[0.068, 0.593, 0.791, -0.488, 0.050, 0.093],
            &[0.053, -0.754, -0.119, 1.226, 0.314, 0.395, 0.824],
        ],
    )
}

pub const MODEL_MARGINALS: [f64; 8] = [0.330, 0.122, 0.581, 0.815, 0.784, 0.342, 0.649, 0.761];
pub const EMPIRICAL_MARGINALS: [f64; 8] = [0.333, 0.129, 0.592, 0.810, 0.782, 0.354, 0.660, 0.755];

pub fn params() -> FvbmParams {
    FvbmParams::from_flat(8, &estimates()).unwrap()
}

/// One unit in the third significant digit, the precision of the tables.
pub fn last_digit_unit(value: f64) -> f64 {
    10f64.powi(value.abs().log10().floor() as i32 - 2)
}
