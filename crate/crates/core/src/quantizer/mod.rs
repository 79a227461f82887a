//! Empirical quantization: chaos-game samples, order-`r` codebooks and
//! dimension fits.
//!
//! For `r > 0` the distortion of a codebook `A` on samples `x_1..x_N` is
//! `(1/N) Σ min_a d(x_j, a)^r`. For `r = 0` it is the mean of
//! `log max(min_a d(x_j, a), EPS_LOG)`, the logarithm of the geometric mean
//! error.

mod fit;
mod lloyd;
mod sampling;

pub use fit::{fit_dimension, fit_dimension_on, quantization_coefficients, DimensionFit, FitOptions};
pub use lloyd::{estimate_vnr, optimize_codebook, optimize_codebook_with, Codebook, Init, LloydOptions};
pub use sampling::{chaos_game, SampleSet, DEFAULT_BURN_IN};

/// Floor on distances inside the logarithm of the `r = 0` objective.
pub const EPS_LOG: f64 = 1e-12;

/// Per-sample cost `d^r`, or the floored `log d` for `r = 0`.
#[inline]
pub(crate) fn point_cost(d: f64, r: f64) -> f64 {
    if r == 0.0 {
        d.max(EPS_LOG).ln()
    } else if r == 2.0 {
        d * d
    } else if r == 1.0 {
        d
    } else {
        d.powf(r)
    }
}

/// Derives an independent stream seed from a base seed and labels.
pub(crate) fn derive_seed(seed: u64, labels: &[u64]) -> u64 {
    // splitmix64 finalizer over each label
    labels.iter().fold(seed, |acc, &l| {
        let mut z = acc ^ l.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    })
}
