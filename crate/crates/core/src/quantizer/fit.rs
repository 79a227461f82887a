//! Slope fits of `-log V_{n,r}` against `log n`.

use rayon::prelude::*;
use serde::Serialize;

use super::{chaos_game, derive_seed, optimize_codebook_with, LloydOptions, SampleSet, DEFAULT_BURN_IN};
use crate::{Error, Result, Wifs};

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub restarts: usize,
    pub burn_in: usize,
    pub lloyd: LloydOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            burn_in: DEFAULT_BURN_IN,
            lloyd: LloydOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub n: usize,
    /// `V̂_{n,r}` for `r > 0`, `log ê_n` for `r = 0`.
    pub distortion: f64,
    pub log_n: f64,
    /// `-log V̂_{n,r}`, or `-log ê_n` for `r = 0`.
    pub neg_log_v: f64,
    /// Seed of the codebook search for this `n`.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionFit {
    pub r: f64,
    pub rows: Vec<FitRow>,
    /// Least-squares slope of `-log V̂` on `log n`.
    pub slope: f64,
    pub intercept: f64,
    /// `r / slope`, or `1 / slope` for `r = 0`.
    pub estimate: f64,
    /// Twice the standard error of `estimate` (delta method).
    pub ci_halfwidth: f64,
}

impl DimensionFit {
    /// `(n, V̂_{n,r})` pairs, or `(n, log ê_n)` for `r = 0`.
    pub fn pairs(&self) -> Vec<(usize, f64)> {
        self.rows.iter().map(|row| (row.n, row.distortion)).collect()
    }
}

/// Samples `wifs` by the chaos game and fits the dimension of order `r`.
pub fn fit_dimension(
    wifs: &Wifs,
    r: f64,
    n_list: &[usize],
    samples_per_run: usize,
    seed: u64,
    opts: &FitOptions,
) -> Result<DimensionFit> {
    check_ladder(n_list, samples_per_run)?;
    let samples = chaos_game(wifs, samples_per_run, seed, opts.burn_in)?;
    fit_dimension_on(&samples, r, n_list, seed, opts)
}

fn check_ladder(n_list: &[usize], samples: usize) -> Result<()> {
    if n_list.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least two codebook sizes, got {}",
            n_list.len()
        )));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) || n_list[0] == 0 {
        return Err(Error::InvalidParameter("codebook sizes must be positive and strictly increasing".into()));
    }
    let largest = *n_list.last().expect("non-empty");
    if largest * 100 > samples {
        return Err(Error::InvalidParameter(format!(
            "largest codebook {largest} needs at least {} samples, got {samples}",
            largest * 100
        )));
    }
    Ok(())
}

/// Fits the dimension of order `r` on a fixed sample set; every codebook
/// size sees the same samples.
pub fn fit_dimension_on(
    samples: &SampleSet,
    r: f64,
    n_list: &[usize],
    seed: u64,
    opts: &FitOptions,
) -> Result<DimensionFit> {
    check_ladder(n_list, samples.len())?;
    let rows = n_list
        .par_iter()
        .map(|&n| {
            let run_seed = derive_seed(seed, &[n as u64]);
            let cb = optimize_codebook_with(samples, n, r, opts.restarts, run_seed, &opts.lloyd)?;
            let neg_log_v = if r == 0.0 { -cb.distortion } else { -cb.distortion.ln() };
            if !neg_log_v.is_finite() {
                return Err(Error::DegenerateFit(format!(
                    "zero distortion at n = {n}; too few distinct samples"
                )));
            }
            Ok(FitRow {
                n,
                distortion: cb.distortion,
                log_n: (n as f64).ln(),
                neg_log_v,
                seed: run_seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let k = rows.len() as f64;
    let mean_x = rows.iter().map(|p| p.log_n).sum::<f64>() / k;
    let mean_y = rows.iter().map(|p| p.neg_log_v).sum::<f64>() / k;
    let sxx: f64 = rows.iter().map(|p| (p.log_n - mean_x).powi(2)).sum();
    let sxy: f64 = rows.iter().map(|p| (p.log_n - mean_x) * (p.neg_log_v - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    if !(slope > 0.0) {
        return Err(Error::DegenerateFit(format!("non-positive slope {slope}")));
    }
    let sse: f64 = rows
        .iter()
        .map(|p| (p.neg_log_v - intercept - slope * p.log_n).powi(2))
        .sum();
    let slope_se = if rows.len() > 2 { (sse / (k - 2.0) / sxx).sqrt() } else { 0.0 };
    let order = if r == 0.0 { 1.0 } else { r };
    let estimate = order / slope;
    Ok(DimensionFit {
        r,
        rows,
        slope,
        intercept,
        estimate,
        ci_halfwidth: 2.0 * estimate * slope_se / slope,
    })
}

/// Diagnostic trajectory `n^{r/s} V̂_{n,r}` for a trial exponent `s`.
pub fn quantization_coefficients(fit: &DimensionFit, s: f64) -> Result<Vec<(usize, f64)>> {
    if fit.r == 0.0 {
        return Err(Error::InvalidParameter("coefficients are defined for r > 0".into()));
    }
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("exponent s = {s} must be positive")));
    }
    Ok(fit
        .rows
        .iter()
        .map(|row| (row.n, (row.n as f64).powf(fit.r / s) * row.distortion))
        .collect())
}
