//! The dimension equation `Σ (ρ_i s_i^r)^{κ/(r+κ)} = 1` and its relatives.
//!
//! Substituting `θ = κ/(r+κ)` turns the equation into `g(θ) = Σ a_i^θ = 1`
//! with `a_i = ρ_i s_i^r ∈ (0, 1)`. On `[0, 1]` the function `g` decreases
//! strictly from `N` to `Σ ρ_i s_i^r < 1`, so a fixed bracket and plain
//! bisection always find the unique root.

use rayon::prelude::*;
use serde::Serialize;

use crate::{Error, Result, Wifs};

/// Bracket width at which bisection stops.
pub const BRACKET_TOL: f64 = 1e-15;
/// Acceptance bound on `|g(θ) - 1|` at the returned root.
pub const RESIDUAL_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;
/// Slack for the monotonicity flag of [`kappa_curve`].
pub const MONOTONE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionResult {
    pub r: f64,
    pub kappa_r: f64,
    /// `min(kappa_r, m)`
    pub d_r: f64,
    pub theta: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Root {
    pub x: f64,
    pub iterations: usize,
}

/// Bisection for `f(x) = target` with `f` strictly decreasing on `[lo, hi]`
/// and `f(lo) > target > f(hi)`.
pub(crate) fn bisect_decreasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, target: f64) -> Root {
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && hi - lo > BRACKET_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let v = f(mid);
        if v == target {
            return Root { x: mid, iterations };
        }
        if v > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick the endpoint with the smaller residual
    let x = if (f(lo) - target).abs() <= (f(hi) - target).abs() { lo } else { hi };
    Root { x, iterations }
}

fn log_terms(wifs: &Wifs, r: f64) -> Vec<f64> {
    wifs.probs()
        .iter()
        .zip(wifs.scales())
        .map(|(p, s)| p.ln() + r * s.ln())
        .collect()
}

fn sum_exp(logs: &[f64], theta: f64) -> f64 {
    logs.iter().map(|l| (theta * l).exp()).sum()
}

/// Solves for `κ_r` at order `r > 0`.
pub fn solve_kappa(wifs: &Wifs, r: f64) -> Result<DimensionResult> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::UseD0Path(r));
    }
    let m = wifs.dim() as f64;
    if wifs.len() == 1 {
        // only θ -> 0 solves a^θ = 1 with a < 1
        return Ok(DimensionResult {
            r,
            kappa_r: 0.0,
            d_r: 0.0,
            theta: 0.0,
            residual: 0.0,
            iterations: 0,
        });
    }
    let logs = log_terms(wifs, r);
    let root = bisect_decreasing(|t| sum_exp(&logs, t), 0.0, 1.0, 1.0);
    let theta = root.x;
    let kappa_r = r * theta / (1.0 - theta);
    Ok(DimensionResult {
        r,
        kappa_r,
        d_r: kappa_r.min(m),
        theta,
        residual: (sum_exp(&logs, theta) - 1.0).abs(),
        iterations: root.iterations,
    })
}

/// `min(κ_r, m)`.
pub fn quantization_dimension(wifs: &Wifs, r: f64, m: usize) -> Result<f64> {
    Ok(solve_kappa(wifs, r)?.kappa_r.min(m as f64))
}

/// Limit of `κ_r` as `r -> 0+`: `Σ ρ_i log ρ_i / Σ ρ_i log s_i`.
pub fn d0_dimension(wifs: &Wifs) -> f64 {
    if wifs.len() == 1 {
        return 0.0;
    }
    let (num, den) = wifs
        .probs()
        .iter()
        .zip(wifs.scales())
        .fold((0.0, 0.0), |(a, b), (p, s)| (a + p * p.ln(), b + p * s.ln()));
    num / den
}

/// Dimension of order `r >= 0`, routing `r = 0` to [`d0_dimension`]. The
/// `r = 0` row reports `θ = 1`, the value of `κ/(r+κ)` at `r = 0`.
pub fn dimension_at(wifs: &Wifs, r: f64) -> Result<DimensionResult> {
    if r == 0.0 {
        let d0 = d0_dimension(wifs);
        return Ok(DimensionResult {
            r,
            kappa_r: d0,
            d_r: d0.min(wifs.dim() as f64),
            theta: if wifs.len() == 1 { 0.0 } else { 1.0 },
            residual: 0.0,
            iterations: 0,
        });
    }
    solve_kappa(wifs, r)
}

/// Similarity dimension: the root of `Σ s_i^D = 1`.
pub fn similarity_dimension(wifs: &Wifs) -> f64 {
    if wifs.len() == 1 {
        return 0.0;
    }
    let logs: Vec<f64> = wifs.scales().iter().map(|s| s.ln()).collect();
    let mut hi = 1.0;
    while sum_exp(&logs, hi) >= 1.0 {
        hi *= 2.0;
    }
    bisect_decreasing(|d| sum_exp(&logs, d), 0.0, hi, 1.0).x
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaCurve {
    pub points: Vec<DimensionResult>,
    /// `κ` non-decreasing along the grid up to [`MONOTONE_SLACK`].
    pub monotone: bool,
}

/// `κ_r` along a strictly increasing grid of positive orders.
pub fn kappa_curve(wifs: &Wifs, r_grid: &[f64]) -> Result<KappaCurve> {
    if r_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("r grid must be strictly increasing".into()));
    }
    let points = r_grid
        .par_iter()
        .map(|&r| solve_kappa(wifs, r))
        .collect::<Result<Vec<_>>>()?;
    let monotone = points
        .windows(2)
        .all(|w| w[0].kappa_r <= w[1].kappa_r + MONOTONE_SLACK);
    Ok(KappaCurve { points, monotone })
}
