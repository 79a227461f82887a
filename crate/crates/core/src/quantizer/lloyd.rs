//! Generalized Lloyd iteration for order-`r` distortion.

use std::collections::HashMap;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{derive_seed, point_cost, SampleSet, EPS_LOG};
use crate::geometry::euclidean;
use crate::{Error, Result};

/// Codebook initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Init {
    /// k-means++ with selection probability proportional to `d^r`
    /// (uniform over uncovered samples when `r = 0`).
    #[default]
    PlusPlus,
    /// `n` distinct sample indices uniformly at random.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LloydOptions {
    pub max_rounds: usize,
    /// Stop once a round improves the distortion by less than this fraction.
    pub rel_tol: f64,
    pub init: Init,
}

impl Default for LloydOptions {
    fn default() -> Self {
        Self {
            max_rounds: 500,
            rel_tol: 1e-10,
            init: Init::PlusPlus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Codebook {
    pub points: Vec<Vec<f64>>,
    pub r: f64,
    /// Mean `d^r` for `r > 0`; mean floored `log d` for `r = 0`, or `-inf`
    /// when every distinct sample is a code point.
    pub distortion: f64,
    pub restarts_used: usize,
    /// Lloyd rounds of the winning restart.
    pub rounds: usize,
    /// Distortion after initialization and after every accepted round of the
    /// winning restart.
    pub history: Vec<f64>,
}

/// [`optimize_codebook_with`] and default options.
pub fn optimize_codebook(samples: &SampleSet, n: usize, r: f64, restarts: usize, seed: u64) -> Result<Codebook> {
    optimize_codebook_with(samples, n, r, restarts, seed, &LloydOptions::default())
}

/// Best of `restarts` Lloyd runs for an `n`-point codebook.
///
/// Each cell is recentred to the minimizer of its own objective: the mean for
/// `r = 2`, the median (Weiszfeld point in higher dimension) for `r = 1`, a
/// line search or gradient descent otherwise. A new centre is only taken
/// when it lowers the cell objective, so the distortion never increases.
pub fn optimize_codebook_with(
    samples: &SampleSet,
    n: usize,
    r: f64,
    restarts: usize,
    seed: u64,
    opts: &LloydOptions,
) -> Result<Codebook> {
    if n == 0 || restarts == 0 {
        return Err(Error::InvalidParameter("codebook size and restarts must be >= 1".into()));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParameter(format!("order r = {r} must be finite and >= 0")));
    }
    if samples.is_empty() {
        return Err(Error::EmptySet);
    }
    let distinct = distinct_points(samples);
    if n >= distinct.len() {
        return Ok(Codebook {
            points: distinct,
            r,
            distortion: if r == 0.0 { f64::NEG_INFINITY } else { 0.0 },
            restarts_used: 0,
            rounds: 0,
            history: Vec::new(),
        });
    }
    let dim = samples.dim();
    let sorted_line = (dim == 1).then(|| {
        let mut xs = samples.coords().to_vec();
        xs.sort_by(f64::total_cmp);
        xs
    });
    let mut best: Option<Run> = None;
    for k in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[n as u64, k as u64]));
        let start = seed_codebook(samples.coords(), dim, n, r, opts.init, &mut rng);
        let run = match &sorted_line {
            Some(xs) => lloyd_line(xs, start, r, opts),
            None => lloyd_general(samples.coords(), dim, start, r, opts),
        };
        if best.as_ref().is_none_or(|b| run.distortion < b.distortion) {
            best = Some(run);
        }
    }
    let best = best.expect("restarts >= 1");
    Ok(Codebook {
        points: best.code.chunks(dim).map(<[f64]>::to_vec).collect(),
        r,
        distortion: best.distortion,
        restarts_used: restarts,
        rounds: best.history.len() - 1,
        history: best.history,
    })
}

/// Monte Carlo order-`r` distortion of `codebook` on `samples`; for `r = 0`
/// the geometric mean error `exp(mean log d)`.
pub fn estimate_vnr(samples: &SampleSet, codebook: &[Vec<f64>], r: f64) -> Result<f64> {
    if codebook.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(bad) = codebook.iter().find(|c| c.len() != samples.dim()) {
        return Err(Error::DimensionError {
            expected: samples.dim(),
            got: bad.len(),
        });
    }
    if samples.is_empty() {
        return Err(Error::EmptySet);
    }
    let mean = samples
        .points()
        .map(|x| {
            let d = codebook.iter().map(|c| euclidean(x, c)).fold(f64::INFINITY, f64::min);
            point_cost(d, r)
        })
        .sum::<f64>()
        / samples.len() as f64;
    Ok(if r == 0.0 { mean.exp() } else { mean })
}

struct Run {
    code: Vec<f64>,
    distortion: f64,
    history: Vec<f64>,
}

fn distinct_points(samples: &SampleSet) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = samples.points().map(|p| p.iter().map(|v| v + 0.0).collect()).collect();
    pts.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    pts.dedup();
    pts
}

fn seed_codebook(coords: &[f64], dim: usize, n: usize, r: f64, init: Init, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let count = coords.len() / dim;
    let point = |i: usize| &coords[i * dim..(i + 1) * dim];
    match init {
        Init::Uniform => index::sample(rng, count, n)
            .into_iter()
            .flat_map(|i| point(i).to_vec())
            .collect(),
        Init::PlusPlus => {
            let first = rng.random_range(0..count);
            let mut code = point(first).to_vec();
            let mut nearest: Vec<f64> = (0..count).map(|i| euclidean(point(i), point(first))).collect();
            let weight = |d: f64| if r == 0.0 { if d > 0.0 { 1.0 } else { 0.0 } } else { d.powf(r) };
            for _ in 1..n {
                let total: f64 = nearest.iter().map(|&d| weight(d)).sum();
                if total <= 0.0 {
                    break;
                }
                let target = rng.random::<f64>() * total;
                let mut acc = 0.0;
                let mut pick = count - 1;
                for (i, &d) in nearest.iter().enumerate() {
                    acc += weight(d);
                    if acc > target {
                        pick = i;
                        break;
                    }
                }
                let chosen = point(pick).to_vec();
                for (i, d) in nearest.iter_mut().enumerate() {
                    *d = d.min(euclidean(point(i), &chosen));
                }
                code.extend(chosen);
            }
            code
        }
    }
}

// ---------------------------------------------------------------------------
// line

const GOLDEN_ITERS: usize = 80;
const SURROGATE_POINTS: usize = 256;

/// Cells of a sorted codebook are contiguous runs of the sorted samples.
fn line_cells(xs: &[f64], code: &[f64]) -> Vec<(usize, usize)> {
    let mut cells = Vec::with_capacity(code.len());
    let mut start = 0;
    for j in 0..code.len() {
        let end = if j + 1 < code.len() {
            let mid = 0.5 * (code[j] + code[j + 1]);
            start + xs[start..].partition_point(|&x| x < mid)
        } else {
            xs.len()
        };
        cells.push((start, end));
        start = end;
    }
    cells
}

fn line_distortion(xs: &[f64], code: &[f64], cells: &[(usize, usize)], r: f64) -> f64 {
    let total: f64 = cells
        .iter()
        .zip(code)
        .map(|(&(a, b), &c)| xs[a..b].iter().map(|x| point_cost((x - c).abs(), r)).sum::<f64>())
        .sum();
    total / xs.len() as f64
}

fn cell_objective_line(xs: &[f64], c: f64, r: f64) -> f64 {
    xs.iter().map(|x| point_cost((x - c).abs(), r)).sum()
}

/// Evenly spaced order statistics of a sorted slice.
fn quantile_subsample(xs: &[f64], k: usize) -> Vec<f64> {
    if xs.len() <= k {
        return xs.to_vec();
    }
    (0..k).map(|i| xs[(2 * i + 1) * xs.len() / (2 * k)]).collect()
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if b - a <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

fn recenter_line(xs: &[f64], current: f64, r: f64) -> f64 {
    let len = xs.len();
    if r == 2.0 {
        return xs.iter().sum::<f64>() / len as f64;
    }
    if r == 1.0 {
        return if len % 2 == 1 {
            xs[len / 2]
        } else {
            0.5 * (xs[len / 2 - 1] + xs[len / 2])
        };
    }
    let (lo, hi) = (xs[0], xs[len - 1]);
    if lo == hi {
        return lo;
    }
    let candidate = if r >= 1.0 {
        // convex cell objective
        golden_section(|c| cell_objective_line(xs, c, r), lo, hi)
    } else {
        // Below order one the empirical objective is concave between samples
        // (and singular at them for r = 0). Search a quantile summary with the
        // floor raised to the mean sample spacing instead.
        let sub = quantile_subsample(xs, SURROGATE_POINTS);
        let floor = if r == 0.0 { ((hi - lo) / len as f64).max(EPS_LOG) } else { 0.0 };
        golden_section(
            |c| {
                sub.iter()
                    .map(|x| {
                        let d = (x - c).abs().max(floor);
                        if r == 0.0 {
                            d.ln()
                        } else {
                            d.powf(r)
                        }
                    })
                    .sum()
            },
            lo,
            hi,
        )
    };
    if cell_objective_line(xs, candidate, r) < cell_objective_line(xs, current, r) {
        candidate
    } else {
        current
    }
}

/// The `count` samples farthest from the codebook.
fn farthest_line(xs: &[f64], code: &[f64], cells: &[(usize, usize)], count: usize) -> Vec<f64> {
    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(xs.len());
    for (&(a, b), &c) in cells.iter().zip(code) {
        for (i, x) in xs[a..b].iter().enumerate() {
            dists.push(((x - c).abs(), a + i));
        }
    }
    farthest_indices(&mut dists, count).into_iter().map(|i| xs[i]).collect()
}

fn farthest_indices(dists: &mut [(f64, usize)], count: usize) -> Vec<usize> {
    dists.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    dists.iter().take(count).map(|&(_, i)| i).collect()
}

fn lloyd_line(xs: &[f64], mut code: Vec<f64>, r: f64, opts: &LloydOptions) -> Run {
    code.sort_by(f64::total_cmp);
    let mut cells = line_cells(xs, &code);
    let mut distortion = line_distortion(xs, &code, &cells, r);
    let mut history = vec![distortion];
    // (start, end, centre bits) -> new centre; cells that did not change
    // since the previous round keep their centre
    let mut cache: HashMap<(usize, usize, u64), f64> = HashMap::new();
    for _ in 0..opts.max_rounds {
        let mut next_cache = HashMap::with_capacity(code.len());
        let mut next = Vec::with_capacity(code.len());
        let mut empty = 0;
        for (&(a, b), &c) in cells.iter().zip(&code) {
            if a == b {
                empty += 1;
                continue;
            }
            let key = (a, b, c.to_bits());
            let moved = match cache.get(&key) {
                Some(&v) => v,
                None => recenter_line(&xs[a..b], c, r),
            };
            next_cache.insert(key, moved);
            next.push(moved);
        }
        if empty > 0 {
            next.extend(farthest_line(xs, &code, &cells, empty));
        }
        next.sort_by(f64::total_cmp);
        let next_cells = line_cells(xs, &next);
        let next_distortion = line_distortion(xs, &next, &next_cells, r);
        if next_distortion > distortion {
            break;
        }
        let gain = (distortion - next_distortion) / distortion.abs().max(f64::MIN_POSITIVE);
        code = next;
        cells = next_cells;
        distortion = next_distortion;
        cache = next_cache;
        history.push(distortion);
        if gain < opts.rel_tol {
            break;
        }
    }
    Run {
        code,
        distortion,
        history,
    }
}

// ---------------------------------------------------------------------------
// general dimension

fn assign_general(coords: &[f64], dim: usize, code: &[f64], r: f64) -> (f64, Vec<usize>, Vec<f64>) {
    let count = coords.len() / dim;
    let mut owner = Vec::with_capacity(count);
    let mut nearest = Vec::with_capacity(count);
    let mut total = 0.0;
    for x in coords.chunks(dim) {
        let (j, d) = code
            .chunks(dim)
            .enumerate()
            .map(|(j, c)| (j, euclidean(x, c)))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        owner.push(j);
        nearest.push(d);
        total += point_cost(d, r);
    }
    (total / count as f64, owner, nearest)
}

fn cell_objective(points: &[&[f64]], c: &[f64], r: f64) -> f64 {
    points.iter().map(|x| point_cost(euclidean(x, c), r)).sum()
}

fn mean_point(points: &[&[f64]], dim: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim];
    for p in points {
        for (a, b) in m.iter_mut().zip(p.iter()) {
            *a += b;
        }
    }
    m.iter_mut().for_each(|v| *v /= points.len() as f64);
    m
}

fn weiszfeld(points: &[&[f64]], dim: usize) -> Vec<f64> {
    let mut y = mean_point(points, dim);
    for _ in 0..200 {
        let mut num = vec![0.0; dim];
        let mut den = 0.0;
        for p in points {
            let d = euclidean(p, &y);
            if d < 1e-15 {
                continue;
            }
            for (a, b) in num.iter_mut().zip(p.iter()) {
                *a += b / d;
            }
            den += 1.0 / d;
        }
        if den == 0.0 {
            break;
        }
        let next: Vec<f64> = num.iter().map(|v| v / den).collect();
        let step = euclidean(&next, &y);
        y = next;
        if step < 1e-14 * (1.0 + y.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
            break;
        }
    }
    y
}

/// Gradient descent with backtracking on a subsampled, floored objective.
fn descend(points: &[&[f64]], dim: usize, r: f64) -> Vec<f64> {
    let stride = points.len().div_ceil(SURROGATE_POINTS);
    let sub: Vec<&[f64]> = points.iter().step_by(stride).copied().collect();
    let start = mean_point(points, dim);
    let radius = (sub.iter().map(|p| euclidean(p, &start).powi(2)).sum::<f64>() / sub.len() as f64).sqrt();
    let floor = if r == 0.0 {
        (radius / (points.len() as f64).powf(1.0 / dim as f64)).max(EPS_LOG)
    } else {
        0.0
    };
    let objective = |c: &[f64]| -> f64 {
        sub.iter()
            .map(|x| {
                let d = euclidean(x, c).max(floor);
                if r == 0.0 {
                    d.ln()
                } else {
                    d.powf(r)
                }
            })
            .sum()
    };
    let mut c = start;
    let mut value = objective(&c);
    let mut step = radius.max(1e-12);
    for _ in 0..100 {
        let mut grad = vec![0.0; dim];
        for x in &sub {
            let d = euclidean(x, &c);
            if d <= floor || d == 0.0 {
                continue;
            }
            let scale = if r == 0.0 { 1.0 / (d * d) } else { r * d.powf(r - 2.0) };
            for k in 0..dim {
                grad[k] += scale * (c[k] - x[k]);
            }
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        let mut improved = false;
        while step > 1e-14 * (1.0 + radius) {
            let trial: Vec<f64> = c.iter().zip(&grad).map(|(v, g)| v - step * g / norm).collect();
            let tv = objective(&trial);
            if tv < value {
                c = trial;
                value = tv;
                improved = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    c
}

fn recenter_general(points: &[&[f64]], current: &[f64], dim: usize, r: f64) -> Vec<f64> {
    if r == 2.0 {
        return mean_point(points, dim);
    }
    let candidate = if r == 1.0 { weiszfeld(points, dim) } else { descend(points, dim, r) };
    if cell_objective(points, &candidate, r) < cell_objective(points, current, r) {
        candidate
    } else {
        current.to_vec()
    }
}

fn lloyd_general(coords: &[f64], dim: usize, mut code: Vec<f64>, r: f64, opts: &LloydOptions) -> Run {
    let k = code.len() / dim;
    let (mut distortion, mut owner, mut nearest) = assign_general(coords, dim, &code, r);
    let mut history = vec![distortion];
    for _ in 0..opts.max_rounds {
        let mut members: Vec<Vec<&[f64]>> = vec![Vec::new(); k];
        for (x, &j) in coords.chunks(dim).zip(&owner) {
            members[j].push(x);
        }
        let mut next = Vec::with_capacity(code.len());
        let mut empty = 0;
        for (j, pts) in members.iter().enumerate() {
            if pts.is_empty() {
                empty += 1;
            } else {
                next.extend(recenter_general(pts, &code[j * dim..(j + 1) * dim], dim, r));
            }
        }
        if empty > 0 {
            let mut dists: Vec<(f64, usize)> = nearest.iter().copied().zip(0..).collect();
            for i in farthest_indices(&mut dists, empty) {
                next.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
            }
        }
        let (next_distortion, next_owner, next_nearest) = assign_general(coords, dim, &next, r);
        if next_distortion > distortion {
            break;
        }
        let gain = (distortion - next_distortion) / distortion.abs().max(f64::MIN_POSITIVE);
        code = next;
        distortion = next_distortion;
        owner = next_owner;
        nearest = next_nearest;
        history.push(distortion);
        if gain < opts.rel_tol {
            break;
        }
    }
    Run {
        code,
        distortion,
        history,
    }
}
