//! Axis-aligned boxes and finite point-set distances.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Closed axis-aligned box `[lo_1, hi_1] x ... x [lo_m, hi_m]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Aabb {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionError {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::InvalidParameter("box must have dimension >= 1".into()));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && l <= h)) {
            return Err(Error::InvalidParameter(format!(
                "box bounds must be finite with lo <= hi, got {lo:?} / {hi:?}"
            )));
        }
        Ok(Self { lo, hi })
    }

    /// One-dimensional interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (l + h)).collect()
    }

    pub fn half_widths(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| 0.5 * (h - l)).collect()
    }

    /// Smallest box containing both.
    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    /// Half-open membership `[lo, hi)` in every coordinate.
    pub fn contains_half_open(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *l <= *v && *v < *h)
    }

    /// `self` inside `other` up to `slack` per coordinate.
    pub fn is_within(&self, other: &Aabb, slack: f64) -> bool {
        self.lo.iter().zip(&other.lo).all(|(a, b)| *a >= *b - slack)
            && self.hi.iter().zip(&other.hi).all(|(a, b)| *a <= *b + slack)
    }

    /// Euclidean distance between the two closed boxes (0 when they meet).
    pub fn distance(&self, other: &Aabb) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .map(|((l1, h1), (l2, h2))| {
                let gap = (l2 - h1).max(l1 - h2).max(0.0);
                gap * gap
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Length of the overlap in each coordinate; negative entries mean a gap.
    pub fn overlap_lengths(&self, other: &Aabb) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(other.lo.iter().zip(&other.hi))
            .map(|((l1, h1), (l2, h2))| h1.min(*h2) - l1.max(*l2))
            .collect()
    }

    /// Hausdorff distance between boxes in the max-endpoint sense used for
    /// convergence checks.
    pub fn endpoint_distance(&self, other: &Aabb) -> f64 {
        self.lo
            .iter()
            .zip(&other.lo)
            .chain(self.hi.iter().zip(&other.hi))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l) * (h - l))
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn directed(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .map(|p| b.iter().map(|q| euclidean(p, q)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Hausdorff distance between two finite point sets in the same `R^m`.
pub fn hausdorff_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let dim = a[0].len();
    if let Some(bad) = a.iter().chain(b).find(|p| p.len() != dim) {
        return Err(Error::DimensionError {
            expected: dim,
            got: bad.len(),
        });
    }
    Ok(directed(a, b).max(directed(b, a)))
}
