use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::Aabb;
use crate::measures::DiscreteMeasure;
use crate::{Error, Result, Wifs};

pub const DEFAULT_BURN_IN: usize = 100;

/// Points drawn from a measure, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    coords: Vec<f64>,
    pub seed: u64,
    pub burn_in: usize,
    /// [`Wifs::fingerprint`] of the generating system, 0 for other sources.
    pub wifs_fingerprint: u64,
}

impl SampleSet {
    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionError {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Ok(Self {
            dim,
            coords,
            seed: 0,
            burn_in: 0,
            wifs_fingerprint: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks(self.dim)
    }

    pub(crate) fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Fraction of samples in the half-open box `[lo, hi)`.
    pub fn box_fraction(&self, b: &Aabb) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.points().filter(|p| b.contains_half_open(p)).count() as f64 / self.len() as f64
    }

    /// Samples of `self ∗ nu`: each point is shifted by an independent draw
    /// from `nu`.
    pub fn convolve_with(&self, nu: &DiscreteMeasure, seed: u64) -> Result<SampleSet> {
        if nu.dim() != self.dim {
            return Err(Error::DimensionError {
                expected: self.dim,
                got: nu.dim(),
            });
        }
        let atoms = nu.atoms();
        let pick = WeightedIndex::new(atoms.iter().map(|a| a.weight))
            .map_err(|e| Error::InvalidMeasure(e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coords = Vec::with_capacity(self.coords.len());
        for p in self.points() {
            let shift = &atoms[pick.sample(&mut rng)].location;
            coords.extend(p.iter().zip(shift).map(|(x, s)| x + s));
        }
        Ok(SampleSet {
            coords,
            seed,
            wifs_fingerprint: 0,
            ..self.clone()
        })
    }

    /// Samples of `alpha * self + (1 - alpha) * other`: position `i` keeps
    /// `self`'s point with probability `alpha`, otherwise takes `other`'s.
    pub fn mix_with(&self, other: &SampleSet, alpha: f64, seed: u64) -> Result<SampleSet> {
        if other.dim != self.dim {
            return Err(Error::DimensionError {
                expected: self.dim,
                got: other.dim,
            });
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("mixing weight {alpha} outside [0, 1]")));
        }
        let count = self.len().min(other.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coords = Vec::with_capacity(count * self.dim);
        for i in 0..count {
            let src = if rng.random::<f64>() < alpha { self } else { other };
            coords.extend_from_slice(src.point(i));
        }
        Ok(SampleSet {
            dim: self.dim,
            coords,
            seed,
            burn_in: self.burn_in,
            wifs_fingerprint: 0,
        })
    }
}

/// Random iteration `x_{k+1} = f_{I_k}(x_k)` with `I_k` drawn from the
/// weights, started at the centre of the attractor hull. The first
/// `burn_in` iterates are discarded.
pub fn chaos_game(wifs: &Wifs, count: usize, seed: u64, burn_in: usize) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be >= 1".into()));
    }
    let pick = WeightedIndex::new(wifs.probs()).map_err(|e| Error::InvalidWifs(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = wifs.attractor_hull().center();
    let dim = wifs.dim();
    let mut coords = Vec::with_capacity(count * dim);
    for k in 0..burn_in + count {
        x = wifs.maps()[pick.sample(&mut rng)].apply(&x);
        if k >= burn_in {
            coords.extend_from_slice(&x);
        }
    }
    Ok(SampleSet {
        dim,
        coords,
        seed,
        burn_in,
        wifs_fingerprint: wifs.fingerprint(),
    })
}
