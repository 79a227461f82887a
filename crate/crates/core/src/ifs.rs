//! Similitudes, weighted iterated function systems and their symbolic words.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use crate::geometry::{hausdorff_distance, Aabb};
use crate::measures::{Atom, DiscreteMeasure};
use crate::{Error, Result};

/// Tolerance for orthonormality of the isometry part.
pub const ISOMETRY_TOL: f64 = 1e-12;
/// Tolerance for probability vectors summing to one.
pub const PROB_SUM_TOL: f64 = 1e-12;
/// Convergence threshold of the box iteration in [`Wifs::attractor_hull`].
pub const HULL_TOL: f64 = 1e-12;
const HULL_MAX_ITERS: usize = 200_000;

/// `x -> scale * isometry * x + translation` with `0 < scale < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Similitude {
    scale: f64,
    /// row-major `m x m` orthogonal matrix
    isometry: Vec<f64>,
    translation: Vec<f64>,
}

impl Similitude {
    pub fn new(scale: f64, isometry: Vec<Vec<f64>>, translation: Vec<f64>) -> Result<Self> {
        let dim = translation.len();
        if dim == 0 {
            return Err(Error::InvalidSimilitude("translation must be non-empty".into()));
        }
        if !(scale > 0.0 && scale < 1.0) {
            return Err(Error::InvalidSimilitude(format!("scale {scale} not in (0, 1)")));
        }
        if translation.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidSimilitude("translation must be finite".into()));
        }
        if isometry.len() != dim || isometry.iter().any(|row| row.len() != dim) {
            return Err(Error::InvalidSimilitude(format!(
                "isometry must be {dim}x{dim} to match the translation"
            )));
        }
        let flat: Vec<f64> = isometry.into_iter().flatten().collect();
        for a in 0..dim {
            for b in 0..dim {
                let dot: f64 = (0..dim).map(|k| flat[k * dim + a] * flat[k * dim + b]).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                if !((dot - want).abs() <= ISOMETRY_TOL) {
                    return Err(Error::InvalidSimilitude(format!(
                        "isometry columns {a},{b} not orthonormal (dot = {dot})"
                    )));
                }
            }
        }
        Ok(Self {
            scale,
            isometry: flat,
            translation,
        })
    }

    /// Similitude with identity isometry.
    pub fn homothety(scale: f64, translation: Vec<f64>) -> Result<Self> {
        let dim = translation.len();
        Self::new(scale, identity_rows(dim), translation)
    }

    /// `x -> scale * x + shift` on the line.
    pub fn line(scale: f64, shift: f64) -> Result<Self> {
        Self::homothety(scale, vec![shift])
    }

    /// `x -> -scale * x + shift` on the line.
    pub fn line_reflected(scale: f64, shift: f64) -> Result<Self> {
        Self::new(scale, vec![vec![-1.0]], vec![shift])
    }

    /// The identity map; the neutral element of composition. It is not a
    /// contraction, so it is never accepted as a member of a [`Wifs`].
    pub fn identity(dim: usize) -> Self {
        Self {
            scale: 1.0,
            isometry: identity_rows(dim).into_iter().flatten().collect(),
            translation: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn translation(&self) -> &[f64] {
        &self.translation
    }

    pub fn isometry_rows(&self) -> Vec<Vec<f64>> {
        self.isometry.chunks(self.dim()).map(<[f64]>::to_vec).collect()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let dim = self.dim();
        (0..dim)
            .map(|k| {
                let row = &self.isometry[k * dim..(k + 1) * dim];
                self.scale * row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.translation[k]
            })
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Similitude) -> Similitude {
        let dim = self.dim();
        let mut isometry = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                isometry[i * dim + j] = (0..dim)
                    .map(|k| self.isometry[i * dim + k] * inner.isometry[k * dim + j])
                    .sum();
            }
        }
        Similitude {
            scale: self.scale * inner.scale,
            isometry,
            translation: self.apply(&inner.translation),
        }
    }

    /// Each row of the isometry has a single nonzero entry, so images of
    /// axis-aligned boxes are again exactly boxes.
    pub fn is_axis_aligned(&self) -> bool {
        self.isometry
            .chunks(self.dim())
            .all(|row| row.iter().filter(|v| v.abs() > ISOMETRY_TOL).count() == 1)
    }

    /// True for a one-dimensional map with positive slope.
    pub fn preserves_orientation_1d(&self) -> bool {
        self.dim() == 1 && self.isometry[0] > 0.0
    }

    /// Tight axis-aligned bounding box of the image of `b`.
    pub fn image_box(&self, b: &Aabb) -> Aabb {
        let dim = self.dim();
        let center = self.apply(&b.center());
        let half = b.half_widths();
        let mut lo = Vec::with_capacity(dim);
        let mut hi = Vec::with_capacity(dim);
        for (row, c) in self.isometry.chunks(dim).zip(&center) {
            let r = self.scale * row.iter().zip(&half).map(|(a, h)| a.abs() * h).sum::<f64>();
            lo.push(c - r);
            hi.push(c + r);
        }
        Aabb { lo, hi }
    }

    /// The unique fixed point (the map is a contraction).
    pub fn fixed_point(&self) -> Vec<f64> {
        if self.dim() == 1 {
            return vec![self.translation[0] / (1.0 - self.scale * self.isometry[0])];
        }
        let mut x = self.translation.clone();
        for _ in 0..10_000 {
            let next = self.apply(&x);
            let step = crate::geometry::euclidean(&next, &x);
            x = next;
            if step <= 1e-15 * (1.0 + x.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
                break;
            }
        }
        x
    }
}

fn identity_rows(dim: usize) -> Vec<Vec<f64>> {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// A finite word over the alphabet `{1, ..., N}`.
///
/// The word `ξ = ξ1 ξ2 ... ξk` stands for the map `f_ξ1 ∘ f_ξ2 ∘ ... ∘ f_ξk`,
/// so the leftmost symbol is applied last.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<u16>);

impl Word {
    /// Symbols are 1-based.
    pub fn new(symbols: Vec<u16>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn symbols(&self) -> &[u16] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Concatenation `self other`.
    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect())
    }

    fn check(&self, alphabet: usize) -> Result<()> {
        match self.0.iter().find(|&&s| s == 0 || s as usize > alphabet) {
            Some(s) => Err(Error::InvalidWord(format!(
                "symbol {s} in {self} outside 1..={alphabet}"
            ))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&s| s <= 9) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(u16::to_string).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    /// `"21"` (one digit per symbol) or `"12.3"` (dot-separated symbols, for
    /// alphabets larger than nine). The empty string is the empty word.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        let bad = || Error::InvalidWord(format!("cannot parse word {s:?}"));
        let symbols: Vec<u16> = if s.contains('.') {
            s.split('.')
                .map(|p| p.parse::<u16>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).map(|d| d as u16).ok_or_else(bad))
                .collect::<Result<_>>()?
        };
        if symbols.contains(&0) {
            return Err(bad());
        }
        Ok(Word(symbols))
    }
}

/// All words of length `len` over `{1..alphabet}`, in lexicographic order.
pub fn all_words(alphabet: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=alphabet as u16).map(move |s| {
                    let mut v = w.0.clone();
                    v.push(s);
                    Word(v)
                })
            })
            .collect();
    }
    out
}

/// Weighted IFS: contracting similitudes `f_i` with probabilities `ρ_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wifs {
    maps: Vec<Similitude>,
    probs: Vec<f64>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct MapDoc {
    scale: f64,
    translation: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    isometry: Option<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct WifsDoc {
    ambient_dim: usize,
    maps: Vec<MapDoc>,
    probs: Vec<f64>,
}

impl Wifs {
    pub fn new(maps: Vec<Similitude>, probs: Vec<f64>) -> Result<Self> {
        let dim = maps
            .first()
            .map(Similitude::dim)
            .ok_or_else(|| Error::InvalidWifs("at least one map is required".into()))?;
        if let Some(m) = maps.iter().find(|m| m.dim() != dim) {
            return Err(Error::DimensionError {
                expected: dim,
                got: m.dim(),
            });
        }
        if let Some(m) = maps.iter().find(|m| !(m.scale > 0.0 && m.scale < 1.0)) {
            return Err(Error::InvalidWifs(format!("map scale {} not in (0, 1)", m.scale)));
        }
        if probs.len() != maps.len() {
            return Err(Error::InvalidWifs(format!(
                "{} probabilities for {} maps",
                probs.len(),
                maps.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::InvalidWifs(format!("probability {p} must be positive")));
        }
        let sum: f64 = probs.iter().sum();
        if !((sum - 1.0).abs() <= PROB_SUM_TOL) {
            return Err(Error::InvalidWifs(format!("probabilities sum to {sum}, not 1")));
        }
        Ok(Self { maps, probs, dim })
    }

    /// Orientation-preserving maps `x -> s_i x + t_i` on the line.
    pub fn on_line(maps: &[(f64, f64)], probs: Vec<f64>) -> Result<Self> {
        let maps = maps
            .iter()
            .map(|&(s, t)| Similitude::line(s, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(maps, probs)
    }

    /// Equal-probability system on the line.
    pub fn on_line_uniform(maps: &[(f64, f64)]) -> Result<Self> {
        let n = maps.len().max(1);
        Self::on_line(maps, vec![1.0 / n as f64; maps.len()])
    }

    /// Middle-thirds Cantor measure: `x/3`, `x/3 + 2/3`, weights `1/2`.
    pub fn cantor() -> Self {
        Self::on_line(&[(1.0 / 3.0, 0.0), (1.0 / 3.0, 2.0 / 3.0)], vec![0.5, 0.5])
            .expect("valid cantor system")
    }

    /// `x/4`, `x/4 + t`, `x/4 + 3/4` with equal weights. For `t` in
    /// `(1/16, 4/16)` the level-one images of `[0, 1]` overlap, while the
    /// second-level maps `f_11, f_21, f_31` are strongly separated.
    pub fn quarter_maps(t: f64) -> Result<Self> {
        Self::on_line_uniform(&[(0.25, 0.0), (0.25, t), (0.25, 0.75)])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WifsDoc = serde_json::from_str(text)?;
        let maps = doc
            .maps
            .into_iter()
            .map(|m| {
                if m.translation.len() != doc.ambient_dim {
                    return Err(Error::DimensionError {
                        expected: doc.ambient_dim,
                        got: m.translation.len(),
                    });
                }
                let iso = m.isometry.unwrap_or_else(|| identity_rows(doc.ambient_dim));
                Similitude::new(m.scale, iso, m.translation)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(maps, doc.probs)
    }

    pub fn to_json(&self) -> String {
        let doc = WifsDoc {
            ambient_dim: self.dim,
            maps: self
                .maps
                .iter()
                .map(|m| MapDoc {
                    scale: m.scale,
                    translation: m.translation.clone(),
                    isometry: Some(m.isometry_rows()),
                })
                .collect(),
            probs: self.probs.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("wifs serializes")
    }

    pub fn maps(&self) -> &[Similitude] {
        &self.maps
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn scales(&self) -> Vec<f64> {
        self.maps.iter().map(Similitude::scale).collect()
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_scale(&self) -> f64 {
        self.scales().into_iter().fold(0.0, f64::max)
    }

    /// Stable hash of the maps and weights.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.dim.hash(&mut h);
        for (m, p) in self.maps.iter().zip(&self.probs) {
            m.scale.to_bits().hash(&mut h);
            for v in m.isometry.iter().chain(&m.translation) {
                v.to_bits().hash(&mut h);
            }
            p.to_bits().hash(&mut h);
        }
        h.finish()
    }

    /// `s_ξ = Π s_{ξ_i}`; 1 for the empty word.
    pub fn ratio(&self, word: &Word) -> Result<f64> {
        word.check(self.len())?;
        Ok(word.0.iter().map(|&s| self.maps[s as usize - 1].scale).product())
    }

    /// `ρ_ξ = Π ρ_{ξ_i}`; 1 for the empty word.
    pub fn weight(&self, word: &Word) -> Result<f64> {
        word.check(self.len())?;
        Ok(word.0.iter().map(|&s| self.probs[s as usize - 1]).product())
    }

    /// `f_ξ = f_{ξ_1} ∘ ... ∘ f_{ξ_k}`; the identity for the empty word.
    pub fn compose_word(&self, word: &Word) -> Result<Similitude> {
        word.check(self.len())?;
        Ok(word
            .0
            .iter()
            .fold(Similitude::identity(self.dim), |acc, &s| acc.compose(&self.maps[s as usize - 1])))
    }

    /// Smallest box `K` reached by `B -> hull(∪ f_i(B)) ∩ B` from a box
    /// enclosing an invariant ball.
    ///
    /// With axis-aligned isometries every iterate satisfies `∪ f_i(K) ⊆ K`.
    /// For orientation-preserving maps on the line the endpoints are the
    /// extreme fixed points.
    pub fn attractor_hull(&self) -> Aabb {
        if self.dim == 1 && self.maps.iter().all(Similitude::preserves_orientation_1d) {
            let fixed: Vec<f64> = self.maps.iter().map(|m| m.fixed_point()[0]).collect();
            let lo = fixed.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = fixed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            return Aabb {
                lo: vec![lo],
                hi: vec![hi],
            };
        }
        // |f_i(x)| <= s_i |x| + |t_i| keeps the ball of radius R invariant
        let radius = self
            .maps
            .iter()
            .map(|m| crate::geometry::euclidean(&m.translation, &vec![0.0; self.dim]) / (1.0 - m.scale))
            .fold(0.0, f64::max);
        let mut current = Aabb {
            lo: vec![-radius; self.dim],
            hi: vec![radius; self.dim],
        };
        for _ in 0..HULL_MAX_ITERS {
            let images = self
                .maps
                .iter()
                .map(|m| m.image_box(&current))
                .reduce(|a, b| a.union(&b))
                .expect("at least one map");
            let next = Aabb {
                lo: images.lo.iter().zip(&current.lo).map(|(a, b)| a.max(*b)).collect(),
                hi: images.hi.iter().zip(&current.hi).map(|(a, b)| a.min(*b)).collect(),
            };
            let moved = next.endpoint_distance(&current);
            current = next;
            if moved < HULL_TOL {
                break;
            }
        }
        current
    }

    /// One application of the Hutchinson operator
    /// `λ -> Σ ρ_i λ ∘ f_i^{-1}` to a discrete measure.
    pub fn hutchinson_push(&self, measure: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        if measure.dim() != self.dim {
            return Err(Error::DimensionError {
                expected: self.dim,
                got: measure.dim(),
            });
        }
        let atoms = self.maps.iter().zip(&self.probs).flat_map(|(f, p)| {
            measure.atoms().iter().map(move |Atom { location, weight }| (f.apply(location), p * weight))
        });
        DiscreteMeasure::new(self.dim, atoms)
    }

    /// `k`-fold Hutchinson iterate.
    pub fn hutchinson_iterate(&self, measure: &DiscreteMeasure, k: usize) -> Result<DiscreteMeasure> {
        (0..k).try_fold(measure.clone(), |m, _| self.hutchinson_push(&m))
    }

    /// Sub-system `{f_{ηξ} : η ∈ selection}` at `level` with renormalized
    /// weights `ρ_{ηξ} / Σ_θ ρ_{θξ}`.
    pub fn sub_wifs(&self, level: usize, suffix: &Word, selection: &[Word]) -> Result<SubWifs> {
        SubWifs::build(self, level, suffix, selection)
    }
}

impl fmt::Display for Wifs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WIFS(m={}, N={})", self.dim, self.len())
    }
}

/// A level-`n` sub-system of a parent [`Wifs`].
#[derive(Debug, Clone, PartialEq)]
pub struct SubWifs {
    parent: Wifs,
    level: usize,
    suffix: Word,
    selection: Vec<Word>,
    maps: Vec<Similitude>,
    probs: Vec<f64>,
}

impl SubWifs {
    fn build(parent: &Wifs, level: usize, suffix: &Word, selection: &[Word]) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidParameter("sub-IFS level must be >= 1".into()));
        }
        suffix.check(parent.len())?;
        let mut words: Vec<Word> = selection.to_vec();
        for w in &words {
            w.check(parent.len())?;
            if w.len() != level {
                return Err(Error::InvalidWord(format!("{w} does not have length {level}")));
            }
        }
        words.sort();
        words.dedup();
        let all = (parent.len() as f64).powi(level as i32);
        if words.len() as f64 >= all {
            return Err(Error::NotStrictSubset);
        }
        if words.is_empty() {
            return Err(Error::EmptySelection);
        }
        let full: Vec<Word> = words.iter().map(|w| w.concat(suffix)).collect();
        let maps = full
            .iter()
            .map(|w| parent.compose_word(w))
            .collect::<Result<Vec<_>>>()?;
        let raw = full
            .iter()
            .map(|w| parent.weight(w))
            .collect::<Result<Vec<_>>>()?;
        let total: f64 = raw.iter().sum();
        let probs = raw.iter().map(|p| p / total).collect();
        Ok(Self {
            parent: parent.clone(),
            level,
            suffix: suffix.clone(),
            selection: words,
            maps,
            probs,
        })
    }

    pub fn parent(&self) -> &Wifs {
        &self.parent
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn suffix(&self) -> &Word {
        &self.suffix
    }

    /// Selected words `η`, sorted.
    pub fn selection(&self) -> &[Word] {
        &self.selection
    }

    /// The maps `f_{ηξ}` in selection order.
    pub fn maps(&self) -> &[Similitude] {
        &self.maps
    }

    /// The renormalized weights `ς_η`.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn to_wifs(&self) -> Result<Wifs> {
        Wifs::new(self.maps.clone(), self.probs.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn similitude_validation() {
        assert!(Similitude::line(1.0, 0.0).is_err());
        assert!(Similitude::line(0.0, 0.0).is_err());
        assert!(Similitude::new(0.5, vec![vec![1.0, 0.1], vec![0.0, 1.0]], vec![0.0, 0.0]).is_err());
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let rot = Similitude::new(0.5, vec![vec![c, -c], vec![c, c]], vec![1.0, 0.0]).unwrap();
        let (x, y) = (vec![0.3, -2.0], vec![1.5, 4.0]);
        let d = crate::geometry::euclidean(&rot.apply(&x), &rot.apply(&y));
        assert_relative_eq!(d, 0.5 * crate::geometry::euclidean(&x, &y), max_relative = 1e-12);
        assert!(!rot.is_axis_aligned());
    }

    #[test]
    fn compose_word_quarter_maps() {
        let ifs = Wifs::quarter_maps(0.2).unwrap();
        let f21 = ifs.compose_word(&w("21")).unwrap();
        assert_relative_eq!(f21.scale(), 1.0 / 16.0);
        let img = f21.image_box(&Aabb::interval(0.0, 1.0).unwrap());
        assert_relative_eq!(img.lo[0], 0.2, epsilon = 1e-15);
        assert_relative_eq!(img.hi[0], 0.2625, epsilon = 1e-15);
    }

    #[test]
    fn compose_word_empty_is_identity() {
        let ifs = Wifs::cantor();
        let id = ifs.compose_word(&Word::empty()).unwrap();
        assert_eq!(id.scale(), 1.0);
        assert_eq!(id.apply(&[0.37]), vec![0.37]);
    }

    #[test]
    fn compose_word_cantor_matches_direct_composition() {
        let ifs = Wifs::cantor();
        let f12 = ifs.compose_word(&w("12")).unwrap();
        let f1 = |x: f64| x / 3.0;
        let f2 = |x: f64| x / 3.0 + 2.0 / 3.0;
        for x in [0.0, 0.5, 1.0] {
            assert_relative_eq!(f12.apply(&[x])[0], f1(f2(x)), epsilon = 1e-15);
            assert_relative_eq!(f12.apply(&[x])[0], x / 9.0 + 2.0 / 9.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn compose_word_rejects_bad_symbols() {
        let ifs = Wifs::cantor();
        assert!(matches!(ifs.compose_word(&w("13")), Err(Error::InvalidWord(_))));
        assert!("1a".parse::<Word>().is_err());
        assert!("0".parse::<Word>().is_err());
        assert_eq!(w("12.3").symbols(), &[12, 3]);
        assert_eq!(w("12.3").to_string(), "12.3");
        assert_eq!(w("213").to_string(), "213");
    }

    #[test]
    fn wifs_validation() {
        assert!(Wifs::on_line(&[(0.5, 0.0)], vec![0.9]).is_err());
        assert!(Wifs::on_line(&[(0.5, 0.0), (0.5, 0.5)], vec![1.0, 0.0]).is_err());
        assert!(Wifs::on_line(&[(0.5, 0.0)], vec![0.5, 0.5]).is_err());
        assert!(Wifs::new(vec![], vec![]).is_err());
        let mixed = vec![Similitude::line(0.5, 0.0).unwrap(), Similitude::homothety(0.5, vec![0.0, 0.0]).unwrap()];
        assert!(matches!(Wifs::new(mixed, vec![0.5, 0.5]), Err(Error::DimensionError { .. })));
    }

    #[test]
    fn json_schema() {
        let doc = r#"{"ambient_dim": 1, "maps": [{"scale": 0.3333333333333333, "translation": [0.0]},
                      {"scale": 0.3333333333333333, "translation": [0.6666666666666666], "isometry": [[1.0]]}],
                      "probs": [0.5, 0.5]}"#;
        let ifs = Wifs::from_json(doc).unwrap();
        assert_eq!(ifs, Wifs::cantor());
        assert_eq!(Wifs::from_json(&ifs.to_json()).unwrap(), ifs);
        let bad = r#"{"ambient_dim": 2, "maps": [{"scale": 0.5, "translation": [0.0]}], "probs": [1.0]}"#;
        assert!(Wifs::from_json(bad).is_err());
    }

    #[test]
    fn sub_wifs_examples() {
        let ifs = Wifs::quarter_maps(0.2).unwrap();
        let all = [w("1"), w("2"), w("3")];
        assert_eq!(ifs.sub_wifs(1, &w("1"), &all), Err(Error::NotStrictSubset));
        assert_eq!(ifs.sub_wifs(1, &w("1"), &[]), Err(Error::EmptySelection));

        let sub = ifs.sub_wifs(1, &w("1"), &[w("1"), w("2")]).unwrap();
        assert_eq!(sub.probs(), &[0.5, 0.5]);
        assert_eq!(sub.maps()[0], ifs.compose_word(&w("11")).unwrap());
        assert_eq!(sub.maps()[1], ifs.compose_word(&w("21")).unwrap());

        let cantor = Wifs::cantor();
        let sub = cantor.sub_wifs(2, &Word::empty(), &[w("11"), w("22")]).unwrap();
        assert_eq!(sub.probs(), &[0.5, 0.5]);
        for m in sub.maps() {
            assert_relative_eq!(m.scale(), 1.0 / 9.0, max_relative = 1e-15);
        }
        assert!(sub.to_wifs().is_ok());
        assert!(cantor.sub_wifs(2, &Word::empty(), &[w("1")]).is_err());
    }

    #[test]
    fn sub_wifs_uneven_weights() {
        let ifs = Wifs::on_line(&[(0.5, 0.0), (0.25, 0.75)], vec![0.25, 0.75]).unwrap();
        let sub = ifs.sub_wifs(1, &w("2"), &[w("1")]).unwrap();
        assert_eq!(sub.probs(), &[1.0]);
        assert_relative_eq!(sub.maps()[0].scale(), 0.125);
        let sub = ifs.sub_wifs(2, &w("1"), &[w("12"), w("21"), w("22")]).unwrap();
        // ρ_{121}=3/64, ρ_{211}=3/64, ρ_{221}=9/64
        let expect = [3.0 / 15.0, 3.0 / 15.0, 9.0 / 15.0];
        for (p, e) in sub.probs().iter().zip(expect) {
            assert_relative_eq!(*p, e, max_relative = 1e-14);
        }
        let s: f64 = sub.probs().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn attractor_hull_examples() {
        // fixed points 0 and (2/3)/(1 - 1/3)
        let cantor = Wifs::cantor().attractor_hull();
        assert_eq!(cantor.lo[0], 0.0);
        assert_relative_eq!(cantor.hi[0], 1.0, epsilon = 1e-15);
        let single = Wifs::on_line(&[(0.5, 0.5)], vec![1.0]).unwrap().attractor_hull();
        assert_eq!((single.lo[0], single.hi[0]), (1.0, 1.0));
        let q = Wifs::quarter_maps(0.2).unwrap().attractor_hull();
        assert_eq!((q.lo[0], q.hi[0]), (0.0, 1.0));
    }

    #[test]
    fn attractor_hull_with_reflection_and_plane() {
        // x -> -x/2 + 1 and x -> x/2 : attractor inside [0, 1]
        let maps = vec![Similitude::line_reflected(0.5, 1.0).unwrap(), Similitude::line(0.5, 0.0).unwrap()];
        let ifs = Wifs::new(maps, vec![0.5, 0.5]).unwrap();
        let k = ifs.attractor_hull();
        assert!((k.lo[0]).abs() < 1e-10 && (k.hi[0] - 1.0).abs() < 1e-10, "{k:?}");
        for m in ifs.maps() {
            assert!(m.image_box(&k).is_within(&k, 1e-10));
        }

        let sierpinski = Wifs::new(
            vec![
                Similitude::homothety(0.5, vec![0.0, 0.0]).unwrap(),
                Similitude::homothety(0.5, vec![0.5, 0.0]).unwrap(),
                Similitude::homothety(0.5, vec![0.25, 0.5]).unwrap(),
            ],
            vec![1.0 / 3.0; 3],
        )
        .unwrap();
        let k = sierpinski.attractor_hull();
        assert!(k.endpoint_distance(&Aabb::cube(2, 0.0, 1.0).unwrap()) < 1e-10, "{k:?}");
    }

    #[test]
    fn hutchinson_examples() {
        let cantor = Wifs::cantor();
        let d0 = DiscreteMeasure::dirac(vec![0.0]).unwrap();
        let once = cantor.hutchinson_push(&d0).unwrap();
        assert_eq!(once.atoms().len(), 2);
        assert_eq!(once.mass_at(&[0.0]), 0.5);
        assert_eq!(once.mass_at(&[2.0 / 3.0]), 0.5);

        let twice = cantor.hutchinson_iterate(&d0, 2).unwrap();
        let locs: Vec<f64> = twice.atoms().iter().map(|a| a.location[0]).collect();
        for (got, want) in locs.iter().zip([0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
        assert!(twice.atoms().iter().all(|a| a.weight == 0.25));

        let single = Wifs::on_line(&[(0.5, 0.5)], vec![1.0]).unwrap();
        let mu = DiscreteMeasure::new(1, [(vec![0.0], 0.3), (vec![1.0], 0.7)]).unwrap();
        let pushed = single.hutchinson_push(&mu).unwrap();
        assert_eq!(pushed.mass_at(&[0.5]), 0.3);
        assert_eq!(pushed.mass_at(&[1.0]), 0.7);

        let plane = DiscreteMeasure::dirac(vec![0.0, 0.0]).unwrap();
        assert!(matches!(cantor.hutchinson_push(&plane), Err(Error::DimensionError { .. })));
    }

    #[test]
    fn all_words_order() {
        let words: Vec<String> = all_words(2, 2).iter().map(Word::to_string).collect();
        assert_eq!(words, ["11", "12", "21", "22"]);
        assert_eq!(all_words(3, 0), vec![Word::empty()]);
    }
}
