//! Finite Dirac mixtures `sum a_i delta_{x_i}` and the metrics between them.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::geometry::{euclidean, Aabb};
use crate::transport::min_cost_transport;
use crate::{Error, Result};

/// Tolerance on the total mass of a probability measure.
pub const PROBABILITY_TOL: f64 = 1e-12;

/// Integer scale used to make transport masses exact.
const TRANSPORT_SCALE: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: Vec<f64>,
    pub weight: f64,
}

/// A finite positive measure on `R^m` with distinct atom locations.
///
/// Atoms are kept in lexicographic order of their coordinates, so two
/// measures built from the same atoms in any order compare equal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    dim: usize,
    atoms: Vec<Atom>,
}

fn cmp_location(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

impl DiscreteMeasure {
    /// Builds a measure, merging atoms at exactly equal coordinates.
    pub fn new<I>(dim: usize, atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<f64>, f64)>,
    {
        if dim == 0 {
            return Err(Error::InvalidMeasure("ambient dimension must be >= 1".into()));
        }
        let mut list = Vec::new();
        for (mut location, weight) in atoms {
            if location.len() != dim {
                return Err(Error::DimensionError {
                    expected: dim,
                    got: location.len(),
                });
            }
            if !location.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidMeasure(format!("non-finite location {location:?}")));
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::InvalidMeasure(format!("weight must be positive, got {weight}")));
            }
            // -0.0 and 0.0 are the same point
            for v in location.iter_mut() {
                *v += 0.0;
            }
            list.push(Atom { location, weight });
        }
        Ok(Self::from_unsorted(dim, list))
    }

    fn from_unsorted(dim: usize, mut list: Vec<Atom>) -> Self {
        list.sort_by(|a, b| cmp_location(&a.location, &b.location));
        let mut atoms: Vec<Atom> = Vec::with_capacity(list.len());
        for atom in list {
            match atoms.last_mut() {
                Some(last) if last.location == atom.location => last.weight += atom.weight,
                _ => atoms.push(atom),
            }
        }
        Self { dim, atoms }
    }

    /// Unit point mass at `x`.
    pub fn dirac(x: Vec<f64>) -> Result<Self> {
        Self::new(x.len(), [(x, 1.0)])
    }

    /// Uniform probability measure on the given points (duplicates add up).
    pub fn uniform(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let w = 1.0 / points.len() as f64;
        Self::new(dim, points.iter().map(|p| (p.clone(), w)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total() - 1.0).abs() <= PROBABILITY_TOL
    }

    /// Mass of the single point `x` (0 if it is not an atom).
    pub fn mass_at(&self, x: &[f64]) -> f64 {
        self.atoms
            .binary_search_by(|a| cmp_location(&a.location, x))
            .map(|i| self.atoms[i].weight)
            .unwrap_or(0.0)
    }

    /// Locations of the atoms.
    pub fn support(&self) -> Vec<Vec<f64>> {
        self.atoms.iter().map(|a| a.location.clone()).collect()
    }

    fn check_dim(&self, other_dim: usize) -> Result<()> {
        if self.dim != other_dim {
            return Err(Error::DimensionError {
                expected: self.dim,
                got: other_dim,
            });
        }
        Ok(())
    }

    /// Push-forward of the product measure under `(x, y) -> x + y`.
    pub fn convolve(&self, other: &DiscreteMeasure) -> Result<DiscreteMeasure> {
        self.check_dim(other.dim)?;
        let mut list = Vec::with_capacity(self.len() * other.len());
        for a in &self.atoms {
            for b in &other.atoms {
                let location = a.location.iter().zip(&b.location).map(|(x, y)| x + y).collect();
                list.push(Atom {
                    location,
                    weight: a.weight * b.weight,
                });
            }
        }
        Ok(Self::from_unsorted(self.dim, list))
    }

    /// The measure `mu + x` defined by `(mu + x)(E) = mu(E + x)`.
    ///
    /// Mass at `y` ends up at `y - x`.
    pub fn translate(&self, x: &[f64]) -> Result<DiscreteMeasure> {
        self.check_dim(x.len())?;
        let list = self
            .atoms
            .iter()
            .map(|a| Atom {
                location: a.location.iter().zip(x).map(|(p, s)| p - s + 0.0).collect(),
                weight: a.weight,
            })
            .collect();
        Ok(Self::from_unsorted(self.dim, list))
    }

    /// Convex combination `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &DiscreteMeasure, alpha: f64) -> Result<DiscreteMeasure> {
        self.check_dim(other.dim)?;
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("mixing weight {alpha} outside [0, 1]")));
        }
        fn scaled(m: &DiscreteMeasure, f: f64) -> impl Iterator<Item = Atom> + '_ {
            m.atoms.iter().filter(move |_| f > 0.0).map(move |a| Atom {
                location: a.location.clone(),
                weight: a.weight * f,
            })
        }
        let list = scaled(self, alpha).chain(scaled(other, 1.0 - alpha)).collect();
        Ok(Self::from_unsorted(self.dim, list))
    }

    /// Sum of the weights of atoms in the half-open box `[lo, hi)`.
    pub fn box_mass(&self, b: &Aabb) -> f64 {
        self.atoms
            .iter()
            .filter(|a| b.contains_half_open(&a.location))
            .map(|a| a.weight)
            .sum()
    }

    /// Total variation distance `sup_A |mu(A) - nu(A)|`, attained on the
    /// atoms where `mu` outweighs `nu`.
    pub fn tv(&self, other: &DiscreteMeasure) -> Result<f64> {
        self.check_dim(other.dim)?;
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.atoms, &other.atoms);
        let mut excess = 0.0;
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => cmp_location(&x.location, &y.location),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    excess += a[i].weight;
                    i += 1;
                }
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    excess += (a[i].weight - b[j].weight).max(0.0);
                    i += 1;
                    j += 1;
                }
            }
        }
        Ok(excess)
    }

    /// Monge-Kantorovich distance between probability measures.
    ///
    /// Uses the CDF integral on the line and exact transport otherwise.
    pub fn dl(&self, other: &DiscreteMeasure) -> Result<f64> {
        self.check_dim(other.dim)?;
        for m in [self, other] {
            if !m.is_probability() {
                return Err(Error::NotNormalized(m.total()));
            }
        }
        if self.dim == 1 {
            Ok(wasserstein_1d(self, other))
        } else {
            self.dl_transport(other)
        }
    }

    /// Monge-Kantorovich distance through the exact transport solver, in any
    /// dimension.
    pub fn dl_transport(&self, other: &DiscreteMeasure) -> Result<f64> {
        self.check_dim(other.dim)?;
        for m in [self, other] {
            if !m.is_probability() {
                return Err(Error::NotNormalized(m.total()));
            }
        }
        let supply = integer_masses(self);
        let demand = integer_masses(other);
        let cost = self.cost_matrix(other);
        let plan = min_cost_transport(&supply, &demand, &cost);
        Ok(plan.cost / TRANSPORT_SCALE)
    }

    /// Optimal coupling as `(atom of self, atom of other, mass)` triples.
    pub fn optimal_plan(&self, other: &DiscreteMeasure) -> Result<Vec<(usize, usize, f64)>> {
        self.check_dim(other.dim)?;
        for m in [self, other] {
            if !m.is_probability() {
                return Err(Error::NotNormalized(m.total()));
            }
        }
        let cost = self.cost_matrix(other);
        let plan = min_cost_transport(&integer_masses(self), &integer_masses(other), &cost);
        Ok(plan
            .flows
            .into_iter()
            .map(|(i, j, x)| (i, j, x as f64 / TRANSPORT_SCALE))
            .collect())
    }

    fn cost_matrix(&self, other: &DiscreteMeasure) -> Vec<Vec<f64>> {
        self.atoms
            .iter()
            .map(|a| other.atoms.iter().map(|b| euclidean(&a.location, &b.location)).collect())
            .collect()
    }

    /// CSV with columns `x1..xm,weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (1..=self.dim).map(|k| format!("x{k}")).collect();
        out.push_str(&header.join(","));
        out.push_str(",weight\n");
        for a in &self.atoms {
            for v in &a.location {
                out.push_str(&format!("{v},"));
            }
            out.push_str(&format!("{}\n", a.weight));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidMeasure("empty CSV".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols.len() < 2 || cols.last() != Some(&"weight") {
            return Err(Error::InvalidMeasure(format!("bad CSV header {header:?}")));
        }
        let dim = cols.len() - 1;
        let mut atoms = Vec::new();
        for (k, line) in lines.enumerate() {
            let vals: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidMeasure(format!("row {}: {e}", k + 1)))?;
            if vals.len() != dim + 1 {
                return Err(Error::InvalidMeasure(format!("row {} has {} fields", k + 1, vals.len())));
            }
            atoms.push((vals[..dim].to_vec(), vals[dim]));
        }
        Self::new(dim, atoms)
    }

    /// JSON array of `{"location": [...], "weight": w}` objects.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.atoms).expect("atoms serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let atoms: Vec<Atom> = serde_json::from_str(text)?;
        let dim = atoms
            .first()
            .map(|a| a.location.len())
            .ok_or_else(|| Error::InvalidMeasure("empty atom list".into()))?;
        Self::new(dim, atoms.into_iter().map(|a| (a.location, a.weight)))
    }
}

/// Rounds `weight * 1e12` and nudges the heaviest atom so the total is
/// exactly the scale; error is at most 1e-10 per unit mass.
fn integer_masses(m: &DiscreteMeasure) -> Vec<i64> {
    let target = TRANSPORT_SCALE as i64;
    let mut masses: Vec<i64> = m
        .atoms
        .iter()
        .map(|a| (a.weight / m.total() * TRANSPORT_SCALE).round() as i64)
        .collect();
    let diff = target - masses.iter().sum::<i64>();
    if let Some(k) = (0..masses.len()).max_by_key(|&k| masses[k]) {
        masses[k] += diff;
    }
    masses
}

/// `sum |F_mu - F_nu| dx` over the merged sorted atom locations.
fn wasserstein_1d(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let mut events: Vec<(f64, f64)> = mu
        .atoms
        .iter()
        .map(|a| (a.location[0], a.weight))
        .chain(nu.atoms.iter().map(|a| (a.location[0], -a.weight)))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cdf_diff = 0.0;
    let mut total = 0.0;
    for w in events.windows(2) {
        cdf_diff += w[0].1;
        total += cdf_diff.abs() * (w[1].0 - w[0].0);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(atoms: &[(f64, f64)]) -> DiscreteMeasure {
        DiscreteMeasure::new(1, atoms.iter().map(|(x, w)| (vec![*x], *w))).unwrap()
    }

    #[test]
    fn constructor_merges_exact_duplicates() {
        let m = line(&[(1.0, 0.25), (0.0, 0.5), (1.0, 0.25)]);
        assert_eq!(m.len(), 2);
        assert_eq!(m.mass_at(&[1.0]), 0.5);
        let z = line(&[(0.0, 0.5), (-0.0, 0.5)]);
        assert_eq!(z.len(), 1);
    }

    #[test]
    fn constructor_rejects_bad_atoms() {
        assert!(DiscreteMeasure::new(1, [(vec![0.0], 0.0)]).is_err());
        assert!(DiscreteMeasure::new(1, [(vec![0.0], -1.0)]).is_err());
        assert!(DiscreteMeasure::new(1, [(vec![f64::NAN], 1.0)]).is_err());
        assert!(matches!(
            DiscreteMeasure::new(2, [(vec![0.0], 1.0)]),
            Err(Error::DimensionError { .. })
        ));
    }

    #[test]
    fn convolution_examples() {
        let mu = line(&[(0.0, 0.3), (2.5, 0.7)]);
        let id = DiscreteMeasure::dirac(vec![0.0]).unwrap();
        assert_eq!(mu.convolve(&id).unwrap(), mu);

        let coin = line(&[(0.0, 0.5), (1.0, 0.5)]);
        let twice = coin.convolve(&coin).unwrap();
        assert_eq!(twice, line(&[(0.0, 0.25), (1.0, 0.5), (2.0, 0.25)]));

        let a = DiscreteMeasure::dirac(vec![1.5, -2.0]).unwrap();
        let b = DiscreteMeasure::dirac(vec![0.5, 4.0]).unwrap();
        assert_eq!(a.convolve(&b).unwrap(), DiscreteMeasure::dirac(vec![2.0, 2.0]).unwrap());
        assert!(a.convolve(&coin).is_err());
    }

    #[test]
    fn translation_follows_set_identity() {
        let delta = DiscreteMeasure::dirac(vec![0.0]).unwrap();
        let moved = delta.translate(&[0.7]).unwrap();
        // (mu + x)({-x}) = mu({-x + x}) = mu({0}) = 1
        assert_eq!(moved.mass_at(&[-0.7]), 1.0);
        assert_eq!(delta.mass_at(&[0.0]), 1.0);

        let mu = line(&[(0.0, 0.5), (1.0, 0.5)]);
        assert_eq!(mu.translate(&[0.0]).unwrap(), mu);
        let back = mu.translate(&[0.25]).unwrap().translate(&[-0.25]).unwrap();
        assert_eq!(back, mu);
    }

    #[test]
    fn mixing_examples() {
        let mu = line(&[(0.0, 1.0)]);
        let nu = line(&[(1.0, 1.0)]);
        assert_eq!(mu.mix(&nu, 1.0).unwrap(), mu);
        assert_eq!(mu.mix(&nu, 0.0).unwrap(), nu);
        assert_eq!(mu.mix(&nu, 0.5).unwrap(), line(&[(0.0, 0.5), (1.0, 0.5)]));
        assert!(mu.mix(&nu, 1.5).is_err());
    }

    #[test]
    fn dl_examples() {
        let d0 = line(&[(0.0, 1.0)]);
        let d1 = line(&[(1.0, 1.0)]);
        assert_eq!(d0.dl(&d1).unwrap(), 1.0);
        assert_eq!(d0.dl(&d0).unwrap(), 0.0);
        // the only 2x1 plan moves both halves by 1/2
        let coin = line(&[(0.0, 0.5), (1.0, 0.5)]);
        let mid = line(&[(0.5, 1.0)]);
        assert_eq!(coin.dl(&mid).unwrap(), 0.5);
        assert!((coin.dl_transport(&mid).unwrap() - 0.5).abs() < 1e-12);
        let half = line(&[(0.0, 0.5)]);
        assert!(matches!(half.dl(&d0), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn dl_in_the_plane() {
        let a = DiscreteMeasure::new(2, [(vec![0.0, 0.0], 0.5), (vec![1.0, 0.0], 0.5)]).unwrap();
        let b = DiscreteMeasure::new(2, [(vec![0.0, 1.0], 0.5), (vec![1.0, 1.0], 0.5)]).unwrap();
        assert!((a.dl(&b).unwrap() - 1.0).abs() < 1e-12);
        let c = DiscreteMeasure::dirac(vec![3.0, 4.0]).unwrap();
        let o = DiscreteMeasure::dirac(vec![0.0, 0.0]).unwrap();
        assert!((o.dl(&c).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn tv_examples() {
        let d0 = line(&[(0.0, 1.0)]);
        let d1 = line(&[(1.0, 1.0)]);
        assert_eq!(d0.tv(&d1).unwrap(), 1.0);
        assert_eq!(d0.tv(&d0).unwrap(), 0.0);
        // subsets of {0,1}: {} 0, {0} 1/4, {1} 1/4, {0,1} 0
        let a = line(&[(0.0, 0.5), (1.0, 0.5)]);
        let b = line(&[(0.0, 0.25), (1.0, 0.75)]);
        assert_eq!(a.tv(&b).unwrap(), 0.25);
        assert_eq!(b.tv(&a).unwrap(), 0.25);
    }

    #[test]
    fn box_mass_examples() {
        let d0 = line(&[(0.0, 1.0)]);
        assert_eq!(d0.box_mass(&Aabb::interval(0.0, 1.0).unwrap()), 1.0);
        assert_eq!(d0.box_mass(&Aabb::interval(1.0, 2.0).unwrap()), 0.0);
        // half-open: right endpoint excluded
        assert_eq!(d0.box_mass(&Aabb::interval(-1.0, 0.0).unwrap()), 0.0);
    }

    #[test]
    fn csv_and_json_round_trip() {
        let m = DiscreteMeasure::new(2, [(vec![0.5, -1.0], 0.25), (vec![2.0, 3.0], 0.75)]).unwrap();
        assert_eq!(DiscreteMeasure::from_csv(&m.to_csv()).unwrap(), m);
        assert_eq!(DiscreteMeasure::from_json(&m.to_json()).unwrap(), m);
        assert!(m.to_csv().starts_with("x1,x2,weight\n"));
        assert!(DiscreteMeasure::from_csv("x1,w\n1,2\n").is_err());
    }
}
