//! Shared fixtures for the integration tests: random systems, random
//! measures and an independent linear-programming oracle for transport.

#![allow(dead_code)]

use std::f64::consts::PI;

use qdim_core::{DiscreteMeasure, Similitude, Wifs};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Prints the one-line verdict for a criterion and returns `pass`.
pub fn verdict(id: u32, name: &str, pass: bool, detail: &str) -> bool {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} [{tag}] {name}: {detail}");
    pass
}

/// Random probability vector of length `n`, bounded away from zero.
pub fn random_probs(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

/// Line system with `n` maps, ratios drawn from `scales`, arbitrary
/// translations and random weights. No separation is implied.
pub fn random_line_wifs(rng: &mut ChaCha8Rng, n: usize, scales: std::ops::Range<f64>) -> Wifs {
    let maps: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(scales.clone()), rng.random_range(-1.0..1.0)))
        .collect();
    Wifs::on_line(&maps, random_probs(rng, n)).expect("valid random system")
}

/// Line system whose images of `[0, 1]` are pairwise disjoint and ordered,
/// with a random mix of orientation-preserving and reflecting maps.
pub fn random_ssc_line_wifs(rng: &mut ChaCha8Rng) -> Wifs {
    let n = rng.random_range(2..=5);
    let mut scales: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..0.6)).collect();
    let total: f64 = scales.iter().sum();
    let budget = rng.random_range(0.5..0.9);
    if total > budget {
        scales.iter_mut().for_each(|s| *s *= budget / total);
    }
    let slack = 1.0 - scales.iter().sum::<f64>();
    // n + 1 random gaps sharing the slack
    let gaps = random_probs(rng, n + 1);
    let mut left = gaps[0] * slack;
    let mut maps = Vec::with_capacity(n);
    for (i, &s) in scales.iter().enumerate() {
        let map = if rng.random_bool(0.3) {
            Similitude::line_reflected(s, left + s)
        } else {
            Similitude::line(s, left)
        };
        maps.push(map.expect("valid ratio"));
        left += s + gaps[i + 1] * slack;
    }
    Wifs::new(maps, random_probs(rng, n)).expect("valid random system")
}

/// Planar system with rotated maps, used where a non-trivial ambient
/// dimension matters.
pub fn random_plane_wifs(rng: &mut ChaCha8Rng) -> Wifs {
    let n = rng.random_range(2..=4);
    let maps = (0..n)
        .map(|_| {
            let angle = rng.random_range(0.0..2.0 * PI);
            let (sin, cos) = angle.sin_cos();
            let rot = if rng.random_bool(0.5) {
                vec![vec![cos, -sin], vec![sin, cos]]
            } else {
                vec![vec![cos, sin], vec![sin, -cos]]
            };
            let shift = vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            Similitude::new(rng.random_range(0.1..0.8), rot, shift).expect("orthonormal")
        })
        .collect();
    Wifs::new(maps, random_probs(rng, n)).expect("valid random system")
}

/// Probability measure with `1..=max_atoms` atoms at uniform positions in
/// `[-2, 2]^dim`.
pub fn random_measure(rng: &mut ChaCha8Rng, dim: usize, max_atoms: usize) -> DiscreteMeasure {
    let k = rng.random_range(1..=max_atoms);
    let probs = random_probs(rng, k);
    let atoms = probs.into_iter().map(|w| {
        let loc = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
        (loc, w)
    });
    DiscreteMeasure::new(dim, atoms).expect("valid random measure")
}

/// Probability measure on a coarse lattice of the line with dyadic weights,
/// so every subset mass is computed without rounding.
pub fn random_dyadic_measure(rng: &mut ChaCha8Rng, max_atoms: usize) -> DiscreteMeasure {
    const UNITS: u32 = 1 << 10;
    let k = rng.random_range(1..=max_atoms);
    let mut cuts: Vec<u32> = Vec::with_capacity(k + 1);
    cuts.push(0);
    while cuts.len() < k {
        let c = rng.random_range(1..UNITS);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.push(UNITS);
    cuts.sort_unstable();
    let atoms = cuts.windows(2).map(|w| {
        let x = f64::from(rng.random_range(0..10_u8)) * 0.5;
        (vec![x], f64::from(w[1] - w[0]) / f64::from(UNITS))
    });
    DiscreteMeasure::new(1, atoms).expect("valid dyadic measure")
}

/// Optimal transport cost between two discrete measures of equal mass,
/// solved as a plain linear program by a dense two-phase simplex.
pub fn lp_transport_cost(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let a: Vec<f64> = mu.atoms().iter().map(|t| t.weight).collect();
    let b: Vec<f64> = nu.atoms().iter().map(|t| t.weight).collect();
    let cost: Vec<Vec<f64>> = mu
        .atoms()
        .iter()
        .map(|s| {
            nu.atoms()
                .iter()
                .map(|t| {
                    s.location
                        .iter()
                        .zip(&t.location)
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum::<f64>()
                        .sqrt()
                })
                .collect()
        })
        .collect();
    Simplex::transportation(&a, &b, &cost).solve()
}

const PIVOT_EPS: f64 = 1e-12;

/// Dense tableau `A x = b, x >= 0` with one artificial column per row.
struct Simplex {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n_real: usize,
    cost: Vec<f64>,
}

impl Simplex {
    fn transportation(a: &[f64], b: &[f64], cost: &[Vec<f64>]) -> Self {
        let (p, q) = (a.len(), b.len());
        let n_real = p * q;
        // the last demand row is implied by the others
        let m = p + q - 1;
        let width = n_real + m + 1;
        let mut rows = vec![vec![0.0; width]; m];
        for i in 0..p {
            for j in 0..q {
                rows[i][i * q + j] = 1.0;
                if j + 1 < q {
                    rows[p + j][i * q + j] = 1.0;
                }
            }
            rows[i][width - 1] = a[i];
        }
        for j in 0..q - 1 {
            rows[p + j][width - 1] = b[j];
        }
        for (r, row) in rows.iter_mut().enumerate() {
            row[n_real + r] = 1.0;
        }
        Self {
            rows,
            basis: (n_real..n_real + m).collect(),
            n_real,
            cost: cost.iter().flatten().copied().collect(),
        }
    }

    fn rhs(&self, r: usize) -> f64 {
        *self.rows[r].last().expect("non-empty row")
    }

    fn pivot(&mut self, r: usize, k: usize) {
        let p = self.rows[r][k];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            let f = row[k];
            if i != r && f != 0.0 {
                row.iter_mut().zip(&pivot_row).for_each(|(v, p)| *v -= f * p);
            }
        }
        self.basis[r] = k;
    }

    /// Bland's rule on columns `0..columns` under the cost `c`.
    fn optimize(&mut self, c: &dyn Fn(usize) -> f64, columns: usize) {
        loop {
            let entering = (0..columns).find(|&k| {
                let reduced = c(k)
                    - self
                        .rows
                        .iter()
                        .zip(&self.basis)
                        .map(|(row, &bv)| c(bv) * row[k])
                        .sum::<f64>();
                reduced < -PIVOT_EPS
            });
            let Some(k) = entering else { return };
            let leaving = (0..self.rows.len())
                .filter(|&r| self.rows[r][k] > PIVOT_EPS)
                .min_by(|&r, &s| {
                    let (x, y) = (self.rhs(r) / self.rows[r][k], self.rhs(s) / self.rows[s][k]);
                    x.total_cmp(&y).then(self.basis[r].cmp(&self.basis[s]))
                })
                .expect("transportation problems are bounded");
            self.pivot(leaving, k);
        }
    }

    fn solve(mut self) -> f64 {
        let n_real = self.n_real;
        let total = n_real + self.rows.len();
        self.optimize(&|k| if k >= n_real { 1.0 } else { 0.0 }, total);
        let infeasibility: f64 = (0..self.rows.len())
            .filter(|&r| self.basis[r] >= n_real)
            .map(|r| self.rhs(r))
            .sum();
        assert!(infeasibility < 1e-9, "marginals do not balance");
        // drive zero-level artificials out where a real column allows it
        for r in 0..self.rows.len() {
            if self.basis[r] >= n_real {
                if let Some(k) = (0..n_real).find(|&k| self.rows[r][k].abs() > PIVOT_EPS) {
                    self.pivot(r, k);
                }
            }
        }
        let cost = self.cost.clone();
        self.optimize(&|k| if k < n_real { cost[k] } else { 0.0 }, n_real);
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, &bv)| bv < n_real)
            .map(|(r, &bv)| self.cost[bv] * self.rhs(r))
            .sum()
    }
}

/// `sup_A (mu(A) - nu(A))` by enumerating every subset of the joint support.
pub fn tv_by_enumeration(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> f64 {
    let mut support = mu.support();
    support.extend(nu.support());
    support.sort_by(|a, b| a[0].total_cmp(&b[0]));
    support.dedup();
    assert!(support.len() <= 20, "enumeration is exponential in the support size");
    let diff: Vec<f64> = support.iter().map(|x| mu.mass_at(x) - nu.mass_at(x)).collect();
    (0_u32..1 << support.len())
        .map(|mask| {
            diff.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, d)| d)
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}
