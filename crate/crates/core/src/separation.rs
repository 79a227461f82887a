//! Separation checks on hull images and the search for separated sub-systems.
//!
//! Every check works with images `f_i(K)` of a box `K` containing the
//! attractor. Disjoint images prove strong separation, overlapping ones
//! usually prove nothing, so the answers are tri-state.

use serde::{Serialize, Serializer};

use crate::ifs::{all_words, Aabb, Similitude, SubWifs, Wifs, Word};
use crate::{Error, Result};

/// Gaps at or below this are treated as contact.
pub const SEPARATION_GUARD: f64 = 1e-12;
/// Per-coordinate slack for `∪ f_i(K) ⊆ K`.
pub const INVARIANCE_SLACK: f64 = 1e-10;
/// Selections are enumerated exhaustively up to this many words per level.
pub const EXHAUSTIVE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    #[serde(rename = "SSC")]
    Ssc,
    #[serde(rename = "OSC")]
    Osc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Satisfied,
    Violated,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Indices of two maps whose hull images meet.
    Overlap(usize, usize),
    /// Verified pairwise disjoint images.
    Disjoint(Vec<Aabb>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationReport {
    pub condition: Condition,
    pub status: Status,
    /// Smallest distance between two hull images; `null` in JSON when there
    /// is no pair.
    #[serde(serialize_with = "finite_or_null")]
    pub min_gap: f64,
    pub witness: Option<Witness>,
    #[serde(skip)]
    pub images: Vec<Aabb>,
}

fn finite_or_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

impl SeparationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn hull_images(maps: &[Similitude], k: &Aabb) -> Result<Vec<Aabb>> {
    let mut images = Vec::with_capacity(maps.len());
    for (i, m) in maps.iter().enumerate() {
        if m.dim() != k.dim() {
            return Err(Error::DimensionError {
                expected: k.dim(),
                got: m.dim(),
            });
        }
        let img = m.image_box(k);
        if !img.is_within(k, INVARIANCE_SLACK) {
            return Err(Error::InvalidInvariantSet(format!(
                "image of map {i} {:?}..{:?} leaves {:?}..{:?}",
                img.lo, img.hi, k.lo, k.hi
            )));
        }
        images.push(img);
    }
    Ok(images)
}

/// Smallest pairwise gap and the first pair at or below the guard band.
fn scan_pairs(images: &[Aabb]) -> (f64, Option<(usize, usize)>) {
    let mut min_gap = f64::INFINITY;
    let mut first = None;
    for i in 0..images.len() {
        for j in i + 1..images.len() {
            let gap = images[i].distance(&images[j]);
            min_gap = min_gap.min(gap);
            if first.is_none() && gap <= SEPARATION_GUARD {
                first = Some((i, j));
            }
        }
    }
    (min_gap, first)
}

/// Strong separation check with `hull_is_tight = false`.
pub fn check_ssc(maps: &[Similitude], k: &Aabb) -> Result<SeparationReport> {
    check_ssc_with(maps, k, false)
}

/// Strong separation check on the images of `k`.
///
/// `hull_is_tight` asserts that `k` is the exact hull of the attractor; only
/// then may overlapping images of orientation-preserving maps on the line be
/// reported as `Violated`.
pub fn check_ssc_with(maps: &[Similitude], k: &Aabb, hull_is_tight: bool) -> Result<SeparationReport> {
    let images = hull_images(maps, k)?;
    let (min_gap, first_contact) = scan_pairs(&images);
    let Some((i, j)) = first_contact else {
        return Ok(SeparationReport {
            condition: Condition::Ssc,
            status: Status::Satisfied,
            min_gap,
            witness: Some(Witness::Disjoint(images.clone())),
            images,
        });
    };
    let violated = hull_is_tight
        && k.dim() == 1
        && maps[i].preserves_orientation_1d()
        && maps[j].preserves_orientation_1d()
        && images[i].overlap_lengths(&images[j])[0] > SEPARATION_GUARD;
    Ok(SeparationReport {
        condition: Condition::Ssc,
        status: if violated { Status::Violated } else { Status::Unknown },
        min_gap: 0.0,
        witness: Some(Witness::Overlap(i, j)),
        images,
    })
}

/// Sufficient conditions for the open set condition.
///
/// Satisfied when SSC holds, or when all maps carry boxes to boxes and the
/// open images of `int K` are pairwise disjoint (touching faces allowed).
/// Never reports `Violated`.
pub fn check_osc_sufficient(maps: &[Similitude], k: &Aabb) -> Result<SeparationReport> {
    let ssc = check_ssc(maps, k)?;
    if ssc.status == Status::Satisfied {
        return Ok(SeparationReport {
            condition: Condition::Osc,
            ..ssc
        });
    }
    let images = ssc.images;
    let (min_gap, _) = scan_pairs(&images);
    let open_k = k.lo.iter().zip(&k.hi).all(|(l, h)| h - l > SEPARATION_GUARD);
    let boxes_map_to_boxes = maps.iter().all(Similitude::is_axis_aligned);
    let mut clash = None;
    'outer: for i in 0..images.len() {
        for j in i + 1..images.len() {
            // open boxes are disjoint iff some coordinate overlap is not positive
            let disjoint = images[i]
                .overlap_lengths(&images[j])
                .iter()
                .any(|&len| len <= SEPARATION_GUARD);
            if !disjoint {
                clash = Some((i, j));
                break 'outer;
            }
        }
    }
    let satisfied = open_k && boxes_map_to_boxes && clash.is_none();
    Ok(SeparationReport {
        condition: Condition::Osc,
        status: if satisfied { Status::Satisfied } else { Status::Unknown },
        min_gap,
        witness: if satisfied {
            Some(Witness::Disjoint(images.clone()))
        } else {
            clash.map(|(i, j)| Witness::Overlap(i, j))
        },
        images,
    })
}

/// Lexicographic `k`-combinations of `0..n`.
struct Combinations {
    idx: Vec<usize>,
    n: usize,
    done: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Self {
            idx: (0..k).collect(),
            n,
            done: k > n,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Searches levels `1..=n_max` for a strongly separated sub-system with
/// suffix `suffix`, spending at most `budget` candidate checks. Returns the
/// result of the first level that has one.
pub fn search_separated_sub_ifs(
    wifs: &Wifs,
    suffix: &Word,
    n_max: usize,
    budget: usize,
) -> Result<Option<SubWifs>> {
    if n_max == 0 || budget == 0 {
        return Err(Error::InvalidParameter("n_max and budget must be >= 1".into()));
    }
    let mut remaining = budget;
    for level in 1..=n_max {
        match search_level(wifs, suffix, level, &mut remaining)? {
            LevelSearch::Found(sub) => return Ok(Some(sub)),
            LevelSearch::OutOfBudget => return Ok(None),
            LevelSearch::NoCandidates => {}
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub enum LevelSearch {
    Found(SubWifs),
    /// `Λ^n` has no non-empty strict subset (a single map).
    NoCandidates,
    OutOfBudget,
}

/// Largest separated selection at one level.
///
/// Up to [`EXHAUSTIVE_LIMIT`] words every strict subset is tried, largest
/// first and lexicographically within a size. Beyond that words are added
/// greedily by decreasing weight `ρ_{ηξ}`. Each candidate subset (or each
/// word, when greedy) costs one unit of `remaining`.
pub fn search_level(wifs: &Wifs, suffix: &Word, level: usize, remaining: &mut usize) -> Result<LevelSearch> {
    // validates the suffix
    wifs.compose_word(suffix)?;
    let count = (wifs.len() as f64).powi(level as i32);
    if count < 2.0 {
        return Ok(LevelSearch::NoCandidates);
    }
    if count > *remaining as f64 {
        return Ok(LevelSearch::OutOfBudget);
    }
    let k = wifs.attractor_hull();
    let words = all_words(wifs.len(), level);
    let images = words
        .iter()
        .map(|w| Ok(wifs.compose_word(&w.concat(suffix))?.image_box(&k)))
        .collect::<Result<Vec<Aabb>>>()?;
    let separated = |a: usize, b: usize| images[a].distance(&images[b]) > SEPARATION_GUARD;

    let chosen = if words.len() <= EXHAUSTIVE_LIMIT {
        let mut found = None;
        'sizes: for size in (1..words.len()).rev() {
            for combo in Combinations::new(words.len(), size) {
                if *remaining == 0 {
                    return Ok(LevelSearch::OutOfBudget);
                }
                *remaining -= 1;
                let ok = combo
                    .iter()
                    .enumerate()
                    .all(|(p, &a)| combo[p + 1..].iter().all(|&b| separated(a, b)));
                if ok {
                    found = Some(combo);
                    break 'sizes;
                }
            }
        }
        // singletons are always separated, so this is reached with a result
        found.expect("a singleton selection is always separated")
    } else {
        let weights = words
            .iter()
            .map(|w| wifs.weight(&w.concat(suffix)))
            .collect::<Result<Vec<f64>>>()?;
        let mut order: Vec<usize> = (0..words.len()).collect();
        order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
        *remaining -= words.len();
        let mut chosen: Vec<usize> = Vec::new();
        for a in order {
            if chosen.iter().all(|&b| separated(a, b)) {
                chosen.push(a);
            }
        }
        if chosen.len() == words.len() {
            chosen.pop();
        }
        chosen.sort_unstable();
        chosen
    };

    let selection: Vec<Word> = chosen.iter().map(|&i| words[i].clone()).collect();
    let sub = wifs.sub_wifs(level, suffix, &selection)?;
    debug_assert_eq!(check_ssc(sub.maps(), &k)?.status, Status::Satisfied);
    Ok(LevelSearch::Found(sub))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn unit() -> Aabb {
        Aabb::interval(0.0, 1.0).unwrap()
    }

    #[test]
    fn quarter_maps_level_two_is_separated() {
        let ifs = Wifs::quarter_maps(0.2).unwrap();
        let maps: Vec<Similitude> = ["11", "21", "31"]
            .iter()
            .map(|s| ifs.compose_word(&w(s)).unwrap())
            .collect();
        let report = check_ssc(&maps, &unit()).unwrap();
        assert_eq!(report.status, Status::Satisfied);
        let expect = [(0.0, 0.0625), (0.2, 0.2625), (0.75, 0.8125)];
        for (img, (lo, hi)) in report.images.iter().zip(expect) {
            assert!((img.lo[0] - lo).abs() < 1e-14 && (img.hi[0] - hi).abs() < 1e-14);
        }
        assert_relative_eq!(report.min_gap, 0.1375, epsilon = 1e-14);
    }

    #[test]
    fn single_map_is_vacuous() {
        let report = check_ssc(&[Similitude::line(0.5, 0.0).unwrap()], &unit()).unwrap();
        assert_eq!(report.status, Status::Satisfied);
        assert!(report.min_gap > 0.0);
        assert!(report.to_json().contains("\"min_gap\":null"));
    }

    #[test]
    fn cantor_gap_is_a_third() {
        let c = Wifs::cantor();
        let report = check_ssc(c.maps(), &unit()).unwrap();
        assert_eq!(report.status, Status::Satisfied);
        assert_relative_eq!(report.min_gap, 1.0 / 3.0, epsilon = 1e-15);
        let json = report.to_json();
        assert!(json.contains("\"condition\":\"SSC\"") && json.contains("\"status\":\"Satisfied\""));
    }

    #[test]
    fn overlapping_images() {
        let ifs = Wifs::quarter_maps(0.2).unwrap();
        let report = check_ssc(ifs.maps(), &unit()).unwrap();
        assert_eq!(report.status, Status::Unknown);
        assert_eq!(report.min_gap, 0.0);
        assert_eq!(report.witness, Some(Witness::Overlap(0, 1)));
        let tight = check_ssc_with(ifs.maps(), &ifs.attractor_hull(), true).unwrap();
        assert_eq!(tight.status, Status::Violated);
    }

    #[test]
    fn non_invariant_box_is_rejected() {
        let ifs = Wifs::quarter_maps(0.2).unwrap();
        let small = Aabb::interval(0.0, 0.5).unwrap();
        assert!(matches!(check_ssc(ifs.maps(), &small), Err(Error::InvalidInvariantSet(_))));
        assert!(matches!(check_osc_sufficient(ifs.maps(), &small), Err(Error::InvalidInvariantSet(_))));
    }

    #[test]
    fn osc_examples() {
        let halves = Wifs::on_line_uniform(&[(0.5, 0.0), (0.5, 0.5)]).unwrap();
        let report = check_osc_sufficient(halves.maps(), &unit()).unwrap();
        assert_eq!((report.condition, report.status), (Condition::Osc, Status::Satisfied));
        assert_eq!(report.min_gap, 0.0);
        assert_eq!(check_ssc(halves.maps(), &unit()).unwrap().status, Status::Unknown);

        let c = Wifs::cantor();
        assert_eq!(check_osc_sufficient(c.maps(), &unit()).unwrap().status, Status::Satisfied);

        let q = Wifs::quarter_maps(0.2).unwrap();
        assert_eq!(check_osc_sufficient(q.maps(), &unit()).unwrap().status, Status::Unknown);
    }

    #[test]
    fn osc_in_the_plane() {
        // four quarter squares tile the unit square
        let maps: Vec<Similitude> = [(0.0, 0.0), (0.5, 0.0), (0.0, 0.5), (0.5, 0.5)]
            .iter()
            .map(|&(a, b)| Similitude::homothety(0.5, vec![a, b]).unwrap())
            .collect();
        let k = Aabb::cube(2, 0.0, 1.0).unwrap();
        assert_eq!(check_osc_sufficient(&maps, &k).unwrap().status, Status::Satisfied);
        assert_eq!(check_ssc(&maps, &k).unwrap().status, Status::Unknown);
    }

    #[test]
    fn combinations_are_lexicographic() {
        let all: Vec<Vec<usize>> = Combinations::new(4, 2).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(Combinations::new(3, 3).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn search_quarter_maps_with_suffix() {
        let ifs = Wifs::quarter_maps(0.2).unwrap();
        let sub = search_separated_sub_ifs(&ifs, &w("1"), 1, 1000).unwrap().unwrap();
        // Λ¹ itself is excluded, every pair of f_11, f_21, f_31 is separated
        assert_eq!(sub.level(), 1);
        assert_eq!(sub.selection(), &[w("1"), w("2")]);
        assert_eq!(check_ssc(sub.maps(), &unit()).unwrap().status, Status::Satisfied);
    }

    #[test]
    fn search_quarter_maps_level_one_without_suffix() {
        let ifs = Wifs::quarter_maps(0.2).unwrap();
        let sub = search_separated_sub_ifs(&ifs, &Word::empty(), 2, 1000).unwrap().unwrap();
        assert_eq!(sub.selection(), &[w("1"), w("3")]);
    }

    #[test]
    fn search_cantor_singleton() {
        let sub = search_separated_sub_ifs(&Wifs::cantor(), &Word::empty(), 1, 10).unwrap().unwrap();
        assert_eq!(sub.selection(), &[w("1")]);
    }

    #[test]
    fn search_identical_maps_never_pairs_words() {
        let twin = Wifs::on_line_uniform(&[(0.5, 0.0), (0.5, 0.0)]).unwrap();
        for n in 1..=3 {
            let found = search_separated_sub_ifs(&twin, &Word::empty(), n, 1000).unwrap();
            assert_eq!(found.map(|s| s.selection().len()), Some(1));
        }
    }

    #[test]
    fn search_budget_and_greedy() {
        let ifs = Wifs::quarter_maps(0.2).unwrap();
        assert!(search_separated_sub_ifs(&ifs, &Word::empty(), 1, 2).unwrap().is_none());
        assert!(search_separated_sub_ifs(&ifs, &Word::empty(), 0, 2).is_err());
        // 5 maps: 25 words at level 2 go through the greedy route
        let five = Wifs::on_line(
            &[(0.3, 0.0), (0.3, 0.1), (0.3, 0.35), (0.3, 0.5), (0.3, 0.7)],
            vec![0.3, 0.25, 0.2, 0.15, 0.1],
        )
        .unwrap();
        let k = five.attractor_hull();
        let mut budget = 10_000;
        let LevelSearch::Found(sub) = search_level(&five, &Word::empty(), 2, &mut budget).unwrap() else {
            panic!("greedy search must find a selection");
        };
        assert_eq!(budget, 10_000 - 25);
        assert!(sub.selection().len() >= 2 && sub.selection().len() < 25);
        // the heaviest word always goes in first
        assert!(sub.selection().contains(&w("11")));
        assert_eq!(check_ssc(sub.maps(), &k).unwrap().status, Status::Satisfied);
        let mut tiny = 3;
        assert_eq!(
            search_level(&five, &Word::empty(), 2, &mut tiny).unwrap(),
            LevelSearch::OutOfBudget
        );
        let single = Wifs::on_line(&[(0.5, 0.0)], vec![1.0]).unwrap();
        assert!(search_separated_sub_ifs(&single, &Word::empty(), 3, 100).unwrap().is_none());
    }
}
