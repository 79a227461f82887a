//! Built-in self checks on systems with known answers.

use clap::Args;
use qdim_core::dimension::{d0_dimension, kappa_curve, similarity_dimension, solve_kappa};
use qdim_core::quantizer::{fit_dimension, FitOptions};
use qdim_core::separation::{check_osc_sufficient, check_ssc, search_separated_sub_ifs, Status};
use qdim_core::{Aabb, DiscreteMeasure, Wifs, Word};

use crate::error::{CliError, CliResult};

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Also fit D2 of the Cantor measure from samples (takes seconds).
    #[arg(long, requires = "seed")]
    pub empirical: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

struct Check {
    name: &'static str,
    outcome: Result<String, String>,
}

fn expect(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn words(list: &[&str]) -> Vec<Word> {
    list.iter().map(|w| w.parse().expect("literal word")).collect()
}

fn cantor_closed_form() -> Result<String, String> {
    let cantor = Wifs::cantor();
    let exact = 2f64.ln() / 3f64.ln();
    let mut worst: f64 = (d0_dimension(&cantor) - exact).abs();
    worst = worst.max((similarity_dimension(&cantor) - exact).abs());
    for r in [0.1, 0.5, 1.0, 2.0, 10.0] {
        let k = solve_kappa(&cantor, r).map_err(|e| e.to_string())?.kappa_r;
        worst = worst.max((k - exact).abs());
    }
    expect(worst < 1e-12, format!("max error {worst:.2e} against log2/log3"))
}

fn homogeneous_closed_form() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for n in 2..=6_usize {
        for s in [0.1, 0.3, 0.5, 0.7] {
            let maps: Vec<(f64, f64)> = (0..n).map(|i| (s, i as f64)).collect();
            let wifs = Wifs::on_line_uniform(&maps).map_err(|e| e.to_string())?;
            let exact = (n as f64).ln() / (1.0 / s).ln();
            for r in [0.1, 1.0, 2.0, 10.0] {
                let k = solve_kappa(&wifs, r).map_err(|e| e.to_string())?.kappa_r;
                worst = worst.max((k - exact).abs());
            }
        }
    }
    expect(worst < 1e-9, format!("20 systems x 4 orders, max error {worst:.2e}"))
}

fn uneven_curve() -> Result<String, String> {
    let wifs = Wifs::on_line(&[(0.5, 0.0), (0.25, 0.75)], vec![0.25, 0.75]).map_err(|e| e.to_string())?;
    let grid: Vec<f64> = (0..50).map(|i| 0.1 + 9.9 * f64::from(i) / 49.0).collect();
    let curve = kappa_curve(&wifs, &grid).map_err(|e| e.to_string())?;
    let limit = solve_kappa(&wifs, 1e-5).map_err(|e| e.to_string())?.kappa_r;
    let gap = (limit - d0_dimension(&wifs)).abs();
    expect(
        curve.monotone && gap < 1e-3,
        format!("monotone {} on 50 orders, |kappa(1e-5) - D0| = {gap:.2e}", curve.monotone),
    )
}

fn quarter_maps_example() -> Result<String, String> {
    let wifs = Wifs::quarter_maps(0.2).map_err(|e| e.to_string())?;
    let k = Aabb::interval(0.0, 1.0).map_err(|e| e.to_string())?;
    let maps: Vec<_> = words(&["11", "21", "31"])
        .iter()
        .map(|w| wifs.compose_word(w))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let level2 = check_ssc(&maps, &k).map_err(|e| e.to_string())?;
    let level1 = check_osc_sufficient(wifs.maps(), &k).map_err(|e| e.to_string())?;
    let expected = [(0.0, 0.0625), (0.2, 0.2625), (0.75, 0.8125)];
    let endpoint_error = level2
        .images
        .iter()
        .zip(expected)
        .map(|(b, (lo, hi))| (b.lo[0] - lo).abs().max((b.hi[0] - hi).abs()))
        .fold(0.0, f64::max);
    expect(
        level2.status == Status::Satisfied
            && endpoint_error < 1e-14
            && (level2.min_gap - 0.1375).abs() < 1e-14
            && level1.status == Status::Unknown,
        format!(
            "level 2 {:?} with gap {}, level 1 OSC {:?}",
            level2.status, level2.min_gap, level1.status
        ),
    )
}

fn sub_system_search() -> Result<String, String> {
    let wifs = Wifs::quarter_maps(0.2).map_err(|e| e.to_string())?;
    let found = search_separated_sub_ifs(&wifs, &Word::empty(), 2, 10_000).map_err(|e| e.to_string())?;
    match found {
        Some(sub) => {
            let names: Vec<String> = sub.selection().iter().map(Word::to_string).collect();
            expect(
                sub.level() == 1 && names == ["1", "3"],
                format!("level {} selection {{{}}}", sub.level(), names.join(",")),
            )
        }
        None => Err("no separated sub-system found".into()),
    }
}

fn transport_contraction() -> Result<String, String> {
    let err = |e: qdim_core::Error| e.to_string();
    let cantor = Wifs::cantor();
    let mu = DiscreteMeasure::new(1, [(vec![0.0], 0.5), (vec![1.0], 0.5)]).map_err(err)?;
    let nu = DiscreteMeasure::dirac(vec![1.0]).map_err(err)?;
    let before = mu.dl(&nu).map_err(err)?;
    let after = cantor
        .hutchinson_push(&mu)
        .map_err(err)?
        .dl(&cantor.hutchinson_push(&nu).map_err(err)?)
        .map_err(err)?;
    expect(
        (before - 0.5).abs() < 1e-15 && after <= before / 3.0 * (1.0 + 1e-9),
        format!("dL {before} -> {after} under the Cantor operator"),
    )
}

fn cantor_fit(seed: u64) -> Result<String, String> {
    let fit = fit_dimension(
        &Wifs::cantor(),
        2.0,
        &[16, 32, 64, 128, 256, 512],
        100_000,
        seed,
        &FitOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let err = (fit.estimate - 2f64.ln() / 3f64.ln()).abs();
    expect(err <= 0.08, format!("D2 estimate {:.4} (error {err:.3})", fit.estimate))
}

/// Prints one line per check and fails when any check does.
pub fn verify(args: &VerifyArgs) -> CliResult<String> {
    let mut checks = vec![
        Check {
            name: "cantor-closed-form",
            outcome: cantor_closed_form(),
        },
        Check {
            name: "homogeneous-closed-form",
            outcome: homogeneous_closed_form(),
        },
        Check {
            name: "uneven-curve",
            outcome: uneven_curve(),
        },
        Check {
            name: "quarter-maps-separation",
            outcome: quarter_maps_example(),
        },
        Check {
            name: "sub-system-search",
            outcome: sub_system_search(),
        },
        Check {
            name: "transport-contraction",
            outcome: transport_contraction(),
        },
    ];
    if let (true, Some(seed)) = (args.empirical, args.seed) {
        checks.push(Check {
            name: "cantor-empirical-d2",
            outcome: cantor_fit(seed),
        });
    }
    let mut out = String::new();
    let mut failed = 0;
    for check in &checks {
        let (tag, detail) = match &check.outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        out.push_str(&format!("{tag} {}: {detail}\n", check.name));
    }
    if failed > 0 {
        print!("{out}");
        return Err(CliError::Runtime(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(out)
}
