//! One function per subcommand. Each returns the text to emit.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};
use qdim_core::dimension::{dimension_at, DimensionResult};
use qdim_core::ifs::all_words;
use qdim_core::quantizer::{chaos_game, fit_dimension_on, optimize_codebook, FitOptions, SampleSet};
use qdim_core::separation::{check_osc_sufficient, check_ssc_with, search_level, LevelSearch};
use qdim_core::{Aabb, Similitude, Word};
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult, Field};
use crate::input::{load_measure, load_wifs, parse_word, parse_words};

#[derive(Debug, Args)]
pub struct DimArgs {
    /// WIFS description (JSON).
    #[arg(long)]
    pub wifs: PathBuf,
    /// Single order r; 0 selects the geometric-mean path.
    #[arg(long, conflicts_with = "r_grid", required_unless_present = "r_grid")]
    pub r: Option<f64>,
    /// Comma-separated, strictly increasing orders.
    #[arg(long, value_delimiter = ',')]
    pub r_grid: Option<Vec<f64>>,
}

/// Shortest round-trip text for `x`, in exponent form when tiny so residuals
/// stay readable.
fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn dim(args: &DimArgs) -> CliResult<String> {
    let wifs = load_wifs("--wifs", &args.wifs)?;
    let (field, grid) = match (&args.r, &args.r_grid) {
        (Some(r), _) => ("--r", vec![*r]),
        (None, Some(g)) => ("--r-grid", g.clone()),
        (None, None) => return Err(CliError::invalid("--r", "give --r or --r-grid")),
    };
    if grid.iter().any(|r| !r.is_finite() || *r < 0.0) {
        return Err(CliError::invalid(field, "orders must be finite and >= 0"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::invalid(field, "orders must be strictly increasing"));
    }
    let rows = grid
        .iter()
        .map(|&r| dimension_at(&wifs, r))
        .collect::<qdim_core::Result<Vec<DimensionResult>>>()?;
    let ambient = wifs.dim() as f64;
    let mut out = String::from("r,kappa_r,d_r,theta,residual,iterations\n");
    for row in rows {
        let d_r = row.kappa_r.min(ambient);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            num(row.r),
            num(row.kappa_r),
            num(d_r),
            num(row.theta),
            num(row.residual),
            row.iterations
        )
        .expect("string write");
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConditionArg {
    Ssc,
    Osc,
}

#[derive(Debug, Args)]
pub struct CheckSepArgs {
    #[arg(long)]
    pub wifs: PathBuf,
    /// Comma-separated words whose composed maps are checked.
    #[arg(long, value_delimiter = ',')]
    pub words: Option<Vec<String>>,
    /// Check every word of this length instead of an explicit list.
    #[arg(long, conflicts_with = "words")]
    pub level: Option<usize>,
    /// Word appended to every checked word.
    #[arg(long)]
    pub suffix: Option<String>,
    #[arg(long, value_enum, default_value = "ssc")]
    pub condition: ConditionArg,
    /// Compact set K as `lo,hi` per coordinate (`lo1,hi1,lo2,hi2,...`);
    /// defaults to the attractor hull.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub domain: Option<Vec<f64>>,
}

fn parse_domain(raw: &[f64], dim: usize) -> CliResult<Aabb> {
    if raw.len() != 2 * dim {
        return Err(CliError::invalid(
            "--domain",
            format!("expected {} numbers (lo,hi per coordinate), got {}", 2 * dim, raw.len()),
        ));
    }
    let lo = raw.iter().step_by(2).copied().collect();
    let hi = raw.iter().skip(1).step_by(2).copied().collect();
    Aabb::new(lo, hi).field("--domain")
}

pub fn check_sep(args: &CheckSepArgs) -> CliResult<String> {
    let wifs = load_wifs("--wifs", &args.wifs)?;
    let suffix = parse_word("--suffix", args.suffix.as_deref())?;
    wifs.compose_word(&suffix).field("--suffix")?;
    let words: Vec<Word> = match (&args.words, args.level) {
        (Some(raw), _) => parse_words("--words", raw)?,
        (None, Some(0)) => return Err(CliError::invalid("--level", "must be >= 1")),
        (None, Some(n)) => all_words(wifs.len(), n),
        (None, None) => all_words(wifs.len(), 1),
    };
    if words.is_empty() {
        return Err(CliError::invalid("--words", "no words given"));
    }
    let maps = words
        .iter()
        .map(|w| wifs.compose_word(&w.concat(&suffix)).field("--words"))
        .collect::<CliResult<Vec<Similitude>>>()?;
    let (k, tight) = match &args.domain {
        Some(raw) => (parse_domain(raw, wifs.dim())?, false),
        None => (wifs.attractor_hull(), true),
    };
    let report = match args.condition {
        ConditionArg::Ssc => check_ssc_with(&maps, &k, tight),
        ConditionArg::Osc => check_osc_sufficient(&maps, &k),
    };
    let report = report.map_err(|e| match e {
        qdim_core::Error::InvalidInvariantSet(_) => CliError::invalid("--domain", e),
        other => other.into(),
    })?;
    Ok(format!("{}\n", report.to_json()))
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub wifs: PathBuf,
    #[arg(long)]
    pub suffix: Option<String>,
    /// Deepest level to try.
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    /// Maximum number of candidate checks over all levels.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
}

#[derive(Serialize)]
struct LevelReport {
    level: usize,
    outcome: &'static str,
    selection: Vec<String>,
    probs: Vec<f64>,
}

/// Reports every level up to the first hit, so the caller can see which
/// levels had no separated selection.
pub fn subifs_search(args: &SearchArgs) -> CliResult<String> {
    let wifs = load_wifs("--wifs", &args.wifs)?;
    let suffix = parse_word("--suffix", args.suffix.as_deref())?;
    wifs.compose_word(&suffix).field("--suffix")?;
    if args.n_max == 0 {
        return Err(CliError::invalid("--n-max", "must be >= 1"));
    }
    if args.budget == 0 {
        return Err(CliError::invalid("--budget", "must be >= 1"));
    }
    let mut remaining = args.budget;
    let mut levels = Vec::new();
    let mut found = None;
    for level in 1..=args.n_max {
        let outcome = search_level(&wifs, &suffix, level, &mut remaining)?;
        let (tag, selection, probs) = match &outcome {
            LevelSearch::Found(sub) => (
                "found",
                sub.selection().iter().map(Word::to_string).collect(),
                sub.probs().to_vec(),
            ),
            LevelSearch::NoCandidates => ("no_candidates", vec![], vec![]),
            LevelSearch::OutOfBudget => ("out_of_budget", vec![], vec![]),
        };
        levels.push(LevelReport {
            level,
            outcome: tag,
            selection,
            probs,
        });
        match outcome {
            LevelSearch::Found(sub) => {
                found = Some(sub);
                break;
            }
            LevelSearch::OutOfBudget => break,
            LevelSearch::NoCandidates => {}
        }
    }
    let sub_wifs = match found {
        Some(sub) => serde_json::from_str(&sub.to_wifs()?.to_json()).expect("own json parses"),
        None => serde_json::Value::Null,
    };
    let result = json!({
        "suffix": suffix.to_string(),
        "found": !sub_wifs.is_null(),
        "levels": levels,
        "sub_wifs": sub_wifs,
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&result).expect("json")))
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub wifs: PathBuf,
    /// Number of chaos-game samples.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    /// Convolve the samples with this measure (CSV or JSON atoms).
    #[arg(long)]
    pub convolve_with: Option<PathBuf>,
    /// Mix the samples with those of a second WIFS.
    #[arg(long)]
    pub mix_with: Option<PathBuf>,
    /// Weight of the first measure in the mixture.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
}

impl SampleArgs {
    /// Samples of the configured measure, in a fixed order of derived seeds.
    fn draw(&self) -> CliResult<SampleSet> {
        let wifs = load_wifs("--wifs", &self.wifs)?;
        if self.samples == 0 {
            return Err(CliError::invalid("--samples", "must be >= 1"));
        }
        if self.restarts == 0 {
            return Err(CliError::invalid("--restarts", "must be >= 1"));
        }
        let mut samples = chaos_game(&wifs, self.samples, self.seed, self.burn_in)?;
        if let Some(path) = &self.mix_with {
            if !(0.0..=1.0).contains(&self.alpha) {
                return Err(CliError::invalid("--alpha", "must lie in [0, 1]"));
            }
            let other = load_wifs("--mix-with", path)?;
            if other.dim() != wifs.dim() {
                return Err(CliError::invalid("--mix-with", "ambient dimension differs from --wifs"));
            }
            let second = chaos_game(&other, self.samples, self.seed ^ 0x5EED_0001, self.burn_in)?;
            samples = samples.mix_with(&second, self.alpha, self.seed ^ 0x5EED_0002)?;
        }
        if let Some(path) = &self.convolve_with {
            let nu = load_measure("--convolve-with", path)?;
            if !nu.is_probability() {
                return Err(CliError::invalid("--convolve-with", "weights must sum to 1"));
            }
            samples = samples
                .convolve_with(&nu, self.seed ^ 0x5EED_0003)
                .field("--convolve-with")?;
        }
        Ok(samples)
    }

    fn fit_options(&self) -> FitOptions {
        FitOptions {
            restarts: self.restarts,
            burn_in: self.burn_in,
            ..FitOptions::default()
        }
    }
}

fn check_order(r: f64) -> CliResult<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(CliError::invalid("--r", "must be finite and >= 0"))
    }
}

#[derive(Debug, Args)]
pub struct QuantizeArgs {
    #[command(flatten)]
    pub sampling: SampleArgs,
    /// Codebook size.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: f64,
}

pub fn quantize(args: &QuantizeArgs) -> CliResult<String> {
    check_order(args.r)?;
    if args.n == 0 {
        return Err(CliError::invalid("--n", "must be >= 1"));
    }
    let samples = args.sampling.draw()?;
    let book = optimize_codebook(&samples, args.n, args.r, args.sampling.restarts, args.sampling.seed)?;
    let doc = json!({
        "n": args.n,
        "r": args.r,
        "distortion": book.distortion,
        "rounds": book.rounds,
        "restarts_used": book.restarts_used,
        "seed": args.sampling.seed,
        "codebook": book.points,
    });
    Ok(format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")))
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub sampling: SampleArgs,
    #[arg(long)]
    pub r: f64,
    /// Comma-separated, strictly increasing codebook sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
}

/// Per-size rows, then a `fit` row carrying the estimate and its interval.
pub fn estimate(args: &EstimateArgs) -> CliResult<String> {
    check_order(args.r)?;
    let n_list = &args.n_list;
    if n_list.len() < 2 {
        return Err(CliError::invalid("--n-list", "need at least two sizes"));
    }
    if n_list[0] == 0 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::invalid("--n-list", "sizes must be positive and strictly increasing"));
    }
    let largest = n_list[n_list.len() - 1];
    if largest.saturating_mul(100) > args.sampling.samples {
        return Err(CliError::invalid(
            "--samples",
            format!("need at least 100 samples per code point ({})", largest * 100),
        ));
    }
    let samples = args.sampling.draw()?;
    let fit = fit_dimension_on(&samples, args.r, n_list, args.sampling.seed, &args.sampling.fit_options())?;
    let mut out = String::from("n,r,distortion,log_n,neg_log_V,seed,estimate,ci_halfwidth\n");
    for row in &fit.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},,",
            row.n,
            num(fit.r),
            num(row.distortion),
            num(row.log_n),
            num(row.neg_log_v),
            row.seed
        )
        .expect("string write");
    }
    writeln!(
        out,
        "fit,{},,,,{},{},{}",
        num(fit.r),
        args.sampling.seed,
        num(fit.estimate),
        num(fit.ci_halfwidth)
    )
    .expect("string write");
    Ok(out)
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MeasureFormat {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum MeasureOp {
    /// Distribution of the sum of independent draws.
    Convolve {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// The measure `A -> mu(A + x)`.
    Translate {
        #[arg(long)]
        a: PathBuf,
        /// Comma-separated shift vector.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        by: Vec<f64>,
    },
    /// `alpha * a + (1 - alpha) * b`.
    Mix {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        alpha: f64,
    },
    /// Monge-Kantorovich distance.
    Dl {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Total variation distance.
    Tv {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[command(subcommand)]
    pub op: MeasureOp,
    /// Encoding of measure results.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: MeasureFormat,
}

pub fn measure(args: &MeasureArgs) -> CliResult<String> {
    let encode = |m: qdim_core::DiscreteMeasure| match args.format {
        MeasureFormat::Csv => m.to_csv(),
        MeasureFormat::Json => format!("{}\n", m.to_json()),
    };
    let pair = |a, b| -> CliResult<_> {
        let (a, b) = (load_measure("--a", a)?, load_measure("--b", b)?);
        if a.dim() != b.dim() {
            return Err(CliError::invalid("--b", "ambient dimension differs from --a"));
        }
        Ok((a, b))
    };
    Ok(match &args.op {
        MeasureOp::Convolve { a, b } => {
            let (a, b) = pair(a, b)?;
            encode(a.convolve(&b)?)
        }
        MeasureOp::Translate { a, by } => {
            let a = load_measure("--a", a)?;
            encode(a.translate(by).field("--by")?)
        }
        MeasureOp::Mix { a, b, alpha } => {
            let (a, b) = pair(a, b)?;
            encode(a.mix(&b, *alpha).field("--alpha")?)
        }
        MeasureOp::Dl { a, b } => {
            let (a, b) = pair(a, b)?;
            format!("{}\n", a.dl(&b).field("--b")?)
        }
        MeasureOp::Tv { a, b } => {
            let (a, b) = pair(a, b)?;
            format!("{}\n", a.tv(&b).field("--b")?)
        }
    })
}
