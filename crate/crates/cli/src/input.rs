use std::fs;
use std::path::Path;

use qdim_core::{DiscreteMeasure, Wifs, Word};

use crate::error::{CliError, CliResult, Field};

fn read(field: &str, path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::invalid(field, format!("cannot read {}: {e}", path.display())))
}

pub fn load_wifs(field: &str, path: &Path) -> CliResult<Wifs> {
    Wifs::from_json(&read(field, path)?).field(field)
}

/// Reads a measure as JSON atoms when the file ends in `.json`, CSV otherwise.
pub fn load_measure(field: &str, path: &Path) -> CliResult<DiscreteMeasure> {
    let text = read(field, path)?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        DiscreteMeasure::from_json(&text).field(field)
    } else {
        DiscreteMeasure::from_csv(&text).field(field)
    }
}

pub fn parse_words(field: &str, raw: &[String]) -> CliResult<Vec<Word>> {
    raw.iter()
        .map(|w| w.parse::<Word>().map_err(|e| CliError::invalid(field, e)))
        .collect()
}

pub fn parse_word(field: &str, raw: Option<&str>) -> CliResult<Word> {
    match raw {
        None => Ok(Word::empty()),
        Some(w) => w.parse().map_err(|e| CliError::invalid(field, e)),
    }
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
