//! Readers for the JSONL files the CLI itself writes.

use std::fs;
use std::path::Path;

use levyd::measures::{Domain, Interval, Origin, PointMeasure, WeightedAtom};
use levyd::posterior::{ObservationSet, ObservedAtom};
use serde::Deserialize;
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomLine {
    replica: u64,
    k: Option<u32>,
    h: Option<u32>,
    location: Vec<f64>,
    jump: f64,
    origin: Origin,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CountLine {
    location: Vec<f64>,
    count: u64,
}

/// Non-blank lines as `(line number, parsed JSON)`.
fn json_lines(path: &Path) -> Result<Vec<(usize, Value)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(line).map_err(|e| CliError::parse(path, i + 1, e))?;
        out.push((i + 1, value));
    }
    Ok(out)
}

fn record_kind(value: &Value) -> Option<&str> {
    value.get("record").and_then(Value::as_str)
}

fn unit_cube(dim: usize) -> Result<Domain, CliError> {
    Ok(Domain::new(vec![Interval::unit(); dim])?)
}

/// Atoms of one replica of a `simulate` run.
pub fn read_prior_draw(path: &Path, replica: u64) -> Result<PointMeasure, CliError> {
    let mut atoms = Vec::new();
    let mut dim = None;
    let mut seen_header = false;
    for (line, value) in json_lines(path)? {
        match record_kind(&value) {
            Some("header") => {
                seen_header = true;
                continue;
            }
            Some(_) => continue,
            None => {}
        }
        let atom: AtomLine = serde_json::from_value(value).map_err(|e| CliError::parse(path, line, e))?;
        if *dim.get_or_insert(atom.location.len()) != atom.location.len() {
            return Err(CliError::parse(path, line, "location has a different dimension from earlier atoms"));
        }
        if atom.replica == replica {
            atoms.push(WeightedAtom {
                location: atom.location,
                jump: atom.jump,
                round_k: atom.k.unwrap_or(0),
                subround_h: atom.h.unwrap_or(0),
                origin: atom.origin,
            });
        }
    }
    if !seen_header {
        return Err(CliError::Usage(format!("{}: no header record; expected `levyd simulate` JSONL output", path.display())));
    }
    Ok(PointMeasure { domain: unit_cube(dim.unwrap_or(1))?, atoms })
}

pub fn read_observations(path: &Path) -> Result<ObservationSet, CliError> {
    let lines = json_lines(path)?;
    let Some(((first_line, header), rest)) = lines.split_first() else {
        return Err(CliError::Usage(format!("{}: observations file is empty", path.display())));
    };
    if record_kind(header) != Some("observations") {
        return Err(CliError::parse(path, *first_line, "expected an observations header record first"));
    }
    let draws = header
        .get("M")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::parse(path, *first_line, "header lacks an integer field M"))?;
    let mut atoms = Vec::with_capacity(rest.len());
    for (line, value) in rest {
        let row: CountLine = serde_json::from_value(value.clone()).map_err(|e| CliError::parse(path, *line, e))?;
        if row.count > draws {
            return Err(CliError::parse(path, *line, format!("count {} exceeds M = {draws}", row.count)));
        }
        if row.location.iter().any(|x| !(0.0..=1.0).contains(x)) {
            return Err(CliError::parse(path, *line, "location outside the unit cube"));
        }
        atoms.push(ObservedAtom { location: row.location, count: row.count });
    }
    Ok(ObservationSet::new(draws, atoms)?)
}
