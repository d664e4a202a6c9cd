//! `t,value` path files and the long `series,t,value` format.

use std::fmt::Write as _;
use std::path::Path;

use flevy::SamplePath;

use crate::error::{CliError, CliResult};

pub fn number(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn path_to_csv(path: &SamplePath) -> String {
    let mut s = String::from("t,value\n");
    for (i, v) in path.values().iter().enumerate() {
        let _ = writeln!(s, "{},{}", number(path.time(i)), number(*v));
    }
    s
}

pub fn write_file(out: &Path, text: &str) -> CliResult<()> {
    std::fs::write(out, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))
}

/// Rows of a `t,value` file.
pub fn read_series(path: &Path) -> CliResult<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_series(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_series(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let mut lines = text.lines();
    match lines.next().map(str::trim) {
        Some("t,value") => {}
        other => return Err(format!("expected header `t,value`, found {other:?}")),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let mut cols = line.split(',');
            let (Some(t), Some(v), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(format!("line {}: expected two columns", i + 2));
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("line {}: cannot parse `{}`", i + 2, s.trim()))
            };
            Ok((parse(t)?, parse(v)?))
        })
        .collect()
}
