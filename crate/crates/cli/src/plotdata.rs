use std::fmt::Write as _;
use std::path::PathBuf;

use crate::csv::{number, read_series};
use crate::error::{CliError, CliResult};

/// Long-format merge of `t,value` files; each file's stem labels its rows.
pub fn plotdata(inputs: &[PathBuf]) -> CliResult<String> {
    if inputs.is_empty() {
        return Err(CliError::Config("plotdata needs at least one input".into()));
    }
    let mut out = String::from("series,t,value\n");
    for path in inputs {
        let label = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| CliError::Config(format!("cannot label {}", path.display())))?;
        if label.contains(',') {
            return Err(CliError::Config(format!("series label `{label}` contains a comma")));
        }
        for (t, v) in read_series(path)? {
            let _ = writeln!(out, "{label},{},{}", number(t), number(v));
        }
    }
    Ok(out)
}
