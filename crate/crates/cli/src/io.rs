use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nevlab::funcalg::parse_spec_str;
use nevlab::{Complex64, FuncExpr64};
use serde_json::Value;
use tempfile::NamedTempFile;

use crate::CliError;

/// Reads `arg` as a file when one exists at that path, otherwise returns it
/// verbatim as inline text.
pub fn load_text(arg: &str) -> Result<String, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
    } else {
        Ok(arg.to_owned())
    }
}

pub fn load_function(arg: &str) -> Result<FuncExpr64, CliError> {
    Ok(parse_spec_str(&load_text(arg)?)?)
}

pub fn load_json(arg: &str) -> Result<Value, CliError> {
    let text = load_text(arg)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("invalid JSON: {e}")))
}

/// Accepts `1`, `1,0`, `1 0` or `[1, 0]`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<&str> = t.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()).collect();
    let num = |p: &str| p.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or(format!("not a finite number: {p:?}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got {s:?}")),
    }
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    parse_complex(s).map(|c| (c.re, c.im))
}

/// Writes `text` to `path` through a sibling temporary file and a rename, or
/// to stdout when no path is given.
pub fn emit(text: &str, path: Option<&PathBuf>) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        let nl = if text.ends_with('\n') { "" } else { "\n" };
        return match out.write_all(text.as_bytes()).and_then(|()| out.write_all(nl.as_bytes())) {
            // a closed reader (e.g. `| head`) is not our failure
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                Err(CliError::Io { path: PathBuf::from("<stdout>"), source: e })
            }
            _ => Ok(()),
        };
    };
    let io_err = |source| CliError::Io { path: path.clone(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(text.as_bytes()).map_err(io_err)?;
    if !text.ends_with('\n') {
        tmp.write_all(b"\n").map_err(io_err)?;
    }
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
