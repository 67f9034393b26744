use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use tropinit::dataset::Dataset;

use crate::error::{CliError, CliResult, Code};

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::new(Code::Io, format!("{}: {e}", path.display()))
}

pub fn require_input(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::new(Code::Io, format!("{}: input file not found", path.display())))
    }
}

/// Fails unless the parent directory of `path` already exists.
pub fn require_output(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() && !p.is_dir() => {
            Err(CliError::new(Code::Io, format!("{}: output directory does not exist", p.display())))
        }
        _ => Ok(()),
    }
}

pub fn require_outputs<'a>(paths: impl IntoIterator<Item = &'a Option<PathBuf>>) -> CliResult<()> {
    paths.into_iter().flatten().try_for_each(|p| require_output(p))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    require_input(path)?;
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn read_dataset(path: &Path) -> CliResult<(Dataset, bool)> {
    require_input(path)?;
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    Dataset::read_csv(BufReader::new(file)).map_err(|e| {
        let mut err = CliError::from(e);
        err.detail = format!("{}: {}", path.display(), err.detail);
        err
    })
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| io_error(p, e)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::new(Code::Io, e.to_string()))
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    emit(Some(path), bytes)
}

/// Pretty JSON of `value` with `"format_version": 1` prepended to the object.
pub fn versioned_json<T: Serialize>(value: &T) -> String {
    let mut map = serde_json::Map::new();
    map.insert("format_version".into(), 1.into());
    match serde_json::to_value(value).expect("value serializes") {
        serde_json::Value::Object(fields) => {
            for (k, v) in fields {
                if k != "format_version" {
                    map.insert(k, v);
                }
            }
        }
        other => {
            map.insert("value".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(map)).expect("json");
    s.push('\n');
    s
}
