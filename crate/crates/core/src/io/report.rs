//! CSV tables and JSON summaries.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// One header row (from the field names of `R`) followed by one row per item.
pub fn write_csv<R: Serialize>(path: impl AsRef<Path>, rows: &[R]) -> Result<()> {
    let mut w = csv::Writer::from_path(path.as_ref()).map_err(csv_error)?;
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string<R: Serialize>(rows: &[R]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("csv: {other:?}")),
    }
}
