use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{CliError, Result};

pub type Sink = csv::Writer<Box<dyn Write>>;

/// CSV writer on `path`, or stdout when `path` is `None`.
pub fn csv_sink(path: Option<&Path>) -> Result<Sink> {
    let w: Box<dyn Write> = match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|source| CliError::Io { path: p.into(), source })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    Ok(csv::Writer::from_writer(w))
}

/// Shortest round-trip formatting, so reruns are byte-identical. Exponent
/// form outside [1e-4, 1e15).
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn finish(mut w: Sink) -> Result<()> {
    w.flush().map_err(|source| CliError::Io { path: "<output>".into(), source })
}
