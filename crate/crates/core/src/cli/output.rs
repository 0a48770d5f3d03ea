use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// Column order of every CSV the runner writes.
pub const CSV_HEADER: [&str; 8] = ["x", "value", "stderr", "method", "users", "fading", "err", "snr_db"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Closed,
    Quad,
    Mc,
    Asymptote,
    /// A fitted summary, e.g. a diversity slope.
    Fit,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Closed => "closed",
            Self::Quad => "quad",
            Self::Mc => "mc",
            Self::Asymptote => "asymptote",
            Self::Fit => "fit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub x: f64,
    pub value: f64,
    /// Present for Monte Carlo rows only.
    pub stderr: Option<f64>,
    pub method: Method,
    pub users: String,
    pub fading: String,
    pub err: String,
    pub snr_db: Option<f64>,
}

/// `{:.16e}`: 17 significant digits, independent of locale.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

impl CsvRow {
    fn fields(&self) -> [String; 8] {
        let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
        [
            format_number(self.x),
            format_number(self.value),
            opt(self.stderr),
            self.method.to_string(),
            self.users.clone(),
            self.fading.clone(),
            self.err.clone(),
            opt(self.snr_db),
        ]
    }
}

pub fn write_csv<W: Write>(out: W, rows: &[CsvRow]) -> Result<()> {
    let io = |e: csv::Error| Error::Instability(format!("writing CSV failed: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.write_record(row.fields()).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Instability(format!("writing CSV failed: {e}")))
}
