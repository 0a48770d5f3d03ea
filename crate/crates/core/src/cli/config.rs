//! Flat `key = value` experiment configuration shared by every command.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fading::FadingModel;
use crate::metrics::ErrorModel;
use crate::usercount::UserCountModel;

/// Environment variable that supplies the default seed.
pub const SEED_ENV: &str = "MUDIV_SEED";
pub const DEFAULT_SEED: u64 = 1;

/// A list of numbers written either as `start:step:stop` (inclusive) or as
/// comma-separated values.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    text: String,
    values: Vec<f64>,
}

impl Grid {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn from_values(values: &[f64]) -> Self {
        let text = values.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        Self {
            text,
            values: values.to_vec(),
        }
    }
}

fn parse_number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse(format!("`{s}` is not a finite number")))
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = s.trim().to_string();
        let parts: Vec<&str> = text.split(':').collect();
        let values = match parts.as_slice() {
            [start, step, stop] => {
                let (a, h, b) = (parse_number(start)?, parse_number(step)?, parse_number(stop)?);
                if !(h > 0.0) || b < a {
                    return Err(Error::Parse(format!("range `{text}` needs step > 0 and stop ≥ start")));
                }
                let n = ((b - a) / h + 1e-9).floor() as usize;
                if n > 1_000_000 {
                    return Err(Error::Parse(format!("range `{text}` has too many points")));
                }
                (0..=n).map(|i| a + h * i as f64).collect()
            }
            [single] => single
                .split(',')
                .filter(|t| !t.trim().is_empty())
                .map(parse_number)
                .collect::<Result<Vec<_>>>()?,
            _ => return Err(Error::Parse(format!("cannot read `{text}` as a range or list"))),
        };
        if values.is_empty() {
            return Err(Error::Parse("empty grid".into()));
        }
        Ok(Self { text, values })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Settings for one run. Optional fields fall back to per-command defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Option<String>,
    pub fading: FadingModel,
    pub users: Vec<UserCountModel>,
    pub err: Option<ErrorModel>,
    pub snr_db: Option<Grid>,
    pub lambda_grid: Option<Grid>,
    pub x_grid: Option<Grid>,
    pub mc_trials: Option<u64>,
    pub seed: u64,
    pub workers: usize,
    pub n_max: u64,
    pub order: Option<usize>,
    pub tol: f64,
    pub window: (f64, f64),
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            fading: FadingModel::Rayleigh,
            users: Vec::new(),
            err: None,
            snr_db: None,
            lambda_grid: None,
            x_grid: None,
            mc_trials: None,
            seed: DEFAULT_SEED,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            n_max: 40,
            order: None,
            tol: 1e-9,
            window: (35.0, 45.0),
            out: None,
        }
    }
}

fn parse_count(s: &str) -> Result<u64> {
    let v = parse_number(s)?;
    if v < 0.0 || v.fract() != 0.0 || v > 1e15 {
        return Err(Error::Parse(format!("`{s}` is not a non-negative integer")));
    }
    Ok(v as u64)
}

fn parse_window(s: &str) -> Result<(f64, f64)> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("window `{s}` must look like lo:hi")))?;
    let (a, b) = (parse_number(a)?, parse_number(b)?);
    if b <= a {
        return Err(Error::Parse(format!("window `{s}` is empty")));
    }
    Ok((a, b))
}

fn parse_model<T: FromStr<Err = Error>>(s: &str) -> Result<T> {
    s.parse::<T>().map_err(|e| match e {
        Error::Parse(_) => e,
        other => Error::Parse(other.to_string()),
    })
}

impl ExperimentConfig {
    /// Configuration with the seed default taken from `MUDIV_SEED` when set.
    pub fn from_env() -> Result<Self> {
        let mut cfg = Self::default();
        if let Ok(v) = std::env::var(SEED_ENV) {
            cfg.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("{SEED_ENV}=`{v}` is not an unsigned integer")))?;
        }
        Ok(cfg)
    }

    /// Applies one setting. `users` appends; everything else replaces.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "command" => self.command = Some(value.to_string()),
            "fading" => self.fading = parse_model(value)?,
            "users" => self.users.push(parse_model(value)?),
            "err" => self.err = Some(parse_model(value)?),
            "snr_db" => self.snr_db = Some(value.parse()?),
            "lambda_grid" => self.lambda_grid = Some(value.parse()?),
            "x_grid" => self.x_grid = Some(value.parse()?),
            "mc_trials" => self.mc_trials = Some(parse_count(value)?),
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| Error::Parse(format!("seed `{value}` is not an unsigned integer")))?
            }
            "workers" => {
                let w = parse_count(value)?;
                if w == 0 {
                    return Err(Error::Parse("workers must be at least 1".into()));
                }
                self.workers = w as usize;
            }
            "n_max" => {
                let n = parse_count(value)?;
                if n < 2 {
                    return Err(Error::Parse("n_max must be at least 2".into()));
                }
                self.n_max = n;
            }
            "order" => self.order = Some(parse_count(value)? as usize),
            "tol" => {
                let t = parse_number(value)?;
                if !(t >= 0.0) {
                    return Err(Error::Parse("tol must be non-negative".into()));
                }
                self.tol = t;
            }
            "window" => self.window = parse_window(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(Error::Parse(format!("unknown configuration key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` document on top of `self`. Blank lines and
    /// lines starting with `#` are ignored.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        let mut file_users = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            let res = if key.trim() == "users" {
                parse_model(value.trim()).map(|u| file_users.push(u))
            } else {
                self.set(key, value)
            };
            res.map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
        }
        // `users` entries from one document replace earlier ones
        if !file_users.is_empty() {
            self.users = file_users;
        }
        Ok(())
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.merge_text(text)?;
        Ok(cfg)
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = &self.command {
            writeln!(f, "command = {c}")?;
        }
        writeln!(f, "fading = {}", self.fading)?;
        for u in &self.users {
            writeln!(f, "users = {u}")?;
        }
        if let Some(e) = &self.err {
            writeln!(f, "err = {e}")?;
        }
        if let Some(g) = &self.snr_db {
            writeln!(f, "snr_db = {g}")?;
        }
        if let Some(g) = &self.lambda_grid {
            writeln!(f, "lambda_grid = {g}")?;
        }
        if let Some(g) = &self.x_grid {
            writeln!(f, "x_grid = {g}")?;
        }
        if let Some(t) = self.mc_trials {
            writeln!(f, "mc_trials = {t}")?;
        }
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "workers = {}", self.workers)?;
        writeln!(f, "n_max = {}", self.n_max)?;
        if let Some(o) = self.order {
            writeln!(f, "order = {o}")?;
        }
        writeln!(f, "tol = {:e}", self.tol)?;
        writeln!(f, "window = {}:{}", self.window.0, self.window.1)?;
        if let Some(o) = &self.out {
            writeln!(f, "out = {}", o.display())?;
        }
        Ok(())
    }
}
