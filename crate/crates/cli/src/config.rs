//! Flat key-value parameters shared by every subcommand.
//!
//! A TOML file supplies defaults; command-line flags override it key by key.
//! A manifest written next to an output can be passed back as the file, in
//! which case its `config` table is used.

use std::path::{Path, PathBuf};

use clap::Args;
use etadense::eta::QuadSpec;
use etadense::{EvalParams, ZeroTable};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Order of the iterated integral (1 to 3).
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// First height of a t-grid (also the hunt window start).
    #[arg(long)]
    pub t_start: Option<f64>,
    /// Last height of a t-grid (also the hunt window end).
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub t_step: Option<f64>,
    /// Dirichlet cutoffs X, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub xs: Option<Vec<f64>>,
    /// Upper height T of the mean-square average.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Target value, e.g. `1+1i`.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub n_search: Option<usize>,
    #[arg(long)]
    pub max_evaluations: Option<usize>,
    /// Polygon radii, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub radii: Option<Vec<f64>>,
    /// Polygon target sum, e.g. `0` or `0.5-1i`.
    #[arg(long, allow_hyphen_values = true)]
    pub z: Option<String>,
    /// Build the torus point for `a` from a prime window instead of solving
    /// a single polygon.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub construct: Option<bool>,
    #[arg(long)]
    pub sieve_limit: Option<u64>,
    /// Zero table file, or `bundled` for the built-in first 500 ordinates.
    #[arg(long)]
    pub zero_table: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Absolute quadrature tolerance.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Tolerance of each zeta evaluation.
    #[arg(long)]
    pub zeta_tol: Option<f64>,
    #[arg(long)]
    pub em_terms: Option<usize>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

fn to_object(p: &Params) -> Map<String, Value> {
    match serde_json::to_value(p).expect("params serialize") {
        Value::Object(map) => map.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => unreachable!(),
    }
}

impl Params {
    /// Reads a flat TOML file, or the `config` table of a manifest.
    pub fn from_file(path: &Path) -> Result<Params, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let table: toml::Table =
            toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let table = match table.get("config") {
            Some(toml::Value::Table(inner)) => inner.clone(),
            _ => table,
        };
        // via JSON so that integer literals are accepted for real fields
        let value = serde_json::to_value(table).map_err(|e| CliError::Validation(e.to_string()))?;
        serde_json::from_value(value).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    /// Keys set in `over` replace those in `self`.
    pub fn merged(&self, over: &Params) -> Params {
        let mut base = to_object(self);
        base.extend(to_object(over));
        serde_json::from_value(Value::Object(base)).expect("merged params deserialize")
    }

    pub fn snapshot(&self) -> toml::Table {
        let value = Value::Object(to_object(self));
        serde_json::from_value(value).expect("params convert to toml")
    }

    pub fn eval_params(&self) -> Result<EvalParams, CliError> {
        let mut p = EvalParams::default();
        if let Some(tol) = self.zeta_tol {
            p.tol = tol;
        }
        if let Some(n) = self.em_terms {
            p.em_terms = n;
        }
        p.validate().map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(p)
    }

    pub fn quad(&self) -> Result<QuadSpec, CliError> {
        let mut q = QuadSpec { eval: self.eval_params()?, ..QuadSpec::default() };
        if let Some(tol) = self.abs_tol {
            if !(tol > 0.0) {
                return Err(CliError::Validation(format!("abs_tol must be positive, got {tol}")));
            }
            q.abs_tol = tol;
        }
        Ok(q)
    }

    /// The zero table; required whenever `sigma < 1`.
    pub fn zero_table(&self, sigma: f64, why: &str) -> Result<ZeroTable, CliError> {
        match self.zero_table.as_deref() {
            None if sigma < 1.0 => Err(CliError::Validation(format!("sigma = {sigma} < 1 requires zero_table: {why}"))),
            None => Ok(ZeroTable::empty()),
            Some("bundled") => Ok(ZeroTable::bundled()),
            Some(path) => Ok(etadense::load_zero_table(path)?),
        }
    }
}

pub fn require<T: Copy>(value: Option<T>, field: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Validation(format!("missing required parameter `{field}`")))
}

/// Parses `x`, `yi`, `x+yi`, `x-yi` (also with `j`).
pub fn parse_complex(text: &str, field: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Validation(format!("field `{field}`: cannot parse `{text}` as a complex number"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().ok().filter(|re| re.is_finite()).map(|re| Complex64::new(re, 0.0)).ok_or_else(bad);
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        let cases = [
            ("1+1i", (1.0, 1.0)),
            ("1+i", (1.0, 1.0)),
            ("-0.5-2i", (-0.5, -2.0)),
            ("3", (3.0, 0.0)),
            ("2i", (0.0, 2.0)),
            ("-i", (0.0, -1.0)),
            ("1e-3+2e-1j", (1e-3, 0.2)),
            (" 1 - 1i ", (1.0, -1.0)),
        ];
        for (text, (re, im)) in cases {
            assert_eq!(parse_complex(text, "a").unwrap(), Complex64::new(re, im), "{text}");
        }
        for text in ["", "1+", "abc", "1+2", "1++2i", "nan"] {
            let err = parse_complex(text, "a").unwrap_err().to_string();
            assert!(err.contains("`a`"), "{text}: {err}");
        }
    }

    #[test]
    fn overrides_win() {
        let file = Params { m: Some(1), sigma: Some(0.8), ..Params::default() };
        let cli = Params { sigma: Some(2.0), ..Params::default() };
        let p = file.merged(&cli);
        assert_eq!((p.m, p.sigma), (Some(1), Some(2.0)));
    }

    #[test]
    fn missing_table_is_named() {
        let err = Params::default().zero_table(0.5, "vertical quadrature").unwrap_err();
        assert!(err.to_string().contains("zero_table"));
        assert!(Params::default().zero_table(2.0, "").unwrap().is_empty());
    }
}
