//! Nontrivial zero tables.
//!
//! Files hold either bare ordinates (whitespace separated, any number per
//! line; each is a zero on the critical line with multiplicity one) or three
//! columns `beta gamma multiplicity`. Lines starting with `#` are comments.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub beta: f64,
    pub gamma: f64,
    pub multiplicity: u32,
}

impl ZeroRecord {
    pub fn critical(gamma: f64) -> Self {
        ZeroRecord { beta: 0.5, gamma, multiplicity: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroTable {
    zeros: Vec<ZeroRecord>,
    source_label: String,
}

const BUNDLED: &str = include_str!("../data/zeros_500.txt");

impl ZeroTable {
    /// Validates ordering and ranges.
    pub fn new(zeros: Vec<ZeroRecord>, source_label: impl Into<String>) -> Result<Self> {
        let mut previous = 0.0;
        for (i, z) in zeros.iter().enumerate() {
            if !(z.gamma.is_finite() && z.beta.is_finite()) {
                return Err(Error::invalid(format!("zero {i} is not finite")));
            }
            if !(z.beta > 0.0 && z.beta < 1.0) {
                return Err(Error::invalid(format!("zero {i}: beta = {} outside (0, 1)", z.beta)));
            }
            if z.multiplicity == 0 {
                return Err(Error::invalid(format!("zero {i}: multiplicity must be positive")));
            }
            if z.gamma <= previous {
                return Err(Error::Monotonicity {
                    path: PathBuf::from("<memory>"),
                    line: i + 1,
                    value: z.gamma,
                    previous,
                });
            }
            previous = z.gamma;
        }
        Ok(ZeroTable { zeros, source_label: source_label.into() })
    }

    pub fn empty() -> Self {
        ZeroTable { zeros: Vec::new(), source_label: "empty".into() }
    }

    /// The first 500 zeros on the critical line, shipped with the crate.
    pub fn bundled() -> Self {
        parse_zero_table(BUNDLED, Path::new("bundled:zeros_500.txt")).expect("bundled zero table is well formed")
    }

    pub fn zeros(&self) -> &[ZeroRecord] {
        &self.zeros
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// Height up to which the table is trusted to be complete.
    pub fn coverage(&self) -> f64 {
        self.zeros.last().map_or(0.0, |z| z.gamma)
    }

    /// Records with `|gamma - height| <= radius`.
    pub fn near(&self, height: f64, radius: f64) -> &[ZeroRecord] {
        let lo = self.zeros.partition_point(|z| z.gamma < height - radius);
        let hi = self.zeros.partition_point(|z| z.gamma <= height + radius);
        &self.zeros[lo..hi]
    }

    /// Merges two tables with disjoint ordinates.
    pub fn union(&self, other: &ZeroTable) -> Result<ZeroTable> {
        let mut all: Vec<ZeroRecord> = self.zeros.iter().chain(&other.zeros).copied().collect();
        all.sort_by(|a, b| a.gamma.total_cmp(&b.gamma));
        ZeroTable::new(all, format!("{} + {}", self.source_label, other.source_label))
    }
}

pub fn load_zero_table(path: impl AsRef<Path>) -> Result<ZeroTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_zero_table(&text, path)
}

fn looks_extended(tokens: &[&str]) -> bool {
    if tokens.len() != 3 {
        return false;
    }
    let beta = tokens[0].parse::<f64>();
    let mult = tokens[2].parse::<u32>();
    matches!((beta, mult), (Ok(b), Ok(_)) if b > 0.0 && b < 1.0)
}

pub fn parse_zero_table(text: &str, path: &Path) -> Result<ZeroTable> {
    let data_lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split_whitespace().collect()))
        .collect();
    let extended = data_lines.first().is_some_and(|(_, toks)| looks_extended(toks));

    let parse_err = |line: usize, msg: String| Error::Parse { path: path.to_path_buf(), line, msg };
    let mut zeros = Vec::new();
    let mut previous = 0.0;
    for (line, toks) in &data_lines {
        let records: Vec<ZeroRecord> = if extended {
            if toks.len() != 3 {
                return Err(parse_err(*line, format!("expected 3 columns, found {}", toks.len())));
            }
            let beta = toks[0].parse::<f64>().map_err(|e| parse_err(*line, format!("beta: {e}")))?;
            let gamma = toks[1].parse::<f64>().map_err(|e| parse_err(*line, format!("gamma: {e}")))?;
            let multiplicity = toks[2].parse::<u32>().map_err(|e| parse_err(*line, format!("multiplicity: {e}")))?;
            if !(beta > 0.0 && beta < 1.0) {
                return Err(parse_err(*line, format!("beta = {beta} outside (0, 1)")));
            }
            if multiplicity == 0 {
                return Err(parse_err(*line, "multiplicity must be positive".into()));
            }
            vec![ZeroRecord { beta, gamma, multiplicity }]
        } else {
            toks.iter()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map(ZeroRecord::critical)
                        .map_err(|e| parse_err(*line, format!("ordinate {tok:?}: {e}")))
                })
                .collect::<Result<_>>()?
        };
        for r in records {
            if !r.gamma.is_finite() || r.gamma <= 0.0 {
                return Err(parse_err(*line, format!("ordinate {} is not positive", r.gamma)));
            }
            if r.gamma <= previous {
                return Err(Error::Monotonicity { path: path.to_path_buf(), line: *line, value: r.gamma, previous });
            }
            previous = r.gamma;
            zeros.push(r);
        }
    }
    Ok(ZeroTable { zeros, source_label: path.display().to_string() })
}

/// Zeros with `beta > sigma` and `0 < gamma < t`.
pub fn zeros_in_box(table: &ZeroTable, sigma: f64, t: f64) -> Vec<ZeroRecord> {
    table.zeros.iter().filter(|z| z.beta > sigma && z.gamma > 0.0 && z.gamma < t).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ZeroTable> {
        parse_zero_table(text, Path::new("test.txt"))
    }

    #[test]
    fn single_line_of_ordinates() {
        let t = parse("14.134725 21.022040 25.010858\n").unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.zeros().iter().all(|z| z.beta == 0.5 && z.multiplicity == 1));
    }

    #[test]
    fn one_per_line_with_comments() {
        let t = parse("# header\n14.134725\n\n21.022040\n25.010858\n").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.coverage(), 25.010858);
    }

    #[test]
    fn empty_file() {
        let t = parse("").unwrap();
        assert!(t.is_empty());
        assert_eq!(t.coverage(), 0.0);
    }

    #[test]
    fn decreasing_rejected() {
        assert!(matches!(parse("5.0 3.0"), Err(Error::Monotonicity { line: 1, .. })));
        assert!(matches!(parse("5.0\n3.0\n"), Err(Error::Monotonicity { line: 2, .. })));
    }

    #[test]
    fn garbage_reports_line() {
        assert!(matches!(parse("14.1\n# c\nabc\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse("-1.0\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn extended_format() {
        let t = parse("0.75 10.0 1\n0.5 14.134725 2\n").unwrap();
        assert_eq!(t.zeros()[0], ZeroRecord { beta: 0.75, gamma: 10.0, multiplicity: 1 });
        assert_eq!(t.zeros()[1].multiplicity, 2);
        assert!(matches!(parse("0.75 10.0 1\n0.5 14.1\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn bundled_table_sane() {
        let t = ZeroTable::bundled();
        assert_eq!(t.len(), 500);
        assert!((t.zeros()[0].gamma - 14.134_725_141_734_7).abs() < 1e-12);
        assert!(t.coverage() > 811.0);
    }

    #[test]
    fn box_filter() {
        let syn = ZeroTable::new(vec![ZeroRecord { beta: 0.75, gamma: 10.0, multiplicity: 1 }], "syn").unwrap();
        assert_eq!(zeros_in_box(&syn, 0.5, 20.0).len(), 1);
        assert!(zeros_in_box(&syn, 0.8, 20.0).is_empty());
        assert!(zeros_in_box(&syn, 0.5, 10.0).is_empty());
        assert!(zeros_in_box(&ZeroTable::bundled(), 0.5, 20.0).is_empty());
    }

    #[test]
    fn near_window() {
        let t = ZeroTable::bundled();
        let n = t.near(21.0, 1.0);
        assert_eq!(n.len(), 1);
        assert!((n[0].gamma - 21.022).abs() < 1e-3);
    }
}
