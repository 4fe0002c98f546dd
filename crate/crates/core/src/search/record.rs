//! Result records (`Δ:c1,c2,…`, Δ with explicit sign) and merging.

use std::cmp::Ordering;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, IoContext, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CurveRecord {
    pub disc: BigInt,
    /// Coefficients in canonical exponent order.
    pub coeffs: Vec<i64>,
}

impl CurveRecord {
    /// Order by `|Δ|`, then coefficients, then sign.
    pub fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.disc
            .abs()
            .cmp(&other.disc.abs())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
            .then_with(|| self.disc.cmp(&other.disc))
    }

    pub fn degree(&self) -> Option<u32> {
        match self.coeffs.len() {
            10 => Some(3),
            15 => Some(4),
            _ => None,
        }
    }
}

impl fmt::Display for CurveRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.disc.is_positive() {
            write!(f, "+")?;
        }
        write!(f, "{}:", self.disc)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for CurveRecord {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (d, c) = s.trim().split_once(':').ok_or("missing `:`")?;
        let disc: BigInt = d.trim().parse().map_err(|_| format!("bad discriminant `{d}`"))?;
        if disc.is_zero() {
            return Err("zero discriminant".into());
        }
        let coeffs: Vec<i64> = c
            .split(',')
            .map(|x| x.trim().parse::<i64>().map_err(|_| format!("bad coefficient `{x}`")))
            .collect::<std::result::Result<_, _>>()?;
        let rec = CurveRecord { disc, coeffs };
        if rec.degree().is_none() {
            return Err(format!("expected 10 or 15 coefficients, found {}", rec.coeffs.len()));
        }
        Ok(rec)
    }
}

/// Parses a record file; `source` names it in error locations.
pub fn parse_records(text: &str, source: &str) -> Result<Vec<CurveRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.parse::<CurveRecord>()
                .map_err(|m| Error::parse(format!("{source}:{}", i + 1), m))
        })
        .collect()
}

/// Sorts by `(|Δ|, coefficients)` and removes exact duplicates.
pub fn merge_records(mut records: Vec<CurveRecord>) -> Vec<CurveRecord> {
    records.sort_by(CurveRecord::sort_key_cmp);
    records.dedup();
    records
}

/// Merges record files into `output`; returns the number of records written.
pub fn merge_files(inputs: &[PathBuf], output: &Path) -> Result<usize> {
    let mut all = Vec::new();
    for p in inputs {
        let text = std::fs::read_to_string(p).ctx(|| format!("reading {}", p.display()))?;
        all.extend(parse_records(&text, &p.display().to_string())?);
    }
    let merged = merge_records(all);
    let mut out = String::new();
    for r in &merged {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    std::fs::write(output, out).ctx(|| format!("writing {}", output.display()))?;
    Ok(merged.len())
}
