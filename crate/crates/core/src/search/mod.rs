//! Exhaustive enumeration of ternary forms with bounded coefficients and
//! small discriminant.
//!
//! Variables are assigned to tree levels by a fixed order; `c_i` is the value
//! at level `i` (level 1 is scanned last). The five bottom levels are fixed
//! per job, the next three select the shard, and progress is checkpointed
//! after each completed level-`m` prefix.

mod checkpoint;
mod record;
mod run;
mod scan;

use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::algebra::monomial_count;
use crate::error::{Error, Result};

pub use checkpoint::{Checkpoint, CheckpointStatus};
pub use record::{merge_files, merge_records, parse_records, CurveRecord};
pub use run::{run_job, JobOutcome, RunContext};
pub use scan::{inner_scan, normalize_quartic, quartic_symmetries, verify_candidate, QuarticSymmetry};

/// Quartic variable order, top level first: a400, a310, a301, a220, a202,
/// a130, a040, a103, a004, a031, a013, a022, a211, a121, a112.
pub const QUARTIC_ORDER: [usize; 15] = [0, 1, 2, 3, 5, 6, 10, 9, 14, 11, 13, 12, 4, 7, 8];

/// Cubic variable order by ascending degree in the discriminant: a300, a030,
/// a003, a210, a201, a120, a102, a021, a012, a111.
pub const CUBIC_ORDER: [usize; 10] = [0, 6, 9, 1, 2, 3, 5, 7, 8, 4];

/// Number of bottom levels fixed by a job.
pub const JOB_LEVELS: usize = 5;
/// Number of levels above the job levels that determine the shard.
pub const SHARD_LEVELS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Monomial tree evaluation of the discriminant polynomial mod 2⁶⁴.
    Tree,
    /// Determinant evaluation per form, filtered modulo a Mersenne prime.
    Direct,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Tree => "tree",
            Engine::Direct => "direct",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(Engine::Tree),
            "direct" => Ok(Engine::Direct),
            _ => Err(Error::parse("engine", format!("unknown engine `{s}` (tree|direct)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub degree: u32,
    pub coeff_bound: i64,
    pub disc_bound: u64,
    pub engine: Engine,
    pub shard_count: u32,
    /// Completed level-`m` prefixes between checkpoints.
    pub checkpoint_every: u64,
    pub checkpoint_level: usize,
}

impl SearchConfig {
    pub fn new(degree: u32) -> Self {
        SearchConfig {
            degree,
            coeff_bound: 9,
            disc_bound: 10_000_000,
            engine: Engine::Tree,
            shard_count: 1,
            checkpoint_every: 64,
            checkpoint_level: if degree == 3 { 3 } else { 7 },
        }
    }

    pub fn layout(&self) -> Result<Layout> {
        Layout::for_degree(self.degree)
    }

    pub fn validate(&self) -> Result<()> {
        let layout = self.layout()?;
        if !(0..=1000).contains(&self.coeff_bound) {
            return Err(Error::range("coefficient bound", self.coeff_bound, "0..=1000"));
        }
        if self.disc_bound >= 1 << 63 {
            return Err(Error::range("discriminant bound", self.disc_bound, "< 2^63"));
        }
        if self.shard_count == 0 {
            return Err(Error::range("shard count", 0, ">= 1"));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::range("checkpoint interval", 0, ">= 1"));
        }
        let top = layout.levels() - JOB_LEVELS;
        if !(2..=top).contains(&self.checkpoint_level) {
            return Err(Error::range(
                "checkpoint level",
                self.checkpoint_level,
                format!("2..={top}"),
            ));
        }
        Ok(())
    }

    /// Canonical one-line description, stored (hashed) in checkpoints.
    pub fn echo(&self) -> String {
        format!(
            "degree={} coeff_bound={} disc_bound={} engine={} shards={} checkpoint_level={}",
            self.degree,
            self.coeff_bound,
            self.disc_bound,
            self.engine,
            self.shard_count,
            self.checkpoint_level
        )
    }

    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.echo().as_bytes()))
    }

    pub fn shard_key(&self, c_hi: i64, c_mid: i64, c_lo: i64) -> u32 {
        let w = 2 * self.coeff_bound + 1;
        (w * w * c_hi + w * c_mid + c_lo).rem_euclid(self.shard_count as i64) as u32
    }
}

/// Level structure of the search for one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub degree: u32,
    /// `order[i]` is the canonical coefficient index at level `i + 1`.
    pub order: Vec<usize>,
}

impl Layout {
    pub fn for_degree(d: u32) -> Result<Self> {
        let order = match d {
            3 => CUBIC_ORDER.to_vec(),
            4 => QUARTIC_ORDER.to_vec(),
            _ => return Err(Error::range("search degree", d, "3 or 4")),
        };
        debug_assert_eq!(order.len(), monomial_count(d));
        Ok(Layout { degree: d, order })
    }

    pub fn levels(&self) -> usize {
        self.order.len()
    }

    /// Levels fixed by the job, deepest first.
    pub fn job_levels(&self) -> std::ops::RangeInclusive<usize> {
        self.levels() - JOB_LEVELS + 1..=self.levels()
    }

    /// Levels whose values select the shard.
    pub fn shard_levels(&self) -> std::ops::Range<usize> {
        let top = self.levels() - JOB_LEVELS;
        top + 1 - SHARD_LEVELS..top + 1
    }

    /// Coefficient vector in canonical order from level values `c[1..=n]`
    /// (index 0 unused).
    pub fn coefficients(&self, c: &[i64]) -> Vec<i64> {
        let mut out = vec![0; self.levels()];
        for (i, &var) in self.order.iter().enumerate() {
            out[var] = c[i + 1];
        }
        out
    }
}

/// Fixed values `(c_n, c_{n−1}, …, c_{n−4})` of the bottom five levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SearchJob(pub [i64; JOB_LEVELS]);

impl SearchJob {
    pub fn validate(&self, degree: u32, bound: i64) -> Result<()> {
        let c = &self.0;
        let in_box = c.iter().all(|x| x.abs() <= bound);
        let ordered = degree != 4 || (0 <= c[0] && c[0] <= c[1] && c[1] <= c[2]);
        if in_box && ordered {
            Ok(())
        } else {
            Err(Error::range(
                "job",
                self,
                if degree == 4 {
                    format!("0 <= c15 <= c14 <= c13 <= {bound}, |c12|, |c11| <= {bound}")
                } else {
                    format!("all entries in [-{bound}, {bound}]")
                },
            ))
        }
    }
}

impl fmt::Display for SearchJob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", v.join(","))
    }
}

impl FromStr for SearchJob {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: Vec<i64> = s
            .split(',')
            .map(|x| x.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse("job", format!("bad job tuple `{s}`")))?;
        let arr: [i64; JOB_LEVELS] = v
            .try_into()
            .map_err(|_| Error::parse("job", format!("job tuple `{s}` needs {JOB_LEVELS} entries")))?;
        Ok(SearchJob(arr))
    }
}

/// Quartic jobs: `0 ≤ c15 ≤ c14 ≤ c13 ≤ B` and `c12, c11 ∈ [−B, B]`, in
/// lexicographic order.
pub fn enumerate_jobs(bound: i64) -> Vec<SearchJob> {
    enumerate_jobs_for(4, bound).expect("degree 4 is supported")
}

/// Jobs for either degree; cubic jobs range over the full box.
pub fn enumerate_jobs_for(degree: u32, bound: i64) -> Result<Vec<SearchJob>> {
    Layout::for_degree(degree)?;
    let b = bound.max(0);
    let mut out = Vec::new();
    let full = -b..=b;
    let top: Vec<[i64; 3]> = if degree == 4 {
        (0..=b)
            .flat_map(|x| (x..=b).flat_map(move |y| (y..=b).map(move |z| [x, y, z])))
            .collect()
    } else {
        full.clone()
            .flat_map(|x| full.clone().flat_map(move |y| (-b..=b).map(move |z| [x, y, z])))
            .collect()
    };
    for t in top {
        for c12 in full.clone() {
            for c11 in full.clone() {
                out.push(SearchJob([t[0], t[1], t[2], c12, c11]));
            }
        }
    }
    Ok(out)
}

/// `C(B+3, 3)·(2B+1)²` for quartics, `(2B+1)⁵` for cubics.
pub fn job_count(degree: u32, bound: i64) -> u64 {
    let b = bound.max(0) as u64;
    let w = 2 * b + 1;
    if degree == 4 {
        (b + 3) * (b + 2) * (b + 1) / 6 * w * w
    } else {
        w.pow(5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ExponentVector;

    #[test]
    fn job_counts() {
        assert_eq!(job_count(4, 9), 79_420);
        assert_eq!(enumerate_jobs(1).len(), 36);
        assert_eq!(enumerate_jobs(0), vec![SearchJob([0; 5])]);
        assert_eq!(enumerate_jobs(2).len() as u64, job_count(4, 2));
        assert_eq!(enumerate_jobs_for(3, 1).unwrap().len() as u64, job_count(3, 1));
        let jobs = enumerate_jobs(2);
        assert!(jobs.windows(2).all(|w| w[0] < w[1]));
        assert!(jobs.iter().all(|j| j.validate(4, 2).is_ok()));
    }

    #[test]
    fn quartic_order_names() {
        let names: Vec<String> = QUARTIC_ORDER
            .iter()
            .map(|&k| crate::algebra::exponents(4)[k].coefficient_name())
            .collect();
        assert_eq!(
            names.join(" "),
            "a400 a310 a301 a220 a202 a130 a040 a103 a004 a031 a013 a022 a211 a121 a112"
        );
        let cubic: Vec<String> = CUBIC_ORDER
            .iter()
            .map(|&k| crate::algebra::exponents(3)[k].coefficient_name())
            .collect();
        assert_eq!(cubic.join(" "), "a300 a030 a003 a210 a201 a120 a102 a021 a012 a111");
        assert_eq!(ExponentVector::new(1, 1, 2).index(), 8);
    }

    #[test]
    fn cubic_order_is_default_tree_order() {
        let p = crate::discriminant::disc_poly(3).unwrap();
        assert_eq!(crate::tree::default_order(&p), CUBIC_ORDER.to_vec());
    }

    #[test]
    fn layout_levels() {
        let l = Layout::for_degree(4).unwrap();
        assert_eq!(l.job_levels(), 11..=15);
        assert_eq!(l.shard_levels(), 8..11);
        let l = Layout::for_degree(3).unwrap();
        assert_eq!(l.job_levels(), 6..=10);
        assert_eq!(l.shard_levels(), 3..6);
        assert!(Layout::for_degree(5).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::new(4).validate().is_ok());
        assert!(SearchConfig::new(3).validate().is_ok());
        let mut c = SearchConfig::new(4);
        c.disc_bound = 1 << 63;
        assert!(c.validate().is_err());
        let mut c = SearchConfig::new(4);
        c.checkpoint_level = 11;
        assert!(c.validate().is_err());
        assert_ne!(SearchConfig::new(4).digest(), SearchConfig::new(3).digest());
    }

    #[test]
    fn shard_keys_partition_box() {
        let mut c = SearchConfig::new(4);
        c.coeff_bound = 1;
        c.shard_count = 8;
        let mut counts = [0u32; 8];
        for x in -1..=1 {
            for y in -1..=1 {
                for z in -1..=1 {
                    counts[c.shard_key(x, y, z) as usize] += 1;
                }
            }
        }
        assert_eq!(counts.iter().sum::<u32>(), 27);
    }

    #[test]
    fn job_parse_round_trip() {
        let j: SearchJob = "0,1,1,-1,0".parse().unwrap();
        assert_eq!(j, SearchJob([0, 1, 1, -1, 0]));
        assert_eq!(j.to_string().parse::<SearchJob>().unwrap(), j);
        assert!("1,2".parse::<SearchJob>().is_err());
        assert!(SearchJob([1, 0, 0, 0, 0]).validate(4, 1).is_err());
        assert!(SearchJob([1, 0, -1, 0, 0]).validate(3, 1).is_ok());
    }
}
