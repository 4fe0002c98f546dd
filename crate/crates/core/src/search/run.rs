//! Running one job on one shard, with checkpoint and resume.

use std::fs::OpenOptions;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::checkpoint::{Checkpoint, CheckpointStatus};
use super::record::CurveRecord;
use super::scan::{inner_scan, verify_candidate};
use super::{Engine, Layout, SearchConfig, SearchJob, JOB_LEVELS};
use crate::discriminant::modp::{Modulus, M31, M61};
use crate::discriminant::DiscEvaluator;
use crate::error::{Error, IoContext, Result};
use crate::tree::MonomialTree;

/// Inputs of [`run_job`] beyond the job itself.
pub struct RunContext<'a> {
    /// Discriminant tree with nothing substituted; required by the tree
    /// engine.
    pub tree: Option<&'a MonomialTree>,
    pub output: &'a Path,
    pub checkpoint: Option<&'a Path>,
    /// Called after every checkpoint write; returning `true` stops the run
    /// with the checkpoint as its resumable state.
    pub stop: Option<&'a (dyn Fn(&Checkpoint) -> bool + Sync)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JobOutcome {
    pub forms: u64,
    pub hits: u64,
    pub complete: bool,
}

enum Flow {
    Continue,
    Stop,
}

/// Per-engine state: substitutions at levels `n−5..=2` and the final scan of
/// level 1.
trait Evaluator {
    fn push(&mut self, level: usize, c: i64) -> Result<()>;
    fn pop(&mut self, level: usize) -> Result<()>;
    /// Appends every record with `c_2..c_n` as in `assignment`.
    fn leaf(&mut self, assignment: &mut [i64], out: &mut Vec<CurveRecord>) -> Result<()>;
}

struct TreeEval<'a> {
    tree: MonomialTree,
    layout: &'a Layout,
    cfg: &'a SearchConfig,
    g: Vec<u64>,
    hits: Vec<(i64, i64)>,
}

impl Evaluator for TreeEval<'_> {
    fn push(&mut self, level: usize, c: i64) -> Result<()> {
        debug_assert_eq!(self.tree.cursor(), level);
        self.tree.push(c)
    }

    fn pop(&mut self, level: usize) -> Result<()> {
        self.tree.pop_to_level(level)
    }

    fn leaf(&mut self, assignment: &mut [i64], out: &mut Vec<CurveRecord>) -> Result<()> {
        self.tree.extract(&mut self.g)?;
        inner_scan(&self.g, self.cfg.coeff_bound, self.cfg.disc_bound, &mut self.hits);
        for &(c1, d) in &self.hits {
            assignment[1] = c1;
            let coeffs = self.layout.coefficients(assignment);
            if let Some(r) = verify_candidate(self.cfg.degree, &coeffs, d, self.cfg.disc_bound)? {
                out.push(r);
            }
        }
        Ok(())
    }
}

struct DirectEval<'a> {
    ev: &'static DiscEvaluator,
    layout: &'a Layout,
    cfg: &'a SearchConfig,
    scratch: Vec<u64>,
}

impl DirectEval<'_> {
    /// Whether the residue of `Δ` modulo `M::P` rules out `0 < |Δ| ≤ B_Δ`.
    fn rejects<M: Modulus>(&mut self, coeffs: &[i64]) -> bool {
        let r = M::signed(self.ev.eval_mod::<M>(coeffs, &mut self.scratch));
        r == 0 || r.unsigned_abs() > self.cfg.disc_bound
    }
}

impl Evaluator for DirectEval<'_> {
    fn push(&mut self, _level: usize, _c: i64) -> Result<()> {
        Ok(())
    }

    fn pop(&mut self, _level: usize) -> Result<()> {
        Ok(())
    }

    fn leaf(&mut self, assignment: &mut [i64], out: &mut Vec<CurveRecord>) -> Result<()> {
        let b = self.cfg.coeff_bound;
        let top = self.layout.order[0];
        let mut coeffs = self.layout.coefficients(assignment);
        for c1 in -b..=b {
            coeffs[top] = c1;
            let rejected = if self.cfg.disc_bound <= M31::P / 2 {
                self.rejects::<M31>(&coeffs)
            } else if self.cfg.disc_bound <= M61::P / 2 {
                self.rejects::<M61>(&coeffs)
            } else {
                false
            };
            if rejected {
                continue;
            }
            let exact = self.ev.eval(&coeffs)?;
            let Ok(d) = i64::try_from(&exact) else { continue };
            if let Some(rec) = verify_candidate(self.cfg.degree, &coeffs, d, self.cfg.disc_bound)? {
                out.push(rec);
            }
        }
        Ok(())
    }
}

struct Scan<'a, E> {
    cfg: &'a SearchConfig,
    layout: &'a Layout,
    shard: u32,
    eval: E,
    /// `c[level]`, index 0 unused.
    c: Vec<i64>,
    /// Prefix `c_{n−5}..c_m` to resume after, indexed like `c`.
    resume: Option<Vec<i64>>,
    writer: BufWriter<std::fs::File>,
    records: Vec<CurveRecord>,
    base: Checkpoint,
    ckpt_path: Option<&'a Path>,
    stop: Option<&'a (dyn Fn(&Checkpoint) -> bool + Sync)>,
    since_checkpoint: u64,
    forms: u64,
    hits: u64,
    bytes: u64,
}

impl<E: Evaluator> Scan<'_, E> {
    fn shard_ok(&self, level: usize, c: i64) -> bool {
        let shard_lo = self.layout.shard_levels().start;
        if level != shard_lo || self.cfg.shard_count == 1 {
            return true;
        }
        self.cfg.shard_key(self.c[shard_lo + 2], self.c[shard_lo + 1], c) == self.shard
    }

    fn checkpoint(&self, status: CheckpointStatus) -> Checkpoint {
        let n = self.layout.levels();
        let m = self.cfg.checkpoint_level;
        let assignment = self.c[m..=n].iter().rev().copied().collect();
        Checkpoint {
            status,
            assignment,
            forms: self.forms,
            hits: self.hits,
            output_bytes: self.bytes,
            ..self.base.clone()
        }
    }

    fn save(&mut self, status: CheckpointStatus) -> Result<Flow> {
        self.writer.flush().ctx(|| "flushing search output".into())?;
        let ck = self.checkpoint(status);
        if let Some(p) = self.ckpt_path {
            self.writer.get_ref().sync_data().ctx(|| "syncing search output".into())?;
            ck.write_atomic(p)?;
        }
        self.since_checkpoint = 0;
        Ok(match self.stop {
            Some(f) if status == CheckpointStatus::Running && f(&ck) => Flow::Stop,
            _ => Flow::Continue,
        })
    }

    fn descend(&mut self, level: usize) -> Result<Flow> {
        let b = self.cfg.coeff_bound;
        let m = self.cfg.checkpoint_level;
        let mut start = -b;
        if let Some(r) = &self.resume {
            if level >= m {
                start = r[level] + i64::from(level == m);
            }
            if level == m {
                self.resume = None;
            }
        }
        for c in start..=b {
            if !self.shard_ok(level, c) {
                continue;
            }
            self.c[level] = c;
            self.eval.push(level, c)?;
            if level > 2 {
                if let Flow::Stop = self.descend(level - 1)? {
                    return Ok(Flow::Stop);
                }
            } else {
                self.eval.leaf(&mut self.c, &mut self.records)?;
                self.forms += (2 * b + 1) as u64;
                for r in self.records.drain(..) {
                    let line = format!("{r}\n");
                    self.writer
                        .write_all(line.as_bytes())
                        .ctx(|| "writing search output".into())?;
                    self.bytes += line.len() as u64;
                    self.hits += 1;
                }
            }
            self.eval.pop(level)?;
            // deeper levels start from −B once the resumed branch is done
            if level > m {
                self.resume = None;
            }
            if level == m {
                self.since_checkpoint += 1;
                if self.since_checkpoint >= self.cfg.checkpoint_every {
                    if let Flow::Stop = self.save(CheckpointStatus::Running)? {
                        return Ok(Flow::Stop);
                    }
                }
            }
        }
        Ok(Flow::Continue)
    }
}

/// Enumerates every form of `job` in shard `shard` and appends the records
/// with `0 < |Δ| ≤ B_Δ` to `ctx.output`. With a checkpoint path, an existing
/// checkpoint for the same job and configuration is resumed.
pub fn run_job(job: &SearchJob, cfg: &SearchConfig, shard: u32, ctx: &RunContext) -> Result<JobOutcome> {
    cfg.validate()?;
    job.validate(cfg.degree, cfg.coeff_bound)?;
    if shard >= cfg.shard_count {
        return Err(Error::range("shard", shard, format!("0..{}", cfg.shard_count)));
    }
    let layout = cfg.layout()?;
    let n = layout.levels();
    let m = cfg.checkpoint_level;
    let base = Checkpoint {
        degree: cfg.degree,
        engine: cfg.engine,
        job: *job,
        shard,
        shard_count: cfg.shard_count,
        config_digest: cfg.digest(),
        status: CheckpointStatus::Running,
        assignment: job.0.to_vec(),
        forms: 0,
        hits: 0,
        output_bytes: 0,
    };

    let previous = match ctx.checkpoint {
        Some(p) if p.exists() => Some(Checkpoint::read(p)?),
        _ => None,
    };
    if let Some(prev) = &previous {
        let same = Checkpoint {
            status: prev.status,
            assignment: prev.assignment.clone(),
            forms: prev.forms,
            hits: prev.hits,
            output_bytes: prev.output_bytes,
            ..base.clone()
        };
        if *prev != same {
            return Err(Error::State(format!(
                "checkpoint {} belongs to a different job or configuration",
                ctx.checkpoint.unwrap().display()
            )));
        }
        if prev.status == CheckpointStatus::Complete {
            return Ok(JobOutcome {
                forms: prev.forms,
                hits: prev.hits,
                complete: true,
            });
        }
    }

    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .truncate(previous.is_none())
        .open(ctx.output)
        .ctx(|| format!("opening {}", ctx.output.display()))?;
    let (mut forms, mut hits, mut bytes, mut resume) = (0, 0, 0, None);
    if let Some(prev) = &previous {
        let len = file.metadata().ctx(|| format!("inspecting {}", ctx.output.display()))?.len();
        if len < prev.output_bytes {
            return Err(Error::CorruptCheckpoint {
                path: ctx.checkpoint.unwrap().to_path_buf(),
                reason: format!("output holds {len} bytes, checkpoint recorded {}", prev.output_bytes),
            });
        }
        file.set_len(prev.output_bytes)
            .ctx(|| format!("truncating {}", ctx.output.display()))?;
        (forms, hits, bytes) = (prev.forms, prev.hits, prev.output_bytes);
        if prev.assignment.len() > JOB_LEVELS {
            if prev.assignment.len() != n - m + 1 {
                return Err(Error::CorruptCheckpoint {
                    path: ctx.checkpoint.unwrap().to_path_buf(),
                    reason: "assignment length does not match the checkpoint level".into(),
                });
            }
            let mut r = vec![0; n + 1];
            for (k, &v) in prev.assignment.iter().enumerate() {
                r[n - k] = v;
            }
            resume = Some(r);
        }
    }
    let mut writer = BufWriter::new(file);
    use std::io::Seek;
    writer
        .seek(std::io::SeekFrom::Start(bytes))
        .ctx(|| format!("seeking {}", ctx.output.display()))?;

    let mut c = vec![0i64; n + 1];
    for (k, &v) in job.0.iter().enumerate() {
        c[n - k] = v;
    }
    let top = n - JOB_LEVELS;

    macro_rules! go {
        ($eval:expr) => {{
            let mut scan = Scan {
                cfg,
                layout: &layout,
                shard,
                eval: $eval,
                c,
                resume,
                writer,
                records: Vec::new(),
                base,
                ckpt_path: ctx.checkpoint,
                stop: ctx.stop,
                since_checkpoint: 0,
                forms,
                hits,
                bytes,
            };
            let flow = scan.descend(top)?;
            let status = match flow {
                Flow::Continue => CheckpointStatus::Complete,
                Flow::Stop => CheckpointStatus::Running,
            };
            if status == CheckpointStatus::Complete {
                // record the final prefix so a rerun is a no-op
                scan.save(status)?;
            }
            JobOutcome {
                forms: scan.forms,
                hits: scan.hits,
                complete: status == CheckpointStatus::Complete,
            }
        }};
    }

    let outcome = match cfg.engine {
        Engine::Tree => {
            let base_tree = ctx
                .tree
                .ok_or_else(|| Error::State("the tree engine needs a discriminant tree".into()))?;
            if base_tree.depth() != n || base_tree.shape().order() != layout.order.as_slice() {
                return Err(Error::State(
                    "discriminant tree does not use the search variable order".into(),
                ));
            }
            let mut tree = base_tree.fork_upper();
            tree.pop_to_level(n)?;
            for &v in &job.0 {
                tree.push(v)?;
            }
            let tree = tree.fork_upper();
            go!(TreeEval {
                tree,
                layout: &layout,
                cfg,
                g: Vec::new(),
                hits: Vec::new(),
            })
        }
        Engine::Direct => go!(DirectEval {
            ev: DiscEvaluator::cached(cfg.degree).ok_or(Error::InvalidDegree(cfg.degree as i64))?,
            layout: &layout,
            cfg,
            scratch: Vec::new(),
        }),
    };
    Ok(outcome)
}
