//! Text checkpoints with a trailing SHA-256 line, written atomically.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{Engine, SearchJob};
use crate::error::{Error, IoContext, Result};

const HEADER: &str = "tqf-checkpoint 1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckpointStatus {
    Running,
    Complete,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Checkpoint {
    pub degree: u32,
    pub engine: Engine,
    pub job: SearchJob,
    pub shard: u32,
    pub shard_count: u32,
    pub config_digest: String,
    pub status: CheckpointStatus,
    /// Values of the job levels followed by the last completed prefix down
    /// to the checkpoint level (`c_n, …, c_m`); only the job levels when no
    /// prefix has completed yet.
    pub assignment: Vec<i64>,
    pub forms: u64,
    pub hits: u64,
    pub output_bytes: u64,
}

fn join(v: &[i64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl Checkpoint {
    fn body(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{HEADER}").unwrap();
        writeln!(s, "degree {}", self.degree).unwrap();
        writeln!(s, "engine {}", self.engine).unwrap();
        writeln!(s, "job {}", self.job).unwrap();
        writeln!(s, "shard {}/{}", self.shard, self.shard_count).unwrap();
        writeln!(s, "config {}", self.config_digest).unwrap();
        let status = match self.status {
            CheckpointStatus::Running => "running",
            CheckpointStatus::Complete => "complete",
        };
        writeln!(s, "status {status}").unwrap();
        writeln!(s, "assignment {}", join(&self.assignment)).unwrap();
        writeln!(s, "forms {}", self.forms).unwrap();
        writeln!(s, "hits {}", self.hits).unwrap();
        writeln!(s, "output_bytes {}", self.output_bytes).unwrap();
        s
    }

    pub fn to_text(&self) -> String {
        let body = self.body();
        let digest = hex::encode(Sha256::digest(body.as_bytes()));
        format!("{body}sha256 {digest}\n")
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let corrupt = |reason: String| Error::CorruptCheckpoint {
            path: path.to_path_buf(),
            reason,
        };
        let Some(cut) = text.rfind("sha256 ") else {
            return Err(corrupt("missing digest line".into()));
        };
        let (body, tail) = text.split_at(cut);
        let stored = tail.trim_start_matches("sha256 ").trim_end();
        let actual = hex::encode(Sha256::digest(body.as_bytes()));
        if stored != actual || !tail.ends_with('\n') {
            return Err(corrupt("digest mismatch".into()));
        }
        let mut fields = std::collections::HashMap::new();
        let mut lines = body.lines();
        if lines.next() != Some(HEADER) {
            return Err(corrupt("unknown header".into()));
        }
        for line in lines {
            let (k, v) = line
                .split_once(' ')
                .ok_or_else(|| corrupt(format!("malformed line `{line}`")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| corrupt(format!("missing `{k}`")));
        let num = |k: &str| -> Result<u64> {
            get(k)?.parse().map_err(|_| corrupt(format!("bad `{k}`")))
        };
        let (shard, shard_count) = get("shard")?
            .split_once('/')
            .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
            .ok_or_else(|| corrupt("bad `shard`".into()))?;
        let status = match get("status")? {
            "running" => CheckpointStatus::Running,
            "complete" => CheckpointStatus::Complete,
            other => return Err(corrupt(format!("bad status `{other}`"))),
        };
        let assignment = get("assignment")?
            .split(',')
            .map(|x| x.parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| corrupt("bad `assignment`".into()))?;
        let job: SearchJob = get("job")?.parse().map_err(|_| corrupt("bad `job`".into()))?;
        if assignment.len() < 5 || assignment[..5] != job.0 {
            return Err(corrupt("assignment does not extend the job tuple".into()));
        }
        Ok(Checkpoint {
            degree: num("degree")? as u32,
            engine: get("engine")?.parse().map_err(|_| corrupt("bad `engine`".into()))?,
            job,
            shard,
            shard_count,
            config_digest: get("config")?.to_string(),
            status,
            assignment,
            forms: num("forms")?,
            hits: num("hits")?,
            output_bytes: num("output_bytes")?,
        })
    }

    /// Write to a temporary sibling, sync, then rename over `path`.
    pub fn write_atomic(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("ckpt.tmp");
        {
            let mut f = std::fs::File::create(&tmp).ctx(|| format!("creating {}", tmp.display()))?;
            f.write_all(self.to_text().as_bytes())
                .and_then(|_| f.sync_all())
                .ctx(|| format!("writing {}", tmp.display()))?;
        }
        std::fs::rename(&tmp, path).ctx(|| format!("renaming {} to {}", tmp.display(), path.display()))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).ctx(|| format!("reading {}", path.display()))?;
        let text = String::from_utf8(bytes).map_err(|_| Error::CorruptCheckpoint {
            path: path.to_path_buf(),
            reason: "not UTF-8".into(),
        })?;
        Self::parse(&text, path)
    }
}
