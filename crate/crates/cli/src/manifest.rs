//! The pipeline manifest: configuration, per-stage record counts and
//! digests of every output file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigEcho>,
    #[serde(default)]
    pub stages: Vec<Stage>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub degree: u32,
    pub cmax: i64,
    pub dmax: u64,
    pub engine: String,
    pub shards: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub records: u64,
    #[serde(default)]
    pub inputs: Vec<String>,
    #[serde(default)]
    pub outputs: Vec<FileDigest>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl Manifest {
    pub fn load_or_default(path: &Path) -> CliResult<Self> {
        if !path.exists() {
            return Ok(Manifest {
                tool_version: env!("CARGO_PKG_VERSION").into(),
                ..Manifest::default()
            });
        }
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> CliResult<()> {
        let text = toml::to_string_pretty(self).map_err(|e| CliError::Internal(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
    }

    /// Replaces the stage of the same name, keeping pipeline order.
    pub fn set_stage(&mut self, stage: Stage) {
        match self.stages.iter_mut().find(|s| s.name == stage.name) {
            Some(s) => *s = stage,
            None => self.stages.push(stage),
        }
    }

    /// Every recorded digest still matches the file beside the manifest.
    pub fn verify(&self, base: &Path) -> CliResult<Vec<PathBuf>> {
        let mut stale = Vec::new();
        for s in &self.stages {
            for o in &s.outputs {
                let p = base.join(&o.path);
                if !p.exists() || sha256_file(&p)? != o.sha256 {
                    stale.push(p);
                }
            }
        }
        Ok(stale)
    }
}

/// `path` relative to `base` when it lies inside it.
pub fn relative(path: &Path, base: &Path) -> String {
    path.strip_prefix(base).unwrap_or(path).display().to_string()
}

/// Builds a stage entry, hashing each output.
pub fn stage(name: &str, records: u64, inputs: &[PathBuf], outputs: &[PathBuf], base: &Path) -> CliResult<Stage> {
    Ok(Stage {
        name: name.into(),
        records,
        inputs: inputs.iter().map(|p| relative(p, base)).collect(),
        outputs: outputs
            .iter()
            .map(|p| {
                Ok(FileDigest {
                    path: relative(p, base),
                    sha256: sha256_file(p)?,
                })
            })
            .collect::<CliResult<_>>()?,
    })
}

/// Records the stage in the manifest at `path`, if one was requested.
pub fn update(
    path: Option<&Path>,
    config: Option<ConfigEcho>,
    name: &str,
    records: u64,
    inputs: &[PathBuf],
    outputs: &[PathBuf],
) -> CliResult<()> {
    let Some(path) = path else { return Ok(()) };
    let base = path.parent().unwrap_or(Path::new(""));
    let mut m = Manifest::load_or_default(path)?;
    if config.is_some() {
        m.config = config;
    }
    m.set_stage(stage(name, records, inputs, outputs, base)?);
    m.save(path)
}
