use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{DateTime, Utc};
use serde::Serialize;

/// Record of one run: enough to repeat it.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    pub tool_version: String,
    pub started: DateTime<Utc>,
    pub finished: DateTime<Utc>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn start(command: &str, config: &impl Serialize, seeds: Vec<u64>) -> Result<Self> {
        Ok(RunManifest {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            seeds,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started: Utc::now(),
            finished: Utc::now(),
            outputs: Vec::new(),
        })
    }

    /// Writes to `path`, or as one JSON line to stderr when there is none.
    pub fn finish(mut self, path: Option<&Path>) -> Result<()> {
        self.finished = Utc::now();
        match path {
            Some(p) => {
                let text = serde_json::to_string_pretty(&self)?;
                fs::write(p, text + "\n").with_context(|| format!("cannot write {}", p.display()))
            }
            None => {
                writeln!(std::io::stderr(), "{}", serde_json::to_string(&self)?)?;
                Ok(())
            }
        }
    }
}

/// `--manifest` if given, else `<out>.manifest.json` next to the output.
pub fn manifest_path(explicit: Option<&Path>, out: Option<&Path>) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| {
        out.map(|o| {
            let mut s = o.as_os_str().to_owned();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    })
}
