//! Loading parity-check matrices and building split plans.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use seldpc::heuristic::cycle_breaking_qc_plan;
use seldpc::qc::WIMAX_DEFAULT_Z;
use seldpc::*;
use serde::{Deserialize, Serialize};

/// Where the base code comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CodeSource {
    /// Built-in WiMAX code: `"1/2"` or `"2/3a"`.
    Wimax {
        code: String,
        #[serde(default = "default_z")]
        z: usize,
    },
    /// Matrix in alist format.
    Alist(PathBuf),
    /// QC base matrix in text format.
    Base(PathBuf),
}

fn default_z() -> usize {
    WIMAX_DEFAULT_Z
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Regular,
    #[default]
    CycleBreaking,
}

/// How to split `H1`: either a splitting degree and strategy or a plan file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub theta: Option<usize>,
    pub plan: Option<PathBuf>,
    pub strategy: Strategy,
    pub seed: u64,
}

pub struct LoadedCode {
    pub h1: SparseBinaryMatrix,
    /// Base matrix when the code is quasi-cyclic.
    pub base: Option<QcBaseMatrix>,
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_code(src: &CodeSource) -> Result<LoadedCode> {
    match src {
        CodeSource::Wimax { code, z } => {
            let name = if code.starts_with("wimax") {
                code.clone()
            } else {
                format!("wimax-{code}")
            };
            let base = wimax_base(name.parse()?, *z)?;
            Ok(LoadedCode {
                h1: base.expand(),
                base: Some(base),
            })
        }
        CodeSource::Alist(path) => {
            let h1 =
                SparseBinaryMatrix::from_alist(&read_text(path)?).with_context(|| format!("in {}", path.display()))?;
            Ok(LoadedCode { h1, base: None })
        }
        CodeSource::Base(path) => {
            let base: QcBaseMatrix = read_text(path)?
                .parse()
                .with_context(|| format!("in {}", path.display()))?;
            Ok(LoadedCode {
                h1: base.expand(),
                base: Some(base),
            })
        }
    }
}

pub fn build_plan(code: &LoadedCode, spec: &SplitSpec) -> Result<SplitPlan> {
    match (spec.theta, &spec.plan) {
        (Some(_), Some(_)) => bail!("give either a splitting degree or a plan file, not both"),
        (None, None) => bail!("a splitting degree or a plan file is required"),
        (None, Some(path)) => {
            let plan: SplitPlan = read_text(path)?
                .parse()
                .with_context(|| format!("in {}", path.display()))?;
            Ok(plan)
        }
        (Some(theta), None) => {
            if theta < 2 {
                bail!("splitting degree must be at least 2, got {theta}");
            }
            let plan = match (spec.strategy, &code.base) {
                (Strategy::Regular, _) => regular_split_plan(&code.h1, theta, spec.seed)?,
                (Strategy::CycleBreaking, Some(base)) => {
                    let opts = HeuristicOptions {
                        seed: spec.seed,
                        ..Default::default()
                    };
                    cycle_breaking_qc_plan(base, &vec![theta; base.base_rows()], &opts)?
                }
                (Strategy::CycleBreaking, None) => {
                    let opts = HeuristicOptions {
                        seed: spec.seed,
                        ..Default::default()
                    };
                    cycle_breaking_split_plan(&code.h1, &vec![theta; code.h1.n_rows()], &opts)?
                }
            };
            Ok(plan)
        }
    }
}
