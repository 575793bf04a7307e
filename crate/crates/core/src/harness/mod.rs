//! Batch experiment harness: fuse registered pairs with several methods,
//! score every result, and tabulate the scores.

mod batch;
pub mod config;
mod report;
pub mod synth;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baseline::{fuse_average, fuse_pca};
use crate::error::{Error, Result};
use crate::fusion::{fuse_moment, FusionConfig, FusionResult};
use crate::image::{ensure_same_dims, ImageU8};
use crate::metrics::{evaluate, MetricsRecord, QabfConstants};
use crate::pgm::read_pgm_file;

pub use batch::{
    discover_pairs, read_manifest, run_batch, run_batch_specs, BatchReport, MethodAggregate,
    ReportRow, SkippedPair,
};
pub use report::{emit_report, ReportFormat};

/// A fusion method known to the harness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Average,
    Moment,
    Pca,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Average, Method::Moment, Method::Pca];

    pub fn name(self) -> &'static str {
        match self {
            Method::Average => "average",
            Method::Moment => "moment",
            Method::Pca => "pca",
        }
    }

    pub fn fuse(self, a: &ImageU8, b: &ImageU8, cfg: &FusionConfig) -> Result<FusionResult> {
        match self {
            Method::Moment => fuse_moment(a, b, cfg),
            Method::Average => fuse_average(a, b),
            Method::Pca => fuse_pca(a, b),
        }
    }

    /// Parses a comma-separated list such as `moment,average`. Duplicates
    /// are dropped and the result is sorted by name.
    pub fn parse_list(list: &str) -> Result<Vec<Method>> {
        let mut out = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Method::from_str)
            .collect::<Result<Vec<_>>>()?;
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::InvalidConfig("no fusion methods given".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moment" => Ok(Method::Moment),
            "average" => Ok(Method::Average),
            "pca" => Ok(Method::Pca),
            other => Err(Error::UnknownMethod(other.to_owned())),
        }
    }
}

/// Two registered source files and a label for the pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSpec {
    pub id: String,
    pub path_a: PathBuf,
    pub path_b: PathBuf,
}

#[derive(Clone, Debug)]
pub struct MethodOutcome {
    pub method: Method,
    pub result: FusionResult,
    pub metrics: MetricsRecord,
}

/// Fuses and scores an in-memory pair with each method, in the given order.
pub fn run_images(
    a: &ImageU8,
    b: &ImageU8,
    cfg: &FusionConfig,
    k: &QabfConstants,
    methods: &[Method],
) -> Result<Vec<MethodOutcome>> {
    ensure_same_dims(a.dims(), b.dims())?;
    methods
        .iter()
        .map(|&method| {
            let result = method.fuse(a, b, cfg)?;
            let metrics = evaluate(a, b, &result.fused_u8, k)?;
            Ok(MethodOutcome {
                method,
                result,
                metrics,
            })
        })
        .collect()
}

/// Loads both files of `spec` and runs [`run_images`] on them.
pub fn run_pair(
    spec: &PairSpec,
    cfg: &FusionConfig,
    k: &QabfConstants,
    methods: &[Method],
) -> Result<Vec<MethodOutcome>> {
    let a = read_pgm_file(&spec.path_a)?;
    let b = read_pgm_file(&spec.path_b)?;
    run_images(&a, &b, cfg, k, methods)
}
