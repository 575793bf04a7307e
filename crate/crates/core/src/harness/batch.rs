use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_pair, Method, PairSpec};
use crate::error::{Error, Result};
use crate::fusion::FusionConfig;
use crate::metrics::{MetricsRecord, QabfConstants};

/// One (pair, method) line of a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub pair_id: String,
    pub method: Method,
    pub mim: f64,
    pub sd: f64,
    pub entropy: f64,
    pub qabf: f64,
    pub degenerate: bool,
}

impl ReportRow {
    pub fn new(pair_id: impl Into<String>, method: Method, m: &MetricsRecord) -> Self {
        ReportRow {
            pair_id: pair_id.into(),
            method,
            mim: m.mim_bits,
            sd: m.sd,
            entropy: m.entropy_bits,
            qabf: m.qabf,
            degenerate: m.degenerate_qabf,
        }
    }
}

/// Means of every metric over the rows of one method.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodAggregate {
    pub method: Method,
    pub pairs: usize,
    pub mim: f64,
    pub sd: f64,
    pub entropy: f64,
    pub qabf: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedPair {
    pub id: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    /// Sorted by pair id, then method name.
    pub rows: Vec<ReportRow>,
    /// One entry per method, sorted by method name.
    pub aggregates: Vec<MethodAggregate>,
    pub skipped: Vec<SkippedPair>,
}

impl BatchReport {
    /// Sorts `rows` and derives the aggregates from them.
    pub fn from_rows(mut rows: Vec<ReportRow>, mut skipped: Vec<SkippedPair>) -> Self {
        rows.sort_by(|a, b| {
            a.pair_id
                .cmp(&b.pair_id)
                .then_with(|| a.method.name().cmp(b.method.name()))
        });
        skipped.sort_by(|a, b| a.id.cmp(&b.id));

        let mut groups: BTreeMap<&str, Vec<&ReportRow>> = BTreeMap::new();
        for row in &rows {
            groups.entry(row.method.name()).or_default().push(row);
        }
        let aggregates = groups
            .into_values()
            .map(|group| {
                let n = group.len() as f64;
                let mean = |f: fn(&ReportRow) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / n;
                MethodAggregate {
                    method: group[0].method,
                    pairs: group.len(),
                    mim: mean(|r| r.mim),
                    sd: mean(|r| r.sd),
                    entropy: mean(|r| r.entropy),
                    qabf: mean(|r| r.qabf),
                }
            })
            .collect();
        BatchReport {
            rows,
            aggregates,
            skipped,
        }
    }

    pub fn aggregate(&self, method: Method) -> Option<&MethodAggregate> {
        self.aggregates.iter().find(|a| a.method == method)
    }
}

/// Pairs `<id>_a.pgm` with `<id>_b.pgm` inside `dir`. A half without its
/// partner is reported as skipped; files not following the convention are
/// ignored.
pub fn discover_pairs(dir: &Path) -> Result<(Vec<PairSpec>, Vec<SkippedPair>)> {
    let mut halves: BTreeMap<String, [Option<std::path::PathBuf>; 2]> = BTreeMap::new();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if !path.is_file() || path.extension().and_then(|e| e.to_str()) != Some("pgm") {
            continue;
        }
        let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
            continue;
        };
        let (id, slot) = if let Some(id) = stem.strip_suffix("_a") {
            (id.to_owned(), 0)
        } else if let Some(id) = stem.strip_suffix("_b") {
            (id.to_owned(), 1)
        } else {
            continue;
        };
        halves.entry(id).or_default()[slot] = Some(path);
    }

    let mut specs = Vec::new();
    let mut skipped = Vec::new();
    for (id, [a, b]) in halves {
        match (a, b) {
            (Some(path_a), Some(path_b)) => specs.push(PairSpec { id, path_a, path_b }),
            (Some(_), None) => skipped.push(SkippedPair {
                reason: format!("missing {id}_b.pgm"),
                id,
            }),
            (None, Some(_)) => skipped.push(SkippedPair {
                reason: format!("missing {id}_a.pgm"),
                id,
            }),
            (None, None) => unreachable!("entry created with at least one half"),
        }
    }
    Ok((specs, skipped))
}

/// Reads a manifest of `<id> <path_a> <path_b>` lines. Blank lines and lines
/// starting with `#` are ignored; relative paths are taken relative to the
/// manifest's directory.
pub fn read_manifest(path: &Path) -> Result<Vec<PairSpec>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut specs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [id, a, b] = fields[..] else {
            return Err(Error::InvalidConfig(format!(
                "{}:{}: expected `<id> <path_a> <path_b>`",
                path.display(),
                lineno + 1
            )));
        };
        specs.push(PairSpec {
            id: id.to_owned(),
            path_a: base.join(a),
            path_b: base.join(b),
        });
    }
    Ok(specs)
}

/// Runs every method on every pair found at `source`, which is either a
/// directory (pairing by file name) or a manifest file.
pub fn run_batch(
    source: &Path,
    cfg: &FusionConfig,
    k: &QabfConstants,
    methods: &[Method],
) -> Result<BatchReport> {
    let (specs, skipped) = if source.is_dir() {
        discover_pairs(source)?
    } else {
        (read_manifest(source)?, Vec::new())
    };
    run_batch_specs(&specs, skipped, cfg, k, methods)
}

/// Runs a batch over explicit pairs. Pairs that fail to load or fuse are
/// appended to `skipped`.
pub fn run_batch_specs(
    specs: &[PairSpec],
    mut skipped: Vec<SkippedPair>,
    cfg: &FusionConfig,
    k: &QabfConstants,
    methods: &[Method],
) -> Result<BatchReport> {
    cfg.validate()?;
    k.validate()?;
    if methods.is_empty() {
        return Err(Error::InvalidConfig("no fusion methods given".into()));
    }
    let outcomes: Vec<_> = specs
        .par_iter()
        .map(|spec| (spec, run_pair(spec, cfg, k, methods)))
        .collect();

    let mut rows = Vec::new();
    for (spec, outcome) in outcomes {
        match outcome {
            Ok(results) => rows.extend(
                results
                    .iter()
                    .map(|o| ReportRow::new(spec.id.clone(), o.method, &o.metrics)),
            ),
            Err(e) => skipped.push(SkippedPair {
                id: spec.id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyBatch);
    }
    Ok(BatchReport::from_rows(rows, skipped))
}
