//! Fusion quality metrics.
//!
//! All information measures are in bits and work on 256-bin histograms of
//! 8-bit data. The edge-preservation score lives in [`qabf`](mod@qabf).

pub mod qabf;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::image::{ensure_same_dims, ImageU8};

pub use qabf::{qabf, sobel_edges, EdgeMap, QabfConstants, QabfScore};

/// Gray-level tallies of an 8-bit image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram256 {
    pub counts: [u64; 256],
    pub total: u64,
}

impl Histogram256 {
    pub fn of(img: &ImageU8) -> Self {
        let mut counts = [0u64; 256];
        for &v in img.samples() {
            counts[v as usize] += 1;
        }
        Histogram256 {
            counts,
            total: img.len() as u64,
        }
    }

    /// Shannon entropy of the normalized histogram, in bits.
    pub fn entropy(&self) -> f64 {
        let n = self.total as f64;
        let sum: f64 = self
            .counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                p * p.log2()
            })
            .sum();
        // `0.0 - x` rather than `-x`, so a single-level image gives +0.
        0.0 - sum
    }
}

/// One row of a fusion evaluation table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub entropy_bits: f64,
    pub sd: f64,
    pub mim_bits: f64,
    pub qabf: f64,
    pub degenerate_qabf: bool,
}

/// `H = -Σ p_k log2 p_k` over the gray-level histogram.
pub fn entropy(img: &ImageU8) -> f64 {
    Histogram256::of(img).entropy()
}

/// Population standard deviation of the samples (divides by N).
pub fn std_dev(img: &ImageU8) -> f64 {
    let n = img.len() as f64;
    let mean = img.samples().iter().map(|&v| f64::from(v)).sum::<f64>() / n;
    let var = img
        .samples()
        .iter()
        .map(|&v| {
            let d = f64::from(v) - mean;
            d * d
        })
        .sum::<f64>()
        / n;
    var.sqrt()
}

/// Mutual information between two equal-sized images from their 256×256
/// joint histogram. Empty cells contribute nothing.
pub fn mutual_information(a: &ImageU8, f: &ImageU8) -> Result<f64> {
    ensure_same_dims(a.dims(), f.dims())?;
    let ha = Histogram256::of(a);
    let hf = Histogram256::of(f);
    let mut joint = vec![0u32; 256 * 256];
    for (&u, &v) in a.samples().iter().zip(f.samples()) {
        joint[(u as usize) << 8 | v as usize] += 1;
    }
    let n = a.len() as f64;
    let mut mi = 0.0;
    for (idx, &c) in joint.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let c = f64::from(c);
        let pa = ha.counts[idx >> 8] as f64;
        let pf = hf.counts[idx & 0xff] as f64;
        mi += c / n * (c * n / (pa * pf)).log2();
    }
    Ok(mi)
}

/// `MI(a, f) + MI(b, f)`.
pub fn mim(a: &ImageU8, b: &ImageU8, f: &ImageU8) -> Result<f64> {
    Ok(mutual_information(a, f)? + mutual_information(b, f)?)
}

/// Entropy, SD, MIM and Q^AB/F of a fused image `f` against its sources.
pub fn evaluate(a: &ImageU8, b: &ImageU8, f: &ImageU8, k: &QabfConstants) -> Result<MetricsRecord> {
    ensure_same_dims(a.dims(), b.dims())?;
    ensure_same_dims(a.dims(), f.dims())?;
    let score = qabf(a, b, f, k)?;
    Ok(MetricsRecord {
        entropy_bits: entropy(f),
        sd: std_dev(f),
        mim_bits: mim(a, b, f)?,
        qabf: score.value,
        degenerate_qabf: score.degenerate,
    })
}
