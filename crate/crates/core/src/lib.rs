//! Salient-feature fusion of registered grayscale image pairs.
//!
//! Each source is sharpened with a 3×3 mask, a local geometric moment is
//! computed around every pixel, and the fused image takes each pixel from the
//! source with the larger moment. Pixelwise averaging and PCA-weighted
//! averaging are included as comparison fusers, together with the usual
//! fusion-quality metrics: entropy, standard deviation, summed mutual
//! information (MIM) and the Q^AB/F edge-preservation score.
//!
//! ```
//! use momentfuse::{fuse_moment, metrics, FusionConfig, ImageU8};
//!
//! // Two views of the same 8×8 scene: one has a bright bar, the other is flat.
//! let a = ImageU8::from_fn(8, 8, |_, c| if c == 4 { 200 } else { 40 })?;
//! let b = ImageU8::filled(8, 8, 40)?;
//!
//! let fused = fuse_moment(&a, &b, &FusionConfig::default())?;
//! let decision = fused.decision.as_ref().unwrap();
//! assert_eq!(decision.get(3, 4), momentfuse::Selection::X);
//!
//! let scores = metrics::evaluate(&a, &b, &fused.fused_u8, &Default::default())?;
//! assert!(scores.qabf > 0.5);
//! # Ok::<(), momentfuse::Error>(())
//! ```
//!
//! The [`harness`] module runs whole batches of pairs and writes CSV/JSON
//! reports; the `momentfuse` binary in the companion CLI crate wraps it.

pub mod baseline;
mod error;
pub mod filter;
pub mod fusion;
pub mod harness;
pub mod image;
pub mod metrics;
pub mod pgm;

pub use baseline::{fuse_average, fuse_pca};
pub use error::{Error, Result};
pub use filter::{convolve3, paper_mask, preprocess, Kernel3};
pub use fusion::{
    activity_signal, decision_map, fuse_moment, fuse_moment_f, local_moment_map, Activity,
    DecisionMap, FusionConfig, FusionResult, MomentMap, OutputSource, Selection,
};
pub use image::{pad, quantize, BorderPolicy, ImageF, ImageU8};
pub use metrics::{MetricsRecord, QabfConstants};
pub use pgm::{load_pgm, save_pgm, PgmError};

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $file:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            pub struct $name;
        };
    }
    chapter!(Intro, "intro.md");
    chapter!(Images, "images.md");
    chapter!(Filtering, "filtering.md");
    chapter!(Moments, "moments.md");
    chapter!(Baselines, "baselines.md");
    chapter!(Metrics, "metrics.md");
    chapter!(Qabf, "qabf.md");
    chapter!(Harness, "harness.md");
}
