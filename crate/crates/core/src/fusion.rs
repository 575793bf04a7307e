//! Moment-based selection fusion.
//!
//! Each source is sharpened with the preprocessing mask, a local geometric
//! moment `Σ r^p · c^q · |v|` is taken over a `window × window` neighborhood
//! (local indices `r, c` run from 1), and every output pixel is copied from
//! whichever source has the larger moment there. Ties go to the first source.
//!
//! By default `v` is the sharpened response minus its own 3×3 mean. The
//! sharpening mask keeps 1.1× the local brightness, and moments of the raw
//! response mostly rank pixels by brightness; removing the local mean leaves
//! only the detail that distinguishes a sharp source from a blurred one.

use crate::error::{Error, Result};
use crate::filter::{convolve3, Kernel3, MASK_CENTER};
use crate::image::{ensure_same_dims, pad, quantize, BorderPolicy, ImageF, ImageU8};

/// Which rasters supply the fused samples once the decision map is known.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum OutputSource {
    /// The sharpened sources. Raises contrast, but the mask roughly doubles
    /// edge strength, which edge-preservation scores penalize.
    Filtered,
    /// The unfiltered sources.
    #[default]
    Original,
}

impl std::str::FromStr for OutputSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "filtered" => Ok(OutputSource::Filtered),
            "original" => Ok(OutputSource::Original),
            other => Err(Error::InvalidConfig(format!(
                "unknown output source `{other}` (expected filtered or original)"
            ))),
        }
    }
}

/// The per-pixel signal whose local moment measures saliency.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Activity {
    /// Sharpened response minus its 3×3 local mean.
    #[default]
    Detail,
    /// The sharpened response itself.
    Response,
}

impl std::str::FromStr for Activity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "detail" => Ok(Activity::Detail),
            "response" => Ok(Activity::Response),
            other => Err(Error::InvalidConfig(format!(
                "unknown activity `{other}` (expected detail or response)"
            ))),
        }
    }
}

/// `v - mean3x3(v)`, i.e. the 8-neighbor Laplacian scaled by 1/9.
fn detail_kernel() -> Kernel3 {
    Kernel3::sharpening(8.0).expect("finite")
}

/// Largest accepted moment order.
pub const MAX_MOMENT_ORDER: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FusionConfig {
    /// Exponent on the local row index.
    pub moment_order_p: u32,
    /// Exponent on the local column index.
    pub moment_order_q: u32,
    /// Odd side length of the moment window.
    pub window: usize,
    /// Take moments of `|filtered|` rather than the signed response.
    pub use_magnitude: bool,
    pub activity: Activity,
    pub output_source: OutputSource,
    pub border: BorderPolicy,
    /// Center weight of the sharpening mask.
    pub mask_center: f64,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            moment_order_p: 1,
            moment_order_q: 1,
            window: 3,
            use_magnitude: true,
            activity: Activity::Detail,
            output_source: OutputSource::Original,
            border: BorderPolicy::Replicate,
            mask_center: MASK_CENTER,
        }
    }
}

impl FusionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0 || self.window.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "window must be odd and at least 1, got {}",
                self.window
            )));
        }
        if self.moment_order_p > MAX_MOMENT_ORDER || self.moment_order_q > MAX_MOMENT_ORDER {
            return Err(Error::InvalidConfig(format!(
                "moment orders must not exceed {MAX_MOMENT_ORDER}, got p={} q={}",
                self.moment_order_p, self.moment_order_q
            )));
        }
        if !self.mask_center.is_finite() {
            return Err(Error::InvalidConfig("mask center must be finite".into()));
        }
        Ok(())
    }

    pub fn mask(&self) -> Result<Kernel3> {
        Kernel3::sharpening(self.mask_center)
    }
}

/// Per-pixel local moments of one source.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl MomentMap {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    /// Wraps precomputed moments, e.g. for driving [`decision_map`] directly.
    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        let img = ImageF::new(width, height, values)?;
        Ok(MomentMap {
            width,
            height,
            values: img.into_samples(),
        })
    }
}

/// Which source supplies a fused pixel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Selection {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionMap {
    width: usize,
    height: usize,
    select: Vec<Selection>,
}

impl DecisionMap {
    pub fn new(width: usize, height: usize, select: Vec<Selection>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage { width, height });
        }
        if select.len() != width * height {
            return Err(Error::BufferLength {
                expected: width * height,
                actual: select.len(),
            });
        }
        Ok(DecisionMap {
            width,
            height,
            select,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn selections(&self) -> &[Selection] {
        &self.select
    }

    pub fn get(&self, row: usize, col: usize) -> Selection {
        self.select[row * self.width + col]
    }

    pub fn count_x(&self) -> usize {
        self.select.iter().filter(|&&s| s == Selection::X).count()
    }

    /// Renders the map as an 8-bit raster: 255 where X was chosen, 0 for Y.
    pub fn to_image(&self) -> ImageU8 {
        let samples = self
            .select
            .iter()
            .map(|s| match s {
                Selection::X => 255,
                Selection::Y => 0,
            })
            .collect();
        ImageU8::new(self.width, self.height, samples).expect("dimensions validated")
    }
}

/// Weights of a PCA-weighted average.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PcaWeights {
    pub w_x: f64,
    pub w_y: f64,
    /// Set when the covariance had no unique principal axis and equal
    /// weights were used instead.
    pub degenerate: bool,
}

/// Output of any fuser. Method-specific parts are `None` where they do not apply.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionResult {
    pub fused_u8: ImageU8,
    pub fused_f: ImageF,
    pub decision: Option<DecisionMap>,
    pub moments: Option<(MomentMap, MomentMap)>,
    pub pca: Option<PcaWeights>,
}

impl FusionResult {
    pub(crate) fn from_float(fused_f: ImageF) -> Result<Self> {
        Ok(FusionResult {
            fused_u8: quantize(&fused_f)?,
            fused_f,
            decision: None,
            moments: None,
            pca: None,
        })
    }
}

/// Computes `M(a) = Σ_{r=1..w} Σ_{c=1..w} r^p · c^q · V(b)` for every pixel
/// `a`, where `b` walks the window centered on `a` and `V` is the sample
/// (or its magnitude when `cfg.use_magnitude`).
pub fn local_moment_map(img: &ImageF, cfg: &FusionConfig) -> Result<MomentMap> {
    cfg.validate()?;
    let (width, height) = img.dims();
    let win = cfg.window;
    let half = win / 2;

    let weights: Vec<f64> = (1..=win)
        .flat_map(|r| {
            (1..=win).map(move |c| {
                (r as f64).powi(cfg.moment_order_p as i32)
                    * (c as f64).powi(cfg.moment_order_q as i32)
            })
        })
        .collect();

    let source = if cfg.use_magnitude {
        ImageF::from_kernel_output(
            width,
            height,
            img.samples().iter().map(|v| v.abs()).collect(),
        )?
    } else {
        img.clone()
    };
    let padded = pad(&source, half, cfg.border);
    let pw = padded.width();
    let ps = padded.samples();

    let mut values = Vec::with_capacity(width * height);
    for r in 0..height {
        for c in 0..width {
            // Window rows r..r+win of the padded raster are centered on r.
            let mut acc = 0.0;
            for (wr, wrow) in weights.chunks_exact(win).enumerate() {
                let row = &ps[(r + wr) * pw + c..][..win];
                acc += wrow.iter().zip(row).map(|(w, v)| w * v).sum::<f64>();
            }
            values.push(acc);
        }
    }
    let values = ImageF::from_kernel_output(width, height, values)?.into_samples();
    Ok(MomentMap {
        width,
        height,
        values,
    })
}

/// Selects X where `mx ≥ my` and Y where `my > mx`.
pub fn decision_map(mx: &MomentMap, my: &MomentMap) -> Result<DecisionMap> {
    ensure_same_dims(mx.dims(), my.dims())?;
    let select = mx
        .values
        .iter()
        .zip(&my.values)
        .map(|(a, b)| if a >= b { Selection::X } else { Selection::Y })
        .collect();
    Ok(DecisionMap {
        width: mx.width,
        height: mx.height,
        select,
    })
}

/// The signal fed to [`local_moment_map`] for a sharpened source.
pub fn activity_signal(filtered: &ImageF, cfg: &FusionConfig) -> Result<ImageF> {
    match cfg.activity {
        Activity::Detail => convolve3(filtered, &detail_kernel(), cfg.border),
        Activity::Response => Ok(filtered.clone()),
    }
}

/// Fuses a registered 8-bit pair.
pub fn fuse_moment(x: &ImageU8, y: &ImageU8, cfg: &FusionConfig) -> Result<FusionResult> {
    ensure_same_dims(x.dims(), y.dims())?;
    fuse_moment_f(&x.widen(), &y.widen(), cfg)
}

/// [`fuse_moment`] on real-valued sources.
pub fn fuse_moment_f(x: &ImageF, y: &ImageF, cfg: &FusionConfig) -> Result<FusionResult> {
    cfg.validate()?;
    ensure_same_dims(x.dims(), y.dims())?;
    let mask = cfg.mask()?;
    let fx = convolve3(x, &mask, cfg.border)?;
    let fy = convolve3(y, &mask, cfg.border)?;
    let mx = local_moment_map(&activity_signal(&fx, cfg)?, cfg)?;
    let my = local_moment_map(&activity_signal(&fy, cfg)?, cfg)?;
    let decision = decision_map(&mx, &my)?;

    let (sx, sy) = match cfg.output_source {
        OutputSource::Filtered => (&fx, &fy),
        OutputSource::Original => (x, y),
    };
    let samples = decision
        .select
        .iter()
        .zip(sx.samples().iter().zip(sy.samples()))
        .map(|(s, (&a, &b))| match s {
            Selection::X => a,
            Selection::Y => b,
        })
        .collect();
    let fused_f = ImageF::from_kernel_output(x.width(), x.height(), samples)?;
    let mut result = FusionResult::from_float(fused_f)?;
    result.decision = Some(decision);
    result.moments = Some((mx, my));
    Ok(result)
}
