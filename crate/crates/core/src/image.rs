//! Raster types shared by every stage of the pipeline.
//!
//! [`ImageU8`] holds 8-bit sources and quantized outputs, [`ImageF`] holds
//! unclamped double-precision intermediates (filtered responses may be
//! negative or exceed 255). Both are row-major.

use crate::error::{Error, Result};

/// An 8-bit grayscale raster, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ImageU8 {
    width: usize,
    height: usize,
    samples: Vec<u8>,
}

/// A real-valued raster, row-major. Samples are always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageF {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

/// How samples outside the raster are synthesized.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BorderPolicy {
    /// Out-of-range coordinates take the value of the nearest edge pixel.
    #[default]
    Replicate,
}

impl BorderPolicy {
    /// Maps a possibly out-of-range coordinate onto `0..len`.
    #[inline]
    pub fn resolve(self, coord: isize, len: usize) -> usize {
        match self {
            BorderPolicy::Replicate => coord.clamp(0, len as isize - 1) as usize,
        }
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage { width, height });
    }
    let expected = width
        .checked_mul(height)
        .ok_or(Error::EmptyImage { width, height })?;
    if len != expected {
        return Err(Error::BufferLength {
            expected,
            actual: len,
        });
    }
    Ok(())
}

impl ImageU8 {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Result<Self> {
        check_dims(width, height, samples.len())?;
        Ok(ImageU8 {
            width,
            height,
            samples,
        })
    }

    /// A `width`×`height` image with every sample set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        check_dims(width, height, width.saturating_mul(height))?;
        let mut samples = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                samples.push(f(r, c));
            }
        }
        Ok(ImageU8 {
            width,
            height,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false: an image has at least one pixel.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<u8> {
        self.samples
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.samples[row * self.width + col]
    }

    /// Lossless conversion to the real-valued raster.
    pub fn widen(&self) -> ImageF {
        ImageF {
            width: self.width,
            height: self.height,
            samples: self.samples.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

impl ImageF {
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        check_dims(width, height, samples.len())?;
        check_finite(&samples)?;
        Ok(ImageF {
            width,
            height,
            samples,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        check_dims(width, height, width.saturating_mul(height))?;
        let mut samples = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                samples.push(f(r, c));
            }
        }
        Self::new(width, height, samples)
    }

    /// Wraps a buffer produced by an internal kernel. Callers guarantee
    /// the length; finiteness is still checked.
    pub(crate) fn from_kernel_output(
        width: usize,
        height: usize,
        samples: Vec<f64>,
    ) -> Result<Self> {
        debug_assert_eq!(samples.len(), width * height);
        check_finite(&samples)?;
        Ok(ImageF {
            width,
            height,
            samples,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.samples[row * self.width + col]
    }

    /// Reads `(row, col)` with out-of-range coordinates resolved by `policy`.
    #[inline]
    pub fn get_bordered(&self, row: isize, col: isize, policy: BorderPolicy) -> f64 {
        let r = policy.resolve(row, self.height);
        let c = policy.resolve(col, self.width);
        self.samples[r * self.width + c]
    }

    /// Multiplies every sample by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<ImageF> {
        Self::from_kernel_output(
            self.width,
            self.height,
            self.samples.iter().map(|v| v * factor).collect(),
        )
    }
}

fn check_finite(samples: &[f64]) -> Result<()> {
    match samples.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite {
            index,
            value: samples[index],
        }),
        None => Ok(()),
    }
}

pub(crate) fn ensure_same_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            left_width: a.0,
            left_height: a.1,
            right_width: b.0,
            right_height: b.1,
        });
    }
    Ok(())
}

/// Grows `img` by `margin` pixels on every side.
pub fn pad(img: &ImageF, margin: usize, policy: BorderPolicy) -> ImageF {
    let width = img.width + 2 * margin;
    let height = img.height + 2 * margin;
    let m = margin as isize;
    let mut samples = Vec::with_capacity(width * height);
    for r in 0..height as isize {
        for c in 0..width as isize {
            samples.push(img.get_bordered(r - m, c - m, policy));
        }
    }
    ImageF {
        width,
        height,
        samples,
    }
}

/// Clamps each sample to `[0, 255]` and rounds half away from zero.
pub fn quantize(img: &ImageF) -> Result<ImageU8> {
    // ImageF is finite by construction; re-check since it is cheap and the
    // contract is stated on this function.
    check_finite(&img.samples)?;
    Ok(ImageU8 {
        width: img.width,
        height: img.height,
        samples: img.samples.iter().map(|&v| quantize_sample(v)).collect(),
    })
}

#[inline]
pub(crate) fn quantize_sample(v: f64) -> u8 {
    v.clamp(0.0, 255.0).round() as u8
}
