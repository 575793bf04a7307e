//! Synthetic complementary-blur pairs with known ground truth.
//!
//! Source `a` is a sharp base with every column left of the seam blurred,
//! source `b` is the same base blurred right of the seam. A good fuser picks
//! `b` left of the seam and `a` right of it.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fusion::{DecisionMap, Selection};
use crate::image::{quantize_sample, BorderPolicy, ImageU8};
use crate::pgm::write_pgm_file;

/// Blur widths below this leave the image untouched.
const MIN_SIGMA: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntheticPair {
    pub a: ImageU8,
    pub b: ImageU8,
    /// The sharp source per pixel.
    pub truth: DecisionMap,
    pub seam: usize,
}

/// Separable Gaussian blur truncated at 3σ, replicated borders, rounded back
/// to 8 bits.
pub fn gaussian_blur(img: &ImageU8, sigma: f64) -> ImageU8 {
    if sigma.is_nan() || sigma < MIN_SIGMA {
        return img.clone();
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);

    let (w, h) = img.dims();
    let border = BorderPolicy::Replicate;
    let src = img.samples();
    let mut horiz = vec![0.0; w * h];
    for r in 0..h {
        for c in 0..w {
            horiz[r * w + c] = taps
                .iter()
                .zip(-radius..)
                .map(|(t, d)| t * f64::from(src[r * w + border.resolve(c as isize + d, w)]))
                .sum();
        }
    }
    ImageU8::from_fn(w, h, |r, c| {
        let v: f64 = taps
            .iter()
            .zip(-radius..)
            .map(|(t, d)| t * horiz[border.resolve(r as isize + d, h) * w + c])
            .sum();
        quantize_sample(v)
    })
    .expect("dimensions come from a valid image")
}

/// Builds the pair for one base image. `seam` must satisfy `0 < seam < width`.
pub fn generate_synthetic_pair(
    base: &ImageU8,
    seam: usize,
    blur_sigma: f64,
) -> Result<SyntheticPair> {
    let (w, h) = base.dims();
    if seam == 0 || seam >= w {
        return Err(Error::DegenerateSeam { seam, width: w });
    }
    let blurred = gaussian_blur(base, blur_sigma);
    let a = ImageU8::from_fn(w, h, |r, c| {
        if c < seam {
            blurred.get(r, c)
        } else {
            base.get(r, c)
        }
    })?;
    let b = ImageU8::from_fn(w, h, |r, c| {
        if c < seam {
            base.get(r, c)
        } else {
            blurred.get(r, c)
        }
    })?;
    let truth = (0..h)
        .flat_map(|_| (0..w).map(|c| if c < seam { Selection::Y } else { Selection::X }))
        .collect();
    Ok(SyntheticPair {
        a,
        b,
        truth: DecisionMap::new(w, h, truth)?,
        seam,
    })
}

/// Grain amplitude used by [`textured_base`].
pub const DEFAULT_GRAIN: f64 = 24.0;

/// A procedurally textured test scene: a smooth gradient, overlapping
/// rectangles and discs, and fine grain noise everywhere.
pub fn textured_base(width: usize, height: usize, seed: u64) -> ImageU8 {
    textured_base_with_grain(width, height, seed, DEFAULT_GRAIN)
}

/// [`textured_base`] with uniform grain noise in `[-grain, grain]`.
pub fn textured_base_with_grain(width: usize, height: usize, seed: u64, grain: f64) -> ImageU8 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (wf, hf) = (width as f64, height as f64);
    let gx = rng.gen_range(-60.0..60.0);
    let gy = rng.gen_range(-60.0..60.0);
    let mut canvas: Vec<f64> = (0..height)
        .flat_map(|r| {
            (0..width).map(move |c| 128.0 + gx * (c as f64 / wf - 0.5) + gy * (r as f64 / hf - 0.5))
        })
        .collect();

    let shapes = 12 + (width * height) / 2048;
    for _ in 0..shapes {
        let level = rng.gen_range(20.0..235.0);
        let cx = rng.gen_range(0.0..wf);
        let cy = rng.gen_range(0.0..hf);
        let extent = rng.gen_range(0.03..0.2) * wf.min(hf) + 1.0;
        let disc = rng.gen_bool(0.5);
        for r in 0..height {
            for c in 0..width {
                let (dx, dy) = (c as f64 - cx, r as f64 - cy);
                let inside = if disc {
                    dx * dx + dy * dy <= extent * extent
                } else {
                    dx.abs() <= extent && dy.abs() <= 0.6 * extent
                };
                if inside {
                    canvas[r * width + c] = level;
                }
            }
        }
    }
    let samples = canvas
        .into_iter()
        .map(|v| {
            quantize_sample(
                v + if grain > 0.0 {
                    rng.gen_range(-grain..grain)
                } else {
                    0.0
                },
            )
        })
        .collect();
    ImageU8::new(width, height, samples).expect("dimensions are positive")
}

/// `count` pairs over fresh textured scenes, seams drawn from the middle half
/// of the width. Ids are `pair000`, `pair001`, ...
pub fn synthetic_set(
    count: usize,
    width: usize,
    height: usize,
    blur_sigma: f64,
    seed: u64,
) -> Result<Vec<(String, SyntheticPair)>> {
    if width < 2 || height == 0 {
        return Err(Error::InvalidConfig(format!(
            "synthetic scenes need width >= 2 and height >= 1, got {width}x{height}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let base = textured_base(width, height, rng.gen());
            let seam = random_seam(&mut rng, width);
            Ok((
                pair_id(i),
                generate_synthetic_pair(&base, seam, blur_sigma)?,
            ))
        })
        .collect()
}

/// `count` pairs derived from one base by random circular shifts and seams.
pub fn synthetic_set_from_base(
    base: &ImageU8,
    count: usize,
    blur_sigma: f64,
    seed: u64,
) -> Result<Vec<(String, SyntheticPair)>> {
    let (w, h) = base.dims();
    if w < 2 {
        return Err(Error::DegenerateSeam { seam: 0, width: w });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let (dx, dy) = (rng.gen_range(0..w), rng.gen_range(0..h));
            let shifted = ImageU8::from_fn(w, h, |r, c| base.get((r + dy) % h, (c + dx) % w))?;
            let seam = random_seam(&mut rng, w);
            Ok((
                pair_id(i),
                generate_synthetic_pair(&shifted, seam, blur_sigma)?,
            ))
        })
        .collect()
}

fn random_seam(rng: &mut ChaCha8Rng, width: usize) -> usize {
    let lo = (width / 4).max(1);
    let hi = (3 * width / 4).max(lo + 1).min(width);
    rng.gen_range(lo..hi)
}

fn pair_id(i: usize) -> String {
    format!("pair{i:03}")
}

/// Writes `<id>_a.pgm`, `<id>_b.pgm` and `<id>_truth.pgm` (255 where `a` is
/// the sharp source) for every pair.
pub fn write_synthetic_set(dir: &Path, pairs: &[(String, SyntheticPair)]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (id, pair) in pairs {
        write_pgm_file(dir.join(format!("{id}_a.pgm")), &pair.a)?;
        write_pgm_file(dir.join(format!("{id}_b.pgm")), &pair.b)?;
        write_pgm_file(dir.join(format!("{id}_truth.pgm")), &pair.truth.to_image())?;
    }
    Ok(())
}
