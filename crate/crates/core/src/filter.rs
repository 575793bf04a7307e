//! 3×3 correlation and the sharpening mask used to precondition fusion inputs.
//!
//! The mask is `(1/9)·[[-1,-1,-1],[-1,17.9,-1],[-1,-1,-1]]`. Its coefficients
//! sum to 9.9, so a flat region comes out scaled by 1.1 while intensity
//! changes are amplified. Results are left unclamped.

use crate::error::{Error, Result};
use crate::image::{BorderPolicy, ImageF, ImageU8};

/// Center weight of the default sharpening mask.
pub const MASK_CENTER: f64 = 17.9;

/// A 3×3 mask with a scalar factor applied after the weighted sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kernel3 {
    coeffs: [[f64; 3]; 3],
    scale: f64,
}

impl Kernel3 {
    pub fn new(coeffs: [[f64; 3]; 3], scale: f64) -> Result<Self> {
        if !scale.is_finite() || coeffs.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig(
                "kernel coefficients must be finite".into(),
            ));
        }
        Ok(Kernel3 { coeffs, scale })
    }

    /// The mask that passes every image through unchanged.
    pub fn identity() -> Self {
        Kernel3 {
            coeffs: [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]],
            scale: 1.0,
        }
    }

    /// The sharpening mask with `center` in place of 17.9.
    pub fn sharpening(center: f64) -> Result<Self> {
        Self::new(
            [[-1.0, -1.0, -1.0], [-1.0, center, -1.0], [-1.0, -1.0, -1.0]],
            1.0 / 9.0,
        )
    }

    pub fn coeffs(&self) -> &[[f64; 3]; 3] {
        &self.coeffs
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Response to a constant image of value 1.
    pub fn dc_gain(&self) -> f64 {
        self.coeffs.iter().flatten().sum::<f64>() * self.scale
    }
}

/// The fusion preprocessing mask: center 17.9, eight neighbors −1, scale 1/9.
pub fn paper_mask() -> Kernel3 {
    Kernel3 {
        coeffs: [
            [-1.0, -1.0, -1.0],
            [-1.0, MASK_CENTER, -1.0],
            [-1.0, -1.0, -1.0],
        ],
        scale: 1.0 / 9.0,
    }
}

/// `out(r,c) = scale · Σ k[dr+1][dc+1] · img(r+dr, c+dc)` over `dr, dc ∈ {-1,0,1}`,
/// with out-of-range reads resolved by `policy`.
pub fn convolve3(img: &ImageF, k: &Kernel3, policy: BorderPolicy) -> Result<ImageF> {
    let (w, h) = img.dims();
    let src = img.samples();
    let mut out = vec![0.0; w * h];

    // Column indices of the left/center/right taps, resolved once per column.
    let cols: Vec<[usize; 3]> = (0..w as isize)
        .map(|c| {
            [
                policy.resolve(c - 1, w),
                c as usize,
                policy.resolve(c + 1, w),
            ]
        })
        .collect();

    for (r, out_row) in out.chunks_exact_mut(w).enumerate() {
        let r = r as isize;
        let rows = [
            &src[policy.resolve(r - 1, h) * w..][..w],
            &src[r as usize * w..][..w],
            &src[policy.resolve(r + 1, h) * w..][..w],
        ];
        for (o, cc) in out_row.iter_mut().zip(&cols) {
            let mut acc = 0.0;
            for (krow, row) in k.coeffs.iter().zip(&rows) {
                acc += krow[0] * row[cc[0]] + krow[1] * row[cc[1]] + krow[2] * row[cc[2]];
            }
            *o = k.scale * acc;
        }
    }
    ImageF::from_kernel_output(w, h, out)
}

/// Widens `img` and applies [`paper_mask`] with replicated borders.
pub fn preprocess(img: &ImageU8) -> ImageF {
    preprocess_with(img, &paper_mask())
}

/// [`preprocess`] with a caller-supplied mask.
pub fn preprocess_with(img: &ImageU8, k: &Kernel3) -> ImageF {
    convolve3(&img.widen(), k, BorderPolicy::Replicate)
        .expect("finite kernel applied to 8-bit samples stays finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Straightforward reference: explicit clamp on every tap.
    fn naive(img: &ImageF, k: &Kernel3) -> Vec<f64> {
        let (w, h) = img.dims();
        let mut out = Vec::new();
        for r in 0..h as isize {
            for c in 0..w as isize {
                let mut s = 0.0;
                for dr in -1..=1isize {
                    for dc in -1..=1isize {
                        let rr = (r + dr).max(0).min(h as isize - 1) as usize;
                        let cc = (c + dc).max(0).min(w as isize - 1) as usize;
                        s += k.coeffs()[(dr + 1) as usize][(dc + 1) as usize] * img.get(rr, cc);
                    }
                }
                out.push(s * k.scale());
            }
        }
        out
    }

    fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> ImageF {
        ImageF::from_fn(w, h, |_, _| rng.gen_range(0..=255) as f64).unwrap()
    }

    #[test]
    fn mask_values() {
        let k = paper_mask();
        assert_eq!(k.coeffs()[1][1], 17.9);
        let neighbors: Vec<f64> = k
            .coeffs()
            .iter()
            .flatten()
            .enumerate()
            .filter(|(i, _)| *i != 4)
            .map(|(_, &v)| v)
            .collect();
        assert_eq!(neighbors, vec![-1.0; 8]);
        assert_eq!(k.scale(), 1.0 / 9.0);
        assert!((k.dc_gain() - 1.1).abs() < 1e-12);
        assert_eq!(Kernel3::sharpening(MASK_CENTER).unwrap(), k);
    }

    #[test]
    fn impulse_response_is_scaled_mask() {
        let mut samples = vec![0.0; 25];
        samples[12] = 1.0;
        let img = ImageF::new(5, 5, samples).unwrap();
        let out = convolve3(&img, &paper_mask(), BorderPolicy::Replicate).unwrap();
        for dr in 0..3 {
            for dc in 0..3 {
                // Correlation flips the mask; it is point-symmetric.
                let expected = paper_mask().coeffs()[2 - dr][2 - dc] / 9.0;
                assert!((out.get(1 + dr, 1 + dc) - expected).abs() < 1e-15);
            }
        }
        assert_eq!(out.get(0, 0), 0.0);
    }

    #[test]
    fn constant_images() {
        let hundred = ImageU8::filled(7, 5, 100).unwrap();
        assert!(preprocess(&hundred)
            .samples()
            .iter()
            .all(|v| (v - 110.0).abs() < 1e-9));
        let zero = ImageU8::filled(4, 4, 0).unwrap();
        assert!(preprocess(&zero).samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn identity_kernel_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let img = random_image(&mut rng, 9, 6);
        assert_eq!(
            convolve3(&img, &Kernel3::identity(), BorderPolicy::Replicate).unwrap(),
            img
        );
    }

    #[test]
    fn random_5x5_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let img = random_image(&mut rng, 5, 5);
        let fast = convolve3(&img, &paper_mask(), BorderPolicy::Replicate).unwrap();
        for (a, b) in fast.samples().iter().zip(naive(&img, &paper_mask())) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn step_edge() {
        let img = ImageU8::from_fn(12, 6, |_, c| if c < 6 { 0 } else { 200 }).unwrap();
        let out = preprocess(&img);
        let oracle = naive(&img.widen(), &paper_mask());
        for (a, b) in out.samples().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        for r in 0..6 {
            assert!(out.get(r, 0).abs() < 1e-12);
            assert!((out.get(r, 11) - 220.0).abs() < 1e-9);
            // undershoot left of the edge, overshoot right of it
            assert!((out.get(r, 5) - (-600.0 / 9.0)).abs() < 1e-9);
            assert!((out.get(r, 6) - (200.0 * 12.9 / 9.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_finite_kernel() {
        assert!(Kernel3::sharpening(f64::INFINITY).is_err());
    }

    proptest! {
        #[test]
        fn linearity(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_image(&mut rng, 8, 7);
            let y = random_image(&mut rng, 8, 7);
            let mix = ImageF::from_fn(8, 7, |r, c| a * x.get(r, c) + b * y.get(r, c)).unwrap();
            let k = paper_mask();
            let lhs = convolve3(&mix, &k, BorderPolicy::Replicate).unwrap();
            let fx = convolve3(&x, &k, BorderPolicy::Replicate).unwrap();
            let fy = convolve3(&y, &k, BorderPolicy::Replicate).unwrap();
            for i in 0..lhs.len() {
                let rhs = a * fx.samples()[i] + b * fy.samples()[i];
                prop_assert!((lhs.samples()[i] - rhs).abs() < 1e-9);
            }
        }

        #[test]
        fn shift_covariance(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_image(&mut rng, 10, 8);
            let shifted = ImageF::from_fn(10, 8, |r, c| x.get(r, c.saturating_sub(1))).unwrap();
            let fx = convolve3(&x, &paper_mask(), BorderPolicy::Replicate).unwrap();
            let fs = convolve3(&shifted, &paper_mask(), BorderPolicy::Replicate).unwrap();
            for r in 1..7 {
                for c in 2..9 {
                    prop_assert_eq!(fs.get(r, c), fx.get(r, c - 1));
                }
            }
        }

        #[test]
        fn dims_preserved(w in 1usize..20, h in 1usize..20) {
            let img = ImageU8::filled(w, h, 3).unwrap();
            prop_assert_eq!(preprocess(&img).dims(), (w, h));
        }
    }
}
