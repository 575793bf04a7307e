//! Comparison fusers: the pixelwise mean and a PCA-weighted average.

use crate::error::Result;
use crate::fusion::{FusionResult, PcaWeights};
use crate::image::{ensure_same_dims, ImageF, ImageU8};

/// `(x + y) / 2` per pixel.
pub fn fuse_average(x: &ImageU8, y: &ImageU8) -> Result<FusionResult> {
    ensure_same_dims(x.dims(), y.dims())?;
    let samples = x
        .samples()
        .iter()
        .zip(y.samples())
        .map(|(&a, &b)| (f64::from(a) + f64::from(b)) / 2.0)
        .collect();
    FusionResult::from_float(ImageF::from_kernel_output(x.width(), x.height(), samples)?)
}

/// Weighted average `w_x·x + w_y·y` with weights taken from the principal
/// eigenvector `(e1, e2)` of the 2×2 covariance of the two images, normalized
/// so that `w_x = e1 / (e1 + e2)`.
pub fn fuse_pca(x: &ImageU8, y: &ImageU8) -> Result<FusionResult> {
    ensure_same_dims(x.dims(), y.dims())?;
    let weights = pca_weights(x, y);
    let samples = x
        .samples()
        .iter()
        .zip(y.samples())
        .map(|(&a, &b)| weights.w_x * f64::from(a) + weights.w_y * f64::from(b))
        .collect();
    let mut result =
        FusionResult::from_float(ImageF::from_kernel_output(x.width(), x.height(), samples)?)?;
    result.pca = Some(weights);
    Ok(result)
}

/// Population covariance `[[var_x, cov], [cov, var_y]]` of the flattened pair.
pub fn covariance(x: &ImageU8, y: &ImageU8) -> [[f64; 2]; 2] {
    let n = x.len() as f64;
    let mean = |img: &ImageU8| img.samples().iter().map(|&v| f64::from(v)).sum::<f64>() / n;
    let (mx, my) = (mean(x), mean(y));
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.samples().iter().zip(y.samples()) {
        let da = f64::from(a) - mx;
        let db = f64::from(b) - my;
        sxx += da * da;
        syy += db * db;
        sxy += da * db;
    }
    [[sxx / n, sxy / n], [sxy / n, syy / n]]
}

pub fn pca_weights(x: &ImageU8, y: &ImageU8) -> PcaWeights {
    const EQUAL: PcaWeights = PcaWeights {
        w_x: 0.5,
        w_y: 0.5,
        degenerate: true,
    };
    let [[a, b], [_, d]] = covariance(x, y);
    // A multiple of the identity has no preferred axis.
    if b == 0.0 && a == d {
        return EQUAL;
    }
    // The principal axis of a symmetric 2×2 matrix sits at half the angle
    // of (a - d, 2b).
    let theta = 0.5 * (2.0 * b).atan2(a - d);
    let (mut e1, mut e2) = (theta.cos(), theta.sin());
    if e1 + e2 < 0.0 {
        e1 = -e1;
        e2 = -e2;
    }
    let sum = e1 + e2;
    if sum.abs() < 1e-12 {
        return EQUAL;
    }
    PcaWeights {
        w_x: e1 / sum,
        w_y: e2 / sum,
        degenerate: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // Principal eigenvector through the characteristic polynomial.
    fn eigen_oracle(c: [[f64; 2]; 2]) -> (f64, f64) {
        let [[a, b], [_, d]] = c;
        let tr = a + d;
        let det = a * d - b * b;
        let lambda = tr / 2.0 + (tr * tr / 4.0 - det).sqrt();
        let (mut e1, mut e2) = if b.abs() > 0.0 {
            (b, lambda - a)
        } else if a >= d {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        if e1 + e2 < 0.0 {
            e1 = -e1;
            e2 = -e2;
        }
        (e1 / (e1 + e2), e2 / (e1 + e2))
    }

    #[test]
    fn average_constants() {
        let x = ImageU8::filled(3, 3, 100).unwrap();
        let y = ImageU8::filled(3, 3, 200).unwrap();
        let r = fuse_average(&x, &y).unwrap();
        assert!(r.fused_f.samples().iter().all(|&v| v == 150.0));
        assert!(r.decision.is_none());
    }

    #[test]
    fn average_is_idempotent_and_rounds_half_up() {
        let x = ImageU8::new(2, 1, vec![0, 255]).unwrap();
        assert_eq!(fuse_average(&x, &x).unwrap().fused_u8, x);
        let y = ImageU8::new(2, 1, vec![255, 0]).unwrap();
        let r = fuse_average(&x, &y).unwrap();
        assert_eq!(r.fused_f.samples(), &[127.5, 127.5]);
        assert_eq!(r.fused_u8.samples(), &[128, 128]);
    }

    #[test]
    fn pca_identical_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = ImageU8::from_fn(8, 8, |_, _| rng.gen()).unwrap();
        let r = fuse_pca(&x, &x).unwrap();
        let w = r.pca.unwrap();
        assert!((w.w_x - 0.5).abs() < 1e-12 && (w.w_y - 0.5).abs() < 1e-12);
        assert!(!w.degenerate);
        assert_eq!(r.fused_u8, x);
        for (f, &v) in r.fused_f.samples().iter().zip(x.samples()) {
            assert!((f - f64::from(v)).abs() < 1e-9);
        }
    }

    #[test]
    fn pca_constant_partner() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = ImageU8::from_fn(8, 8, |_, _| rng.gen()).unwrap();
        let y = ImageU8::filled(8, 8, 77).unwrap();
        let r = fuse_pca(&x, &y).unwrap();
        assert_eq!(r.pca.unwrap().w_x, 1.0);
        assert_eq!(r.fused_u8, x);
    }

    #[test]
    fn pca_degenerate() {
        let x = ImageU8::filled(4, 4, 10).unwrap();
        let y = ImageU8::filled(4, 4, 90).unwrap();
        let r = fuse_pca(&x, &y).unwrap();
        assert!(r.pca.unwrap().degenerate);
        assert!(r.fused_f.samples().iter().all(|&v| v == 50.0));
    }

    #[test]
    fn pca_matches_quadratic_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = ImageU8::from_fn(8, 8, |_, _| rng.gen()).unwrap();
            // correlated partner so the weights stay positive
            let y = ImageU8::from_fn(8, 8, |r, c| {
                let base = x.get(r, c) as i32 / 2 + rng.gen_range(0..128);
                base.clamp(0, 255) as u8
            })
            .unwrap();
            let w = pca_weights(&x, &y);
            let (o1, o2) = eigen_oracle(covariance(&x, &y));
            assert!((w.w_x - o1).abs() < 1e-9, "{} vs {}", w.w_x, o1);
            assert!((w.w_y - o2).abs() < 1e-9);
        }
    }

    #[test]
    fn baselines_are_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let x = ImageU8::from_fn(9, 6, |_, _| rng.gen()).unwrap();
            let y = ImageU8::from_fn(9, 6, |_, _| rng.gen()).unwrap();
            assert_eq!(fuse_average(&x, &y).unwrap(), fuse_average(&y, &x).unwrap());
            let a = fuse_pca(&x, &y).unwrap();
            let b = fuse_pca(&y, &x).unwrap();
            for (p, q) in a.fused_f.samples().iter().zip(b.fused_f.samples()) {
                assert!((p - q).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn dimension_mismatch() {
        let x = ImageU8::filled(2, 2, 0).unwrap();
        let y = ImageU8::filled(3, 2, 0).unwrap();
        assert!(matches!(
            fuse_average(&x, &y),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            fuse_pca(&x, &y),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
