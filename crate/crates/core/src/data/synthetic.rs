use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{ImageSample, IMAGE_PIXELS};
use crate::{Error, Result};

const BLOCK: usize = IMAGE_PIXELS / 4;

/// Two labelled blobs ('3' and '6') living in a 4-dimensional subspace of
/// pixel space. Each direction is the normalized indicator of one quarter of
/// the image. The first coordinate separates the classes with a margin of 2
/// (class '3' above +1, class '6' below -1); the other three are shared
/// Gaussian spread. Pixel values stay inside `[0, 1]`.
pub fn make_synthetic_dataset(seed: u64, n: usize) -> Result<Vec<ImageSample>> {
    if n < 8 {
        return Err(Error::Data(format!("synthetic dataset needs n >= 8, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset = Normal::<f64>::new(1.5, 0.5).expect("valid normal");
    let spread = Normal::<f64>::new(0.0, 1.0).expect("valid normal");
    let scale = 1.0 / (BLOCK as f64).sqrt();
    (0..n)
        .map(|i| {
            let (label, sign) = if i % 2 == 0 { (3, 1.0) } else { (6, -1.0) };
            let mut coeffs = [0.0; 4];
            coeffs[0] = sign * (1.0 + offset.sample(&mut rng).abs()).min(4.5);
            for c in coeffs.iter_mut().skip(1) {
                *c = (spread.sample(&mut rng) * rng.random_range(0.5f64..1.5)).clamp(-4.5, 4.5);
            }
            let pixels = (0..IMAGE_PIXELS)
                .map(|p| 0.5 + coeffs[p / BLOCK] * scale)
                .collect();
            ImageSample::new(pixels, label)
        })
        .collect()
}
