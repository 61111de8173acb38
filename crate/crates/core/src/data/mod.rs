//! MNIST ingestion, digit filtering, PCA feature extraction and
//! per-encoding normalization.

mod idx;
mod normalize;
mod pca;
mod synthetic;

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

pub use idx::{encode_idx_images, encode_idx_labels, parse_idx, IdxData};
pub use normalize::{normalize_for, RotationRange};
pub use pca::{fit_pca, PcaModel, NUM_COMPONENTS};
pub use synthetic::make_synthetic_dataset;

use crate::model::ClassLabel;
use crate::{Error, Result};

pub const IMAGE_SIDE: usize = 28;
pub const IMAGE_PIXELS: usize = IMAGE_SIDE * IMAGE_SIDE;

/// 28x28 grayscale image in `[0, 1]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSample {
    pub pixels: Vec<f64>,
    pub label: u8,
}

impl ImageSample {
    pub fn new(pixels: Vec<f64>, label: u8) -> Result<Self> {
        if pixels.len() != IMAGE_PIXELS {
            return Err(Error::Data(format!(
                "image has {} pixels, expected {IMAGE_PIXELS}",
                pixels.len()
            )));
        }
        if label > 9 {
            return Err(Error::Data(format!("label {label} is not a digit")));
        }
        Ok(Self { pixels, label })
    }
}

/// Image/label file pairs looked up in a dataset directory, in order.
pub const IDX_FILE_PAIRS: [(&str, &str); 2] = [
    ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
    ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
];

/// Loads every image/label pair present in `dir` and pools the images of
/// digits 3 and 6. At least one pair must exist.
pub fn load_idx_dir(dir: &Path) -> Result<Vec<ImageSample>> {
    if !dir.is_dir() {
        return Err(Error::Config(format!(
            "dataset directory {} does not exist",
            dir.display()
        )));
    }
    let mut pooled = Vec::new();
    let mut found = false;
    for (images, labels) in IDX_FILE_PAIRS {
        let (ip, lp) = (dir.join(images), dir.join(labels));
        if !ip.exists() && !lp.exists() {
            continue;
        }
        found = true;
        let read = |p: &Path| {
            std::fs::read(p).map_err(|e| Error::Data(format!("reading {}: {e}", p.display())))
        };
        let IdxData::Images { pixels, .. } = parse_idx(&read(&ip)?)? else {
            return Err(Error::Data(format!("{} does not hold images", ip.display())));
        };
        let IdxData::Labels(labels) = parse_idx(&read(&lp)?)? else {
            return Err(Error::Data(format!("{} does not hold labels", lp.display())));
        };
        if pixels.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} images but {} labels in {}",
                pixels.len(),
                labels.len(),
                dir.display()
            )));
        }
        for (p, l) in pixels.into_iter().zip(labels) {
            if ClassLabel::from_digit(l).is_some() {
                pooled.push(ImageSample::new(p, l)?);
            }
        }
    }
    if !found {
        return Err(Error::Config(format!(
            "no IDX image/label files in {}",
            dir.display()
        )));
    }
    Ok(pooled)
}

/// A balanced, disjoint train/test draw of the two classes.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Vec<(ImageSample, ClassLabel)>,
    pub test: Vec<(ImageSample, ClassLabel)>,
}

/// Draws `train_size` and `test_size` samples split evenly between digits 3
/// and 6 (class '3' takes the extra sample when a size is odd). Train and
/// test never share an image.
pub fn balanced_split<R: Rng + ?Sized>(
    pool: &[ImageSample],
    train_size: usize,
    test_size: usize,
    rng: &mut R,
) -> Result<Split> {
    let mut split = Split {
        train: Vec::with_capacity(train_size),
        test: Vec::with_capacity(test_size),
    };
    for label in ClassLabel::BOTH {
        let share = |n: usize| match label {
            ClassLabel::Three => n - n / 2,
            ClassLabel::Six => n / 2,
        };
        let (n_train, n_test) = (share(train_size), share(test_size));
        let mut members: Vec<&ImageSample> =
            pool.iter().filter(|s| s.label == label.digit()).collect();
        if members.len() < n_train + n_test {
            return Err(Error::Data(format!(
                "need {} images of digit {label}, dataset has {}",
                n_train + n_test,
                members.len()
            )));
        }
        members.shuffle(rng);
        split
            .train
            .extend(members[..n_train].iter().map(|s| ((*s).clone(), label)));
        split.test.extend(
            members[n_train..n_train + n_test]
                .iter()
                .map(|s| ((*s).clone(), label)),
        );
    }
    Ok(split)
}
