use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use super::pca::{PcaModel, NUM_COMPONENTS};
use crate::encoders::{EncodedInput, EncodingMethod};
use crate::{Error, Result};

/// Upper end of the rotation-encoding angle range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RotationRange {
    #[default]
    Pi,
    TwoPi,
}

impl RotationRange {
    pub fn max_angle(&self) -> f64 {
        match self {
            RotationRange::Pi => PI,
            RotationRange::TwoPi => TAU,
        }
    }
}

impl fmt::Display for RotationRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RotationRange::Pi => "pi",
            RotationRange::TwoPi => "two_pi",
        })
    }
}

impl FromStr for RotationRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pi" => Ok(RotationRange::Pi),
            "two_pi" | "2pi" => Ok(RotationRange::TwoPi),
            other => Err(Error::Config(format!("unknown rotation range '{other}'"))),
        }
    }
}

/// Maps PCA features to an encoder input using training-set ranges only.
///
/// * Rotation: each feature min-max scaled to `[0, max_angle]`, test
///   outliers clamped.
/// * Amplitude: each feature shifted by its training minimum; the encoder
///   normalizes.
/// * Basis: first feature min-max scaled to `[0, 1]` and quantized to
///   `min(floor(3 s), 2)`, giving 0, 1 or 2.
pub fn normalize_for(
    method: EncodingMethod,
    features: &[f64; NUM_COMPONENTS],
    model: &PcaModel,
    range: RotationRange,
) -> Result<EncodedInput> {
    let scaled = |k: usize| -> Result<f64> {
        let (lo, hi) = (model.feature_min[k], model.feature_max[k]);
        let span = hi - lo;
        if span.is_nan() || span <= 0.0 {
            return Err(Error::Data(format!("feature {k} has zero training range")));
        }
        Ok(((features[k] - lo) / span).clamp(0.0, 1.0))
    };
    let input = match method {
        EncodingMethod::Rotation => {
            let mut angles = [0.0; NUM_COMPONENTS];
            for (k, a) in angles.iter_mut().enumerate() {
                *a = scaled(k)? * range.max_angle();
            }
            EncodedInput::Rotation(angles)
        }
        EncodingMethod::Amplitude => {
            for k in 0..NUM_COMPONENTS {
                scaled(k)?;
            }
            EncodedInput::Amplitude(std::array::from_fn(|k| features[k] - model.feature_min[k]))
        }
        EncodingMethod::Basis => {
            let s = scaled(0)?;
            EncodedInput::Basis(((s * 3.0).floor() as u32).min(2))
        }
    };
    input.validate()?;
    Ok(input)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> PcaModel {
        PcaModel {
            mean: vec![0.0; 4],
            components: std::array::from_fn(|k| {
                let mut v = vec![0.0; 4];
                v[k] = 1.0;
                v
            }),
            variances: [4.0, 3.0, 2.0, 1.0],
            spectrum: vec![4.0, 3.0, 2.0, 1.0],
            feature_min: [-2.0, -1.0, 0.0, 1.0],
            feature_max: [2.0, 1.0, 4.0, 3.0],
        }
    }

    #[test]
    fn rotation_boundaries() {
        let m = model();
        let lo = normalize_for(EncodingMethod::Rotation, &m.feature_min, &m, RotationRange::Pi).unwrap();
        assert_eq!(lo, EncodedInput::Rotation([0.0; 4]));
        let hi = normalize_for(EncodingMethod::Rotation, &m.feature_max, &m, RotationRange::Pi).unwrap();
        assert_eq!(hi, EncodedInput::Rotation([PI; 4]));
        let out = normalize_for(EncodingMethod::Rotation, &[9.0, -9.0, 2.0, 2.0], &m, RotationRange::TwoPi)
            .unwrap();
        assert_eq!(out, EncodedInput::Rotation([TAU, 0.0, PI, PI]));
    }

    #[test]
    fn basis_quantization() {
        let m = model();
        // feature 0 range [-2, 2]: s = 0.99 -> floor(2.97) = 2
        let at = |s: f64| {
            normalize_for(EncodingMethod::Basis, &[-2.0 + 4.0 * s, 0.0, 0.0, 0.0], &m, RotationRange::Pi)
                .unwrap()
        };
        assert_eq!(at(0.99), EncodedInput::Basis(2));
        assert_eq!(at(1.0), EncodedInput::Basis(2));
        assert_eq!(at(0.0), EncodedInput::Basis(0));
        assert_eq!(at(0.5), EncodedInput::Basis(1));
        assert_eq!(at(0.34), EncodedInput::Basis(1));
        assert_eq!(at(1.7), EncodedInput::Basis(2));
    }

    #[test]
    fn amplitude_shifts_by_training_minimum() {
        let m = model();
        let out =
            normalize_for(EncodingMethod::Amplitude, &[0.0, 0.0, 1.0, 2.0], &m, RotationRange::Pi).unwrap();
        assert_eq!(out, EncodedInput::Amplitude([2.0, 1.0, 1.0, 1.0]));
        // every feature at its minimum cannot be normalized
        assert!(normalize_for(EncodingMethod::Amplitude, &m.feature_min, &m, RotationRange::Pi).is_err());
    }

    #[test]
    fn zero_range_is_data_error() {
        let mut m = model();
        m.feature_max[0] = m.feature_min[0];
        for method in EncodingMethod::ALL {
            assert!(matches!(
                normalize_for(method, &[0.0; 4], &m, RotationRange::Pi),
                Err(Error::Data(_))
            ));
        }
    }
}
