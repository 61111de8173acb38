use crate::linalg::symmetric_eigen;
use crate::{Error, Result};

pub const NUM_COMPONENTS: usize = 4;
const JACOBI_TOL: f64 = 1e-10;

/// Projection onto the top principal directions of a training set.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Orthonormal, ordered by descending variance; the largest-magnitude
    /// entry of each is positive.
    pub components: [Vec<f64>; NUM_COMPONENTS],
    /// Variance captured by each component.
    pub variances: [f64; NUM_COMPONENTS],
    /// Full eigen-spectrum of the sample covariance, descending.
    pub spectrum: Vec<f64>,
    /// Per-feature range over the training projections.
    pub feature_min: [f64; NUM_COMPONENTS],
    pub feature_max: [f64; NUM_COMPONENTS],
}

/// Fits on `images` (each a flat pixel vector of the same length).
///
/// Constant pixels are dropped before the eigendecomposition since they
/// carry no variance. The cyclic Jacobi solver then runs on the covariance
/// of the remaining pixels, or on the Gram matrix of the centered samples
/// when there are fewer samples than pixels; both give the same nonzero
/// spectrum.
pub fn fit_pca(images: &[&[f64]]) -> Result<PcaModel> {
    let n = images.len();
    if n <= NUM_COMPONENTS {
        return Err(Error::Data(format!(
            "PCA needs more than {NUM_COMPONENTS} samples, got {n}"
        )));
    }
    let dim = images[0].len();
    if images.iter().any(|x| x.len() != dim) {
        return Err(Error::Data("images differ in length".into()));
    }
    let mut mean = vec![0.0; dim];
    for x in images {
        for (m, v) in mean.iter_mut().zip(x.iter()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);

    let active: Vec<usize> = (0..dim)
        .filter(|&j| images.iter().any(|x| x[j] != mean[j]))
        .collect();
    let a = active.len();
    if a < NUM_COMPONENTS {
        return Err(Error::Data(format!(
            "only {a} pixel(s) vary across the training set"
        )));
    }
    // centered samples restricted to varying pixels, row-major n x a
    let centered: Vec<f64> = images
        .iter()
        .flat_map(|x| active.iter().map(|&j| x[j] - mean[j]))
        .collect();
    let denom = (n - 1) as f64;

    let (spectrum, reduced_components): (Vec<f64>, Vec<Vec<f64>>) = if n < a {
        let mut gram = vec![0.0; n * n];
        for i in 0..n {
            let ri = &centered[i * a..(i + 1) * a];
            for k in 0..=i {
                let rk = &centered[k * a..(k + 1) * a];
                let v = ri.iter().zip(rk).map(|(p, q)| p * q).sum::<f64>() / denom;
                gram[i * n + k] = v;
                gram[k * n + i] = v;
            }
        }
        let eig = symmetric_eigen(&gram, n, JACOBI_TOL);
        let comps = eig.vectors[..NUM_COMPONENTS]
            .iter()
            .map(|u| {
                let mut v = vec![0.0; a];
                for (i, &ui) in u.iter().enumerate() {
                    for (vj, xj) in v.iter_mut().zip(&centered[i * a..(i + 1) * a]) {
                        *vj += ui * xj;
                    }
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter_mut().for_each(|x| *x /= norm.max(f64::MIN_POSITIVE));
                v
            })
            .collect();
        (eig.values, comps)
    } else {
        let mut cov = vec![0.0; a * a];
        for row in centered.chunks_exact(a) {
            for (p, &xp) in row.iter().enumerate() {
                if xp == 0.0 {
                    continue;
                }
                let dst = &mut cov[p * a..p * a + p + 1];
                for (c, &xq) in dst.iter_mut().zip(&row[..=p]) {
                    *c += xp * xq;
                }
            }
        }
        for p in 0..a {
            for q in 0..=p {
                let v = cov[p * a + q] / denom;
                cov[p * a + q] = v;
                cov[q * a + p] = v;
            }
        }
        let eig = symmetric_eigen(&cov, a, JACOBI_TOL);
        let comps = eig.vectors[..NUM_COMPONENTS].to_vec();
        (eig.values, comps)
    };

    let top = spectrum[0];
    let fourth = spectrum[NUM_COMPONENTS - 1];
    if top.is_nan() || top <= 0.0 || fourth <= 1e-10 * top {
        return Err(Error::Data(format!(
            "covariance rank below {NUM_COMPONENTS} (eigenvalues {:?})",
            &spectrum[..NUM_COMPONENTS]
        )));
    }

    let components: [Vec<f64>; NUM_COMPONENTS] = std::array::from_fn(|k| {
        let mut full = vec![0.0; dim];
        for (&j, &v) in active.iter().zip(&reduced_components[k]) {
            full[j] = v;
        }
        let pivot = full
            .iter()
            .copied()
            .max_by(|x, y| x.abs().total_cmp(&y.abs()))
            .unwrap_or(0.0);
        if pivot < 0.0 {
            full.iter_mut().for_each(|v| *v = -*v);
        }
        full
    });
    let variances = std::array::from_fn(|k| spectrum[k]);

    let mut model = PcaModel {
        mean,
        components,
        variances,
        spectrum,
        feature_min: [f64::INFINITY; NUM_COMPONENTS],
        feature_max: [f64::NEG_INFINITY; NUM_COMPONENTS],
    };
    for x in images {
        let f = model.project(x);
        for (k, v) in f.into_iter().enumerate() {
            model.feature_min[k] = model.feature_min[k].min(v);
            model.feature_max[k] = model.feature_max[k].max(v);
        }
    }
    Ok(model)
}

impl PcaModel {
    /// `componentsᵀ (x - mean)`.
    pub fn project(&self, pixels: &[f64]) -> [f64; NUM_COMPONENTS] {
        std::array::from_fn(|k| {
            self.components[k]
                .iter()
                .zip(pixels.iter().zip(&self.mean))
                .map(|(c, (x, m))| c * (x - m))
                .sum()
        })
    }

    /// `mean + Σ f_k component_k`.
    pub fn reconstruct(&self, features: &[f64; NUM_COMPONENTS]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (f, comp) in features.iter().zip(&self.components) {
            for (o, c) in out.iter_mut().zip(comp) {
                *o += f * c;
            }
        }
        out
    }

    /// Share of total variance captured by the retained components.
    pub fn explained_variance_ratio(&self) -> f64 {
        let total: f64 = self.spectrum.iter().map(|v| v.max(0.0)).sum();
        self.variances.iter().sum::<f64>() / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Points in a 4-dim affine subspace of R^12 spanned by coordinate pairs.
    fn subspace_points(n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                let t = i as f64;
                let coeffs = [
                    (t * 0.7).sin() * 3.0,
                    (t * 1.3).cos() * 2.0,
                    (t * 0.31).sin(),
                    (t * 2.9).cos() * 0.5,
                ];
                let mut x = vec![0.25; 12];
                for (k, c) in coeffs.iter().enumerate() {
                    x[2 * k] += c * 0.6;
                    x[2 * k + 1] += c * 0.8;
                }
                x
            })
            .collect()
    }

    fn fit(points: &[Vec<f64>]) -> Result<PcaModel> {
        let refs: Vec<&[f64]> = points.iter().map(|p| p.as_slice()).collect();
        fit_pca(&refs)
    }

    #[test]
    fn exact_subspace_is_reconstructed() {
        for n in [8, 40] {
            // n = 8 < 8 varying pixels exercises the Gram path; 40 the covariance path
            let pts = subspace_points(n);
            let model = fit(&pts).unwrap();
            for p in &pts {
                let r = model.reconstruct(&model.project(p));
                let err = r.iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                assert!(err < 1e-8, "n = {n}: residual {err}");
            }
        }
    }

    #[test]
    fn components_are_orthonormal_and_sorted() {
        let model = fit(&subspace_points(30)).unwrap();
        for i in 0..NUM_COMPONENTS {
            for j in 0..NUM_COMPONENTS {
                let dot: f64 = model.components[i]
                    .iter()
                    .zip(&model.components[j])
                    .map(|(a, b)| a * b)
                    .sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-8);
            }
            let pivot = model.components[i]
                .iter()
                .copied()
                .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                .unwrap();
            assert!(pivot > 0.0);
        }
        assert!(model.variances.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn mean_projects_to_origin_and_components_to_axes() {
        let model = fit(&subspace_points(30)).unwrap();
        let f = model.project(&model.mean);
        assert!(f.iter().all(|v| v.abs() < 1e-12));
        let shifted: Vec<f64> = model
            .mean
            .iter()
            .zip(&model.components[0])
            .map(|(m, c)| m + 2.5 * c)
            .collect();
        let f = model.project(&shifted);
        assert!((f[0] - 2.5).abs() < 1e-10);
        assert!(f[1..].iter().all(|v| v.abs() < 1e-10));
    }

    #[test]
    fn rank_deficient_input_is_rejected() {
        let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64, 0.0, 1.0, 3.0]).collect();
        assert!(matches!(fit(&pts), Err(Error::Data(_))));
        let few: Vec<Vec<f64>> = (0..4).map(|i| vec![i as f64; 6]).collect();
        assert!(fit(&few).is_err());
    }
}
