//! Principal component analysis on mean-centered columns.

use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::matrix::{default_column_names, LabeledFeatureMatrix};

pub const PCA_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PcaError {
    #[error("n_components = {requested} outside 1..={max}")]
    ComponentsOutOfRange { requested: usize, max: usize },
    #[error("retained-variance fraction {0} outside (0, 1]")]
    BadFraction(f64),
    #[error("matrix has {actual} columns, basis expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("unsupported basis schema version {0}")]
    SchemaVersion(u32),
    #[error("basis file: {0}")]
    Io(#[from] std::io::Error),
    #[error("basis file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaBasis {
    pub schema_version: u32,
    pub mean: Vec<f64>,
    /// One unit-norm direction per row.
    pub components: Vec<Vec<f64>>,
    /// Variance along each component, nonincreasing.
    pub explained_variance: Vec<f64>,
    /// Sum of all column variances of the fitted data.
    pub total_variance: f64,
}

impl PcaBasis {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn explained_ratio(&self) -> f64 {
        if self.total_variance > 0.0 {
            self.explained_variance.iter().sum::<f64>() / self.total_variance
        } else {
            1.0
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), PcaError> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, PcaError> {
        let basis: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if basis.schema_version != PCA_SCHEMA_VERSION {
            return Err(PcaError::SchemaVersion(basis.schema_version));
        }
        Ok(basis)
    }
}

struct Decomposition {
    mean: Vec<f64>,
    /// (variance, direction) sorted by decreasing variance.
    pairs: Vec<(f64, Vec<f64>)>,
    total: f64,
}

fn decompose(m: &LabeledFeatureMatrix) -> Decomposition {
    let (n, d) = (m.rows(), m.cols());
    let mean = m.column_means();
    let centered = DMatrix::from_fn(n, d, |i, j| m.row(i)[j] - mean[j]);
    let denom = (n.max(2) - 1) as f64;
    let cov = (centered.transpose() * &centered) / denom;
    let total = cov.trace();
    let eig = SymmetricEigen::new(cov);

    let mut pairs: Vec<(f64, Vec<f64>)> = (0..d)
        .map(|k| {
            let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
            // Sign convention: the largest-magnitude coordinate is positive.
            let lead = v
                .iter()
                .enumerate()
                .fold(0, |best, (i, x)| if x.abs() > v[best].abs() { i } else { best });
            if v[lead] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            (eig.eigenvalues[k].max(0.0), v)
        })
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Decomposition { mean, pairs, total }
}

fn max_components(m: &LabeledFeatureMatrix) -> usize {
    m.cols().min(m.rows().saturating_sub(1))
}

/// Fits the top `n_components` directions of the column covariance.
pub fn pca_fit(m: &LabeledFeatureMatrix, n_components: usize) -> Result<PcaBasis, PcaError> {
    let max = max_components(m);
    if n_components == 0 || n_components > max {
        return Err(PcaError::ComponentsOutOfRange {
            requested: n_components,
            max,
        });
    }
    let dec = decompose(m);
    Ok(basis_from(dec, n_components))
}

/// Fits the smallest basis whose retained variance reaches `fraction` of the total.
pub fn pca_fit_variance(m: &LabeledFeatureMatrix, fraction: f64) -> Result<PcaBasis, PcaError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(PcaError::BadFraction(fraction));
    }
    let max = max_components(m);
    if max == 0 {
        return Err(PcaError::ComponentsOutOfRange {
            requested: 1,
            max,
        });
    }
    let dec = decompose(m);
    let mut acc = 0.0;
    let mut n = max;
    for (k, (var, _)) in dec.pairs.iter().enumerate().take(max) {
        acc += var;
        if acc >= fraction * dec.total {
            n = k + 1;
            break;
        }
    }
    Ok(basis_from(dec, n))
}

fn basis_from(dec: Decomposition, n: usize) -> PcaBasis {
    let (explained_variance, components) = dec.pairs.into_iter().take(n).unzip();
    PcaBasis {
        schema_version: PCA_SCHEMA_VERSION,
        mean: dec.mean,
        components,
        explained_variance,
        total_variance: dec.total,
    }
}

/// Projects rows onto the basis. Labels are carried through.
pub fn pca_transform(
    b: &PcaBasis,
    m: &LabeledFeatureMatrix,
) -> Result<LabeledFeatureMatrix, PcaError> {
    if m.cols() != b.dim() {
        return Err(PcaError::DimensionMismatch {
            expected: b.dim(),
            actual: m.cols(),
        });
    }
    let k = b.n_components();
    let mut data = Vec::with_capacity(m.rows() * k);
    for i in 0..m.rows() {
        let row = m.row(i);
        for comp in &b.components {
            data.push(
                comp.iter()
                    .zip(row.iter().zip(&b.mean))
                    .map(|(c, (x, mu))| c * (x - mu))
                    .sum(),
            );
        }
    }
    Ok(LabeledFeatureMatrix::new(
        m.rows(),
        k,
        data,
        m.labels().to_vec(),
        default_column_names(k),
    )
    .expect("projection of a valid matrix is valid"))
}

/// Maps projected rows back to the original attribute space.
pub fn pca_inverse(
    b: &PcaBasis,
    reduced: &LabeledFeatureMatrix,
) -> Result<LabeledFeatureMatrix, PcaError> {
    if reduced.cols() != b.n_components() {
        return Err(PcaError::DimensionMismatch {
            expected: b.n_components(),
            actual: reduced.cols(),
        });
    }
    let d = b.dim();
    let mut data = Vec::with_capacity(reduced.rows() * d);
    for i in 0..reduced.rows() {
        let z = reduced.row(i);
        for j in 0..d {
            data.push(b.mean[j] + z.iter().zip(&b.components).map(|(zk, c)| zk * c[j]).sum::<f64>());
        }
    }
    Ok(LabeledFeatureMatrix::new(
        reduced.rows(),
        d,
        data,
        reduced.labels().to_vec(),
        default_column_names(d),
    )
    .expect("reconstruction of a valid matrix is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> LabeledFeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<Vec<f64>> = (0..rows)
            .map(|_| (0..cols).map(|_| rng.random::<f64>()).collect())
            .collect();
        let labels = (0..rows).map(|i| if i % 2 == 0 { "NP" } else { "P" }.to_string()).collect();
        LabeledFeatureMatrix::from_rows(&data, labels).unwrap()
    }

    fn gram_error(b: &PcaBasis) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in b.components.iter().enumerate() {
            for (j, c) in b.components.iter().enumerate() {
                let dot: f64 = a.iter().zip(c).map(|(x, y)| x * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    #[test]
    fn collinear_points() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64 + 1.0]).collect();
        let m = LabeledFeatureMatrix::from_rows(&rows, vec!["a".into(); 10]).unwrap();
        let b = pca_fit(&m, 2).unwrap();
        let total: f64 = b.explained_variance.iter().sum();
        assert!(b.explained_variance[0] / total >= 0.99999);
        assert!(b.components[0][1] > 0.0);
    }

    #[test]
    fn full_rank_round_trip() {
        let m = random_matrix(30, 6, 1);
        let b = pca_fit(&m, 6).unwrap();
        let back = pca_inverse(&b, &pca_transform(&b, &m).unwrap()).unwrap();
        for (x, y) in back.data().iter().zip(m.data()) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn shapes_orthonormality_and_centering() {
        let m = random_matrix(113, 75, 2);
        let b = pca_fit(&m, 50).unwrap();
        assert!(gram_error(&b) < 1e-10);
        assert!(b.explained_variance.windows(2).all(|w| w[0] >= w[1]));
        let z = pca_transform(&b, &m).unwrap();
        assert_eq!((z.rows(), z.cols()), (113, 50));
        assert_eq!(z.labels(), m.labels());
        assert_eq!(z.column_names()[49], "f049");
        assert!(z.column_means().iter().all(|mu| mu.abs() < 1e-12));
        // projected variance equals the retained eigenvalues
        let projected: f64 = (0..50)
            .map(|j| (0..113).map(|i| z.row(i)[j].powi(2)).sum::<f64>() / 112.0)
            .sum();
        let retained: f64 = b.explained_variance.iter().sum();
        assert!((projected - retained).abs() < 1e-8);
    }

    #[test]
    fn reconstruction_error_shrinks_with_more_components() {
        let m = random_matrix(40, 8, 3);
        let mut last = f64::INFINITY;
        for k in 1..=8 {
            let b = pca_fit(&m, k).unwrap();
            let back = pca_inverse(&b, &pca_transform(&b, &m).unwrap()).unwrap();
            let err: f64 = back.data().iter().zip(m.data()).map(|(x, y)| (x - y).powi(2)).sum();
            assert!(err <= last + 1e-12);
            last = err;
        }
        assert!(last < 1e-18);
    }

    #[test]
    fn range_checks() {
        let m = random_matrix(5, 10, 4);
        assert!(matches!(pca_fit(&m, 0), Err(PcaError::ComponentsOutOfRange { .. })));
        assert!(matches!(
            pca_fit(&m, 5),
            Err(PcaError::ComponentsOutOfRange { requested: 5, max: 4 })
        ));
        let b = pca_fit(&m, 4).unwrap();
        let other = random_matrix(5, 9, 4);
        assert!(matches!(
            pca_transform(&b, &other),
            Err(PcaError::DimensionMismatch { .. })
        ));
        assert!(matches!(pca_fit_variance(&m, 1.5), Err(PcaError::BadFraction(_))));
    }

    #[test]
    fn variance_threshold_picks_smallest_basis() {
        let m = random_matrix(60, 12, 5);
        let b = pca_fit_variance(&m, 0.8).unwrap();
        let full = pca_fit(&m, 12).unwrap();
        let needed = full
            .explained_variance
            .iter()
            .scan(0.0, |acc, v| {
                *acc += v;
                Some(*acc)
            })
            .position(|acc| acc >= 0.8 * full.total_variance)
            .unwrap()
            + 1;
        assert_eq!(b.n_components(), needed);
        assert!(b.explained_ratio() >= 0.8);
    }

    #[test]
    fn fit_is_deterministic_and_persists() {
        let m = random_matrix(20, 5, 6);
        let b = pca_fit(&m, 3).unwrap();
        assert_eq!(b, pca_fit(&m, 3).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("basis.json");
        b.save(&path).unwrap();
        assert_eq!(PcaBasis::load(&path).unwrap(), b);
    }
}
