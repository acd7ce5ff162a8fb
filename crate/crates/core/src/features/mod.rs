//! Per-image feature vectors: band split, k-means background removal and a
//! pattern spectrum per band, concatenated in R, G, B order.

mod matrix;
mod pca;

pub use matrix::{assemble_matrix, LabeledFeatureMatrix, MatrixError};
pub use pca::{pca_fit, pca_fit_variance, pca_inverse, pca_transform, PcaBasis, PcaError};

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::granulometry::{pattern_spectrum, GranulometryError, PatternSpectrum, DEFAULT_BINS};
use crate::image::NormalizedImage;
use crate::morphology::SeKind;
use crate::seed::derive_seed;
use crate::segmentation::{
    kmeans, remove_background, BackgroundRule, SegmentationError, DEFAULT_CLUSTERS,
    DEFAULT_MAX_ITER, DEFAULT_TOL,
};

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("expected a 3-band RGB image, got {0} band(s)")]
    NotRgb(usize),
    #[error(transparent)]
    Segmentation(#[from] SegmentationError),
    #[error(transparent)]
    Granulometry(#[from] GranulometryError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractConfig {
    pub clusters: usize,
    pub bins: usize,
    pub se_kind: SeKind,
    pub background: BackgroundRule,
    pub seed: u64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self {
            clusters: DEFAULT_CLUSTERS,
            bins: DEFAULT_BINS,
            se_kind: SeKind::Cross3,
            background: BackgroundRule::Largest,
            seed: 0,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub label: String,
    /// Bands whose spectrum was replaced by zeros (nothing left after segmentation).
    pub degenerate_bands: Vec<usize>,
}

impl FeatureVector {
    pub fn is_degenerate(&self) -> bool {
        !self.degenerate_bands.is_empty()
    }
}

/// Spectrum of one band after segmentation, or `None` when the band is degenerate.
pub fn band_spectrum(
    band: &crate::image::Band,
    cfg: &ExtractConfig,
    band_index: usize,
) -> Result<Option<PatternSpectrum>, FeatureError> {
    let clustering = kmeans(
        band,
        cfg.clusters,
        derive_seed(cfg.seed, band_index as u64),
        cfg.tol,
        cfg.max_iter,
    )?;
    let foreground = match remove_background(band, &clustering, cfg.background) {
        Ok(b) => b,
        Err(SegmentationError::SinglePopulatedCluster) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    match pattern_spectrum(&foreground, cfg.se_kind, cfg.bins) {
        Ok(s) => Ok(Some(s)),
        Err(GranulometryError::EmptyImage) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Builds the `3 * bins` feature vector of an RGB image.
///
/// A band with no mass left after background removal contributes an all-zero
/// block and is listed in `degenerate_bands`.
pub fn extract_feature_vector(
    img: &NormalizedImage,
    label: &str,
    cfg: &ExtractConfig,
) -> Result<FeatureVector, FeatureError> {
    if img.bands() != 3 {
        return Err(FeatureError::NotRgb(img.bands()));
    }
    let mut values = Vec::with_capacity(3 * cfg.bins);
    let mut degenerate_bands = Vec::new();
    for (i, band) in img.split_bands().iter().enumerate() {
        match band_spectrum(band, cfg, i)? {
            Some(s) => values.extend(s.xi),
            None => {
                warn!("band {i} has no foreground mass; using an all-zero spectrum");
                degenerate_bands.push(i);
                values.extend(std::iter::repeat_n(0.0, cfg.bins));
            }
        }
    }
    Ok(FeatureVector {
        values,
        label: label.to_string(),
        degenerate_bands,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::Band;

    fn textured(w: usize, h: usize) -> Band {
        Band::from_fn(w, h, |r, c| {
            let cell = (r / 4 + c / 4) % 3;
            let inside = (r % 4) < 2 && (c % 4) < 2;
            if inside {
                0.5 + 0.2 * cell as f64
            } else {
                0.1
            }
        })
    }

    #[test]
    fn rgb_image_gives_75_values() {
        let b = textured(24, 24);
        let img = NormalizedImage::merge_bands(&[b.clone(), b.clone(), b]).unwrap();
        let fv = extract_feature_vector(&img, "NP", &ExtractConfig::default()).unwrap();
        assert_eq!(fv.values.len(), 75);
        assert!(!fv.is_degenerate());
        // identical bands produce identical blocks
        assert_eq!(fv.values[..25], fv.values[25..50]);
        assert_eq!(fv.values[..25], fv.values[50..]);
        for block in fv.values.chunks(25) {
            assert!(block.iter().sum::<f64>() <= 1.0 + 1e-12);
            assert!(block.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn black_image_is_degenerate() {
        let b = Band::zeros(10, 10);
        let img = NormalizedImage::merge_bands(&[b.clone(), b.clone(), b]).unwrap();
        let fv = extract_feature_vector(&img, "P", &ExtractConfig::default()).unwrap();
        assert_eq!(fv.values, vec![0.0; 75]);
        assert_eq!(fv.degenerate_bands, [0, 1, 2]);
    }

    #[test]
    fn rejects_non_rgb() {
        let img = Band::zeros(4, 4).into_image();
        assert_eq!(
            extract_feature_vector(&img, "x", &ExtractConfig::default()),
            Err(FeatureError::NotRgb(1))
        );
    }

    #[test]
    fn extraction_is_deterministic() {
        let r = textured(20, 16);
        let g = Band::from_fn(20, 16, |row, col| ((row * col) % 7) as f64 / 6.0);
        let img = NormalizedImage::merge_bands(&[r.clone(), g, r]).unwrap();
        let cfg = ExtractConfig {
            seed: 11,
            ..Default::default()
        };
        assert_eq!(
            extract_feature_vector(&img, "a", &cfg).unwrap(),
            extract_feature_vector(&img, "a", &cfg).unwrap()
        );
    }
}
