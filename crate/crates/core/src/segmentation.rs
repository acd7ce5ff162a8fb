//! Scalar k-means on band intensities and background removal.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::Band;

pub const DEFAULT_CLUSTERS: usize = 4;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 300;
const RESEED_ATTEMPTS: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum SegmentationError {
    #[error("cluster count must be at least 1")]
    ZeroClusters,
    #[error("only one populated cluster; nothing distinguishable would remain")]
    SinglePopulatedCluster,
    #[error("clustering has {labels} labels but the band has {pixels} pixels")]
    LabelMismatch { labels: usize, pixels: usize },
}

/// Which cluster is treated as background.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackgroundRule {
    /// The cluster with the most pixels.
    #[default]
    Largest,
    /// The cluster with the highest centroid.
    Brightest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub centroids: Vec<f64>,
    pub labels: Vec<usize>,
    pub sizes: Vec<usize>,
    pub iterations: usize,
    /// Within-cluster sum of squares after each assignment step.
    pub sse_history: Vec<f64>,
    /// Set when some cluster stayed empty after re-seeding.
    pub degenerate: bool,
}

impl Clustering {
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    pub fn populated(&self) -> usize {
        self.sizes.iter().filter(|&&s| s > 0).count()
    }

    /// Writes the label map as a binary PGM, cluster index scaled to gray.
    pub fn write_label_pgm(&self, width: usize, height: usize, path: &Path) -> std::io::Result<()> {
        let scale = if self.k() > 1 { 255 / (self.k() - 1) } else { 0 };
        let mut out = std::fs::File::create(path)?;
        write!(out, "P5\n{width} {height}\n255\n")?;
        let bytes: Vec<u8> = self.labels.iter().map(|&l| (l * scale) as u8).collect();
        out.write_all(&bytes)
    }
}

fn nearest(x: f64, centroids: &[f64]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, &c) in centroids.iter().enumerate() {
        let d = (x - c) * (x - c);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    (best, best_d)
}

fn assign(xs: &[f64], centroids: &[f64], labels: &mut [usize], sizes: &mut [usize]) -> f64 {
    sizes.iter_mut().for_each(|s| *s = 0);
    let mut sse = 0.0;
    for (x, l) in xs.iter().zip(labels.iter_mut()) {
        let (j, d) = nearest(*x, centroids);
        *l = j;
        sizes[j] += 1;
        sse += d;
    }
    sse
}

fn plus_plus_init(xs: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut centroids = vec![xs[rng.random_range(0..xs.len())]];
    let mut dist: Vec<f64> = xs.iter().map(|x| (x - centroids[0]).powi(2)).collect();
    while centroids.len() < k {
        let total: f64 = dist.iter().sum();
        let idx = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = xs.len() - 1;
            for (i, d) in dist.iter().enumerate() {
                if target < *d {
                    chosen = i;
                    break;
                }
                target -= d;
            }
            chosen
        } else {
            rng.random_range(0..xs.len())
        };
        let c = xs[idx];
        centroids.push(c);
        for (d, x) in dist.iter_mut().zip(xs) {
            *d = d.min((x - c).powi(2));
        }
    }
    centroids
}

/// Lloyd's algorithm on the scalar intensities of `band`, seeded with k-means++.
///
/// Stops when the largest centroid movement drops below `tol` or after
/// `max_iter` iterations. A cluster that comes up empty is moved onto the pixel
/// farthest from its nearest centroid, at most three times.
pub fn kmeans(
    band: &Band,
    k: usize,
    seed: u64,
    tol: f64,
    max_iter: usize,
) -> Result<Clustering, SegmentationError> {
    if k == 0 {
        return Err(SegmentationError::ZeroClusters);
    }
    let xs = band.values();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_init(xs, k, &mut rng);
    let mut labels = vec![0; xs.len()];
    let mut sizes = vec![0; k];
    let mut reseeds_left = vec![RESEED_ATTEMPTS; k];
    let mut sse_history = Vec::new();
    let mut degenerate = false;
    let mut iterations = 0;

    loop {
        let mut sse = assign(xs, &centroids, &mut labels, &mut sizes);
        while let Some(j) = (0..k).find(|&j| sizes[j] == 0 && reseeds_left[j] > 0) {
            reseeds_left[j] -= 1;
            let far = xs
                .iter()
                .enumerate()
                .map(|(i, x)| (i, nearest(*x, &centroids).1))
                .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
            centroids[j] = xs[far.0];
            sse = assign(xs, &centroids, &mut labels, &mut sizes);
        }
        if sizes.contains(&0) {
            degenerate = true;
        }
        sse_history.push(sse);
        if iterations >= max_iter {
            break;
        }
        iterations += 1;

        let mut sums = vec![0.0; k];
        for (x, &l) in xs.iter().zip(&labels) {
            sums[l] += x;
        }
        let mut shift: f64 = 0.0;
        for j in 0..k {
            if sizes[j] > 0 {
                let updated = sums[j] / sizes[j] as f64;
                shift = shift.max((updated - centroids[j]).abs());
                centroids[j] = updated;
            }
        }
        if shift < tol {
            sse_history.push(assign(xs, &centroids, &mut labels, &mut sizes));
            break;
        }
    }

    Ok(Clustering {
        centroids,
        labels,
        sizes,
        iterations,
        sse_history,
        degenerate,
    })
}

/// Index of the background cluster under `rule`; ties go to the lowest index.
pub fn background_cluster(c: &Clustering, rule: BackgroundRule) -> usize {
    let mut best = 0;
    for j in 1..c.k() {
        let better = match rule {
            BackgroundRule::Largest => c.sizes[j] > c.sizes[best],
            BackgroundRule::Brightest => {
                c.sizes[j] > 0 && (c.sizes[best] == 0 || c.centroids[j] > c.centroids[best])
            }
        };
        if better {
            best = j;
        }
    }
    best
}

/// Zeroes the pixels of the background cluster; every other pixel keeps its intensity.
pub fn remove_background(
    band: &Band,
    c: &Clustering,
    rule: BackgroundRule,
) -> Result<Band, SegmentationError> {
    if c.labels.len() != band.values().len() {
        return Err(SegmentationError::LabelMismatch {
            labels: c.labels.len(),
            pixels: band.values().len(),
        });
    }
    if c.populated() < 2 {
        return Err(SegmentationError::SinglePopulatedCluster);
    }
    let bg = background_cluster(c, rule);
    let values = band
        .values()
        .iter()
        .zip(&c.labels)
        .map(|(&v, &l)| if l == bg { 0.0 } else { v })
        .collect();
    Ok(Band::from_raw(band.grid(), values))
}

pub fn remove_largest_cluster(band: &Band, c: &Clustering) -> Result<Band, SegmentationError> {
    remove_background(band, c, BackgroundRule::Largest)
}
