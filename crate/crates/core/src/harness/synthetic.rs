//! Synthetic grain-texture corpus: two RGB classes differing only in grain size.
//!
//! Every image has a dark noisy background and round grains in three tones.
//! Class `A` grains have radius 1–2 px, class `B` grains 4–6 px, so their
//! pattern spectra peak at clearly different opening depths.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::image::{Band, ImageError, NormalizedImage};
use crate::seed::derive_seed_path;

pub const CLASS_NAMES: [&str; 2] = ["A", "B"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub per_class: usize,
    pub width: usize,
    pub height: usize,
    /// Fraction of the image area covered by grains (before overlap).
    pub coverage: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            per_class: 100,
            width: 64,
            height: 64,
            coverage: 0.3,
            seed: 0,
        }
    }
}

fn radius_range(class: usize) -> (f64, f64) {
    if class == 0 {
        (1.0, 2.0)
    } else {
        (4.0, 6.0)
    }
}

/// Image `index` of class `class` (0 = A, 1 = B).
pub fn grain_image(spec: &SyntheticSpec, class: usize, index: usize) -> NormalizedImage {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed_path(spec.seed, &[class as u64, index as u64]));
    let (w, h) = (spec.width, spec.height);
    // three grain tones per band, well above the background
    let tones: Vec<[f64; 3]> = (0..3)
        .map(|_| {
            [
                rng.random_range(0.35..0.45),
                rng.random_range(0.6..0.7),
                rng.random_range(0.85..0.95),
            ]
        })
        .collect();
    let background: Vec<f64> = (0..3).map(|_| rng.random_range(0.05..0.15)).collect();
    let mut planes: Vec<Vec<f64>> = (0..3)
        .map(|b| {
            (0..w * h)
                .map(|_| (background[b] + rng.random_range(-0.02..0.02)).clamp(0.0, 1.0))
                .collect()
        })
        .collect();

    let (rmin, rmax) = radius_range(class);
    let mean_area = std::f64::consts::PI * ((rmin + rmax) / 2.0).powi(2);
    let grains = ((spec.coverage * (w * h) as f64) / mean_area).round().max(1.0) as usize;
    for _ in 0..grains {
        let r: f64 = rng.random_range(rmin..=rmax);
        let cy: f64 = rng.random_range(0.0..h as f64);
        let cx: f64 = rng.random_range(0.0..w as f64);
        let tone = rng.random_range(0..3);
        let reach = r.ceil() as isize;
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                let (y, x) = (cy as isize + dy, cx as isize + dx);
                if y < 0 || x < 0 || y >= h as isize || x >= w as isize {
                    continue;
                }
                if ((dy * dy + dx * dx) as f64) <= r * r {
                    let p = y as usize * w + x as usize;
                    for (b, plane) in planes.iter_mut().enumerate() {
                        plane[p] = tones[b][tone];
                    }
                }
            }
        }
    }
    let bands: Vec<Band> = planes
        .into_iter()
        .map(|v| Band::new(w, h, v).expect("values in range"))
        .collect();
    NormalizedImage::merge_bands(&bands).expect("matching bands")
}

/// All images in class order, with their labels.
pub fn generate(spec: &SyntheticSpec) -> Vec<(String, NormalizedImage)> {
    (0..CLASS_NAMES.len())
        .flat_map(|c| (0..spec.per_class).map(move |i| (c, i)))
        .map(|(c, i)| (CLASS_NAMES[c].to_string(), grain_image(spec, c, i)))
        .collect()
}

/// Writes `dir/<class>/img_NNN.png` for every image and returns the paths.
pub fn write_corpus(spec: &SyntheticSpec, dir: &Path) -> Result<Vec<PathBuf>, ImageError> {
    let mut paths = Vec::new();
    for (c, name) in CLASS_NAMES.iter().enumerate() {
        let sub = dir.join(name);
        std::fs::create_dir_all(&sub).map_err(|source| ImageError::Io {
            path: sub.display().to_string(),
            source,
        })?;
        for i in 0..spec.per_class {
            let p = sub.join(format!("img_{i:03}.png"));
            grain_image(spec, c, i).save_png(&p)?;
            paths.push(p);
        }
    }
    Ok(paths)
}
