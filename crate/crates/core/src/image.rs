//! Normalized images and the pixelwise lattice operations morphology is built on.
//!
//! Every sample lives in `[0, 1]`. Integer rasters of bit depth `N` are mapped
//! to `value / (2^N - 1)` at load time, so nothing downstream needs to know the
//! original bit depth. Multiband images carry no order relation; all lattice
//! and morphological operators work on one [`Band`] at a time.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use image::{DynamicImage, ImageFormat, ImageReader};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to decode {path}: {message}")]
    Decode { path: String, message: String },
    #[error("unsupported raster format for {0} (expected PNG, PPM or PGM)")]
    UnsupportedFormat(String),
    #[error("image has zero size")]
    ZeroSize,
    #[error("value {value} at index {index} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("grid mismatch: {left:?} vs {right:?}")]
    GridMismatch { left: Grid, right: Grid },
    #[error("band count mismatch while merging")]
    BandMismatch,
    #[error("matrix dump line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Rectangular support of an image: its size and the matrix origin `(r, s)`.
///
/// The origin is metadata only. Operators align pixels by `(row, col)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    pub width: usize,
    pub height: usize,
    pub origin: (i64, i64),
}

impl Grid {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            origin: (0, 0),
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn check_range(values: &[f64]) -> Result<(), ImageError> {
    match values
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        Some((index, &value)) => Err(ImageError::OutOfRange { index, value }),
        None => Ok(()),
    }
}

/// A multiband image `f: S -> [0,1]^p`, stored row-major with bands interleaved.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedImage {
    grid: Grid,
    bands: usize,
    values: Vec<f64>,
}

impl NormalizedImage {
    pub fn new(
        width: usize,
        height: usize,
        bands: usize,
        values: Vec<f64>,
    ) -> Result<Self, ImageError> {
        Self::with_origin(Grid::new(width, height), bands, values)
    }

    pub fn with_origin(grid: Grid, bands: usize, values: Vec<f64>) -> Result<Self, ImageError> {
        if grid.is_empty() || bands == 0 {
            return Err(ImageError::ZeroSize);
        }
        let expected = grid.len() * bands;
        if values.len() != expected {
            return Err(ImageError::LengthMismatch {
                expected,
                actual: values.len(),
            });
        }
        check_range(&values)?;
        Ok(Self {
            grid,
            bands,
            values,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize, band: usize) -> f64 {
        self.values[(row * self.grid.width + col) * self.bands + band]
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Splits the image into its `p` single-band images, in band order.
    pub fn split_bands(&self) -> Vec<Band> {
        (0..self.bands)
            .map(|b| Band {
                grid: self.grid,
                values: self
                    .values
                    .iter()
                    .skip(b)
                    .step_by(self.bands)
                    .copied()
                    .collect(),
            })
            .collect()
    }

    /// Inverse of [`split_bands`](Self::split_bands).
    pub fn merge_bands(bands: &[Band]) -> Result<Self, ImageError> {
        let first = bands.first().ok_or(ImageError::ZeroSize)?;
        let grid = first.grid;
        if let Some(other) = bands.iter().find(|b| b.grid != grid) {
            return Err(ImageError::GridMismatch {
                left: grid,
                right: other.grid,
            });
        }
        let p = bands.len();
        let mut values = vec![0.0; grid.len() * p];
        for (b, band) in bands.iter().enumerate() {
            for (i, &v) in band.values.iter().enumerate() {
                values[i * p + b] = v;
            }
        }
        Ok(Self {
            grid,
            bands: p,
            values,
        })
    }

    /// Writes the image as an 8-bit PNG (1 band → gray, 3 bands → RGB).
    pub fn save_png(&self, path: &Path) -> Result<(), ImageError> {
        let bytes: Vec<u8> = self
            .values
            .iter()
            .map(|v| (v * 255.0).round() as u8)
            .collect();
        let (w, h) = (self.grid.width as u32, self.grid.height as u32);
        let dynamic = match self.bands {
            1 => image::GrayImage::from_raw(w, h, bytes).map(DynamicImage::ImageLuma8),
            3 => image::RgbImage::from_raw(w, h, bytes).map(DynamicImage::ImageRgb8),
            _ => None,
        }
        .ok_or_else(|| ImageError::UnsupportedFormat(path.display().to_string()))?;
        dynamic
            .save_with_format(path, ImageFormat::Png)
            .map_err(|e| ImageError::Decode {
                path: path.display().to_string(),
                message: e.to_string(),
            })
    }
}

/// Loads a PNG or binary PPM/PGM raster and normalizes samples to `[0, 1]`.
pub fn load_image(path: &Path) -> Result<NormalizedImage, ImageError> {
    let display = path.display().to_string();
    let reader = ImageReader::open(path)
        .map_err(|source| ImageError::Io {
            path: display.clone(),
            source,
        })?
        .with_guessed_format()
        .map_err(|source| ImageError::Io {
            path: display.clone(),
            source,
        })?;
    match reader.format() {
        Some(ImageFormat::Png) | Some(ImageFormat::Pnm) => {}
        _ => return Err(ImageError::UnsupportedFormat(display)),
    }
    let decoded = reader.decode().map_err(|e| ImageError::Decode {
        path: display.clone(),
        message: e.to_string(),
    })?;
    from_dynamic(decoded, &display)
}

fn from_dynamic(img: DynamicImage, path: &str) -> Result<NormalizedImage, ImageError> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w == 0 || h == 0 {
        return Err(ImageError::ZeroSize);
    }
    let scale8 = |s: &[u8]| s.iter().map(|&v| v as f64 / 255.0).collect::<Vec<_>>();
    let scale16 = |s: &[u16]| s.iter().map(|&v| v as f64 / 65535.0).collect::<Vec<_>>();
    let (bands, values) = match &img {
        DynamicImage::ImageLuma8(b) => (1, scale8(b.as_raw())),
        DynamicImage::ImageLumaA8(b) => (2, scale8(b.as_raw())),
        DynamicImage::ImageRgb8(b) => (3, scale8(b.as_raw())),
        DynamicImage::ImageRgba8(b) => (4, scale8(b.as_raw())),
        DynamicImage::ImageLuma16(b) => (1, scale16(b.as_raw())),
        DynamicImage::ImageLumaA16(b) => (2, scale16(b.as_raw())),
        DynamicImage::ImageRgb16(b) => (3, scale16(b.as_raw())),
        DynamicImage::ImageRgba16(b) => (4, scale16(b.as_raw())),
        _ => return Err(ImageError::UnsupportedFormat(path.to_string())),
    };
    NormalizedImage::new(w, h, bands, values)
}

/// Serializes an image in the plain-text matrix format.
///
/// Header line: `width height bands origin_row origin_col`, then one line per
/// image row holding `width * bands` values. Values are written with the
/// shortest representation that parses back to the identical `f64`.
pub fn to_matrix_text(img: &NormalizedImage) -> String {
    let g = img.grid;
    let mut out = format!(
        "{} {} {} {} {}\n",
        g.width, g.height, img.bands, g.origin.0, g.origin.1
    );
    for row in img.values.chunks(g.width * img.bands) {
        let mut first = true;
        for v in row {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn from_matrix_text(text: &str) -> Result<NormalizedImage, ImageError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(ImageError::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 {
        return Err(ImageError::Parse {
            line: hline + 1,
            message: format!("header needs 5 fields, found {}", fields.len()),
        });
    }
    let bad = |message: String| ImageError::Parse {
        line: hline + 1,
        message,
    };
    let width: usize = fields[0].parse().map_err(|e| bad(format!("width: {e}")))?;
    let height: usize = fields[1].parse().map_err(|e| bad(format!("height: {e}")))?;
    let bands: usize = fields[2].parse().map_err(|e| bad(format!("bands: {e}")))?;
    let r: i64 = fields[3].parse().map_err(|e| bad(format!("origin row: {e}")))?;
    let s: i64 = fields[4].parse().map_err(|e| bad(format!("origin col: {e}")))?;

    let mut values = Vec::with_capacity(width * height * bands);
    for (idx, line) in lines {
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|e| ImageError::Parse {
                line: idx + 1,
                message: format!("{tok:?}: {e}"),
            })?;
            values.push(v);
        }
    }
    NormalizedImage::with_origin(
        Grid {
            width,
            height,
            origin: (r, s),
        },
        bands,
        values,
    )
}

pub fn write_matrix_file(img: &NormalizedImage, path: &Path) -> std::io::Result<()> {
    fs::write(path, to_matrix_text(img))
}

pub fn read_matrix_file(path: &Path) -> Result<NormalizedImage, ImageError> {
    let text = fs::read_to_string(path).map_err(|source| ImageError::Io {
        path: path.display().to_string(),
        source,
    })?;
    from_matrix_text(&text)
}

/// A single-band image `f_j: S -> [0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    grid: Grid,
    values: Vec<f64>,
}

impl Band {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, ImageError> {
        Self::with_grid(Grid::new(width, height), values)
    }

    pub fn with_grid(grid: Grid, values: Vec<f64>) -> Result<Self, ImageError> {
        if grid.is_empty() {
            return Err(ImageError::ZeroSize);
        }
        if values.len() != grid.len() {
            return Err(ImageError::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        check_range(&values)?;
        Ok(Self { grid, values })
    }

    /// Builds a band from values that are already known to lie in `[0, 1]`.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        debug_assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
        Self { grid, values }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "band must be non-empty");
        assert!((0.0..=1.0).contains(&value), "value outside [0, 1]");
        Self {
            grid: Grid::new(width, height),
            values: vec![value; width * height],
        }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::filled(width, height, 0.0)
    }

    pub fn ones(width: usize, height: usize) -> Self {
        Self::filled(width, height, 1.0)
    }

    /// Builds a band from `f(row, col)`, clamping into `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "band must be non-empty");
        let mut values = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                values.push(f(r, c).clamp(0.0, 1.0));
            }
        }
        Self {
            grid: Grid::new(width, height),
            values,
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn width(&self) -> usize {
        self.grid.width
    }

    pub fn height(&self) -> usize {
        self.grid.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.grid.width + col]
    }

    /// Returns a copy with one pixel replaced.
    pub fn with_pixel(&self, row: usize, col: usize, value: f64) -> Result<Self, ImageError> {
        if !(0.0..=1.0).contains(&value) {
            return Err(ImageError::OutOfRange {
                index: row * self.grid.width + col,
                value,
            });
        }
        let mut values = self.values.clone();
        values[row * self.grid.width + col] = value;
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    /// `V = Σ_u f(u)`, the pixel mass.
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Pixelwise `f1 <= f2` over the whole grid.
    pub fn le(&self, other: &Band) -> bool {
        self.grid == other.grid && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    pub fn into_image(self) -> NormalizedImage {
        NormalizedImage {
            grid: self.grid,
            bands: 1,
            values: self.values,
        }
    }

    fn zip_with(&self, other: &Band, op: impl Fn(f64, f64) -> f64) -> Result<Band, ImageError> {
        if self.grid != other.grid {
            return Err(ImageError::GridMismatch {
                left: self.grid,
                right: other.grid,
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Band::from_raw(self.grid, values))
    }
}

/// Negative: `1 - f(u)`.
pub fn complement(f: &Band) -> Band {
    Band::from_raw(f.grid, f.values.iter().map(|v| 1.0 - v).collect())
}

/// Pixelwise maximum, `f1 ∨ f2`.
pub fn union(f1: &Band, f2: &Band) -> Result<Band, ImageError> {
    f1.zip_with(f2, f64::max)
}

/// Pixelwise minimum, `f1 ∧ f2`.
pub fn intersection(f1: &Band, f2: &Band) -> Result<Band, ImageError> {
    f1.zip_with(f2, f64::min)
}

/// Difference `f1 ∧ (1 - f2)`.
pub fn subtract(f1: &Band, f2: &Band) -> Result<Band, ImageError> {
    f1.zip_with(f2, |a, b| a.min(1.0 - b))
}

/// Binary band that is 1 where `f1(u) <= f2(u)` and 0 elsewhere.
pub fn compare_leq(f1: &Band, f2: &Band) -> Result<Band, ImageError> {
    f1.zip_with(f2, |a, b| if a <= b { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn band_strategy(w: usize, h: usize) -> impl Strategy<Value = Band> {
        prop::collection::vec(0.0f64..=1.0, w * h).prop_map(move |v| Band::new(w, h, v).unwrap())
    }

    #[test]
    fn normalization_examples() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("px.png");
        let img = image::GrayImage::from_raw(3, 1, vec![255, 0, 128]).unwrap();
        img.save(&path).unwrap();
        let loaded = load_image(&path).unwrap();
        assert_eq!(loaded.bands(), 1);
        assert_eq!(loaded.get(0, 0, 0), 1.0);
        assert_eq!(loaded.get(0, 1, 0), 0.0);
        assert_eq!(loaded.get(0, 2, 0), 128.0 / 255.0);
    }

    #[test]
    fn loads_binary_ppm() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rgb.ppm");
        let mut bytes = b"P6\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[255, 0, 51, 0, 255, 102]);
        fs::write(&path, bytes).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!((img.width(), img.height(), img.bands()), (2, 1, 3));
        assert_eq!(img.get(0, 0, 2), 0.2);
        assert_eq!(img.get(0, 1, 1), 1.0);
    }

    #[test]
    fn load_errors() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(
            load_image(&dir.path().join("missing.png")),
            Err(ImageError::Io { .. })
        ));
        let junk = dir.path().join("junk.bmp");
        fs::write(&junk, b"BM not really").unwrap();
        assert!(matches!(
            load_image(&junk),
            Err(ImageError::UnsupportedFormat(_))
        ));
        let text = dir.path().join("notes.txt");
        fs::write(&text, b"hello").unwrap();
        assert!(load_image(&text).is_err());
    }

    #[test]
    fn constructor_rejects_bad_values() {
        assert!(matches!(
            Band::new(2, 1, vec![0.5, 1.5]),
            Err(ImageError::OutOfRange { index: 1, .. })
        ));
        assert!(matches!(
            Band::new(2, 2, vec![0.5]),
            Err(ImageError::LengthMismatch { .. })
        ));
        assert!(matches!(Band::new(0, 2, vec![]), Err(ImageError::ZeroSize)));
        assert!(Band::new(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn split_examples() {
        let img = NormalizedImage::new(2, 2, 3, (0..12).map(|i| i as f64 / 11.0).collect()).unwrap();
        let bands = img.split_bands();
        assert_eq!(bands.len(), 3);
        assert!(bands.iter().all(|b| b.width() == 2 && b.height() == 2));
        assert_eq!(bands[1].get(1, 0), 7.0 / 11.0);

        let gray = NormalizedImage::new(2, 1, 1, vec![0.25, 0.75]).unwrap();
        let single = gray.split_bands();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].clone().into_image(), gray);
    }

    #[test]
    fn merge_rejects_mismatched_grids() {
        let a = Band::zeros(2, 2);
        let b = Band::zeros(3, 2);
        assert!(matches!(
            NormalizedImage::merge_bands(&[a, b]),
            Err(ImageError::GridMismatch { .. })
        ));
    }

    #[test]
    fn lattice_examples() {
        let a = Band::new(1, 1, vec![0.2]).unwrap();
        let b = Band::new(1, 1, vec![0.5]).unwrap();
        assert_eq!(union(&a, &b).unwrap().get(0, 0), 0.5);
        assert_eq!(intersection(&a, &b).unwrap().get(0, 0), 0.2);
        let c = Band::new(1, 1, vec![0.9]).unwrap();
        let d = Band::new(1, 1, vec![0.4]).unwrap();
        assert_eq!(subtract(&c, &d).unwrap().get(0, 0), 0.6);
        assert_eq!(complement(&Band::new(1, 1, vec![0.3]).unwrap()).get(0, 0), 0.7);
        assert_eq!(complement(&Band::zeros(3, 2)), Band::ones(3, 2));
        assert!(matches!(
            union(&Band::zeros(2, 2), &Band::zeros(2, 3)),
            Err(ImageError::GridMismatch { .. })
        ));
    }

    #[test]
    fn compare_leq_is_reflexive() {
        let f = Band::from_fn(5, 4, |r, c| ((r * 7 + c * 3) % 11) as f64 / 10.0);
        assert_eq!(compare_leq(&f, &f).unwrap(), Band::ones(5, 4));
        let g = complement(&f);
        let cmp = compare_leq(&f, &g).unwrap();
        assert!(cmp.is_binary());
    }

    #[test]
    fn matrix_text_round_trip_is_bit_exact() {
        let values = vec![0.1, 1.0 / 3.0, 0.0, 1.0, 5e-324, 0.7];
        let img = NormalizedImage::with_origin(
            Grid {
                width: 2,
                height: 1,
                origin: (2, -1),
            },
            3,
            values,
        )
        .unwrap();
        let text = to_matrix_text(&img);
        assert!(text.starts_with("2 1 3 2 -1\n"));
        let back = from_matrix_text(&text).unwrap();
        assert_eq!(back.grid(), img.grid());
        for (a, b) in back.values().iter().zip(img.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn matrix_text_reports_line_numbers() {
        let err = from_matrix_text("2 1 1 0 0\n0.5 nope\n").unwrap_err();
        assert!(matches!(err, ImageError::Parse { line: 2, .. }));
        let err = from_matrix_text("2 1\n").unwrap_err();
        assert!(matches!(err, ImageError::Parse { line: 1, .. }));
    }

    proptest! {
        #[test]
        fn split_merge_round_trip(
            (w, h, p) in (1usize..6, 1usize..6, 1usize..5),
            seed in any::<u64>(),
        ) {
            let n = w * h * p;
            let values: Vec<f64> = (0..n)
                .map(|i| ((seed.wrapping_mul(6364136223846793005).wrapping_add((i as u64).wrapping_mul(1442695040888963407)) >> 11) as f64) / (1u64 << 53) as f64)
                .collect();
            let img = NormalizedImage::new(w, h, p, values).unwrap();
            let back = NormalizedImage::merge_bands(&img.split_bands()).unwrap();
            for r in 0..h {
                for c in 0..w {
                    for b in 0..p {
                        prop_assert_eq!(back.get(r, c, b).to_bits(), img.get(r, c, b).to_bits());
                    }
                }
            }
        }

        #[test]
        fn lattice_closure_and_laws(f1 in band_strategy(4, 3), f2 in band_strategy(4, 3), f3 in band_strategy(4, 3)) {
            let u = union(&f1, &f2).unwrap();
            let i = intersection(&f1, &f2).unwrap();
            let s = subtract(&f1, &f2).unwrap();
            let c = compare_leq(&f1, &f2).unwrap();
            for out in [&u, &i, &s, &c] {
                prop_assert!(out.values().iter().all(|v| (0.0..=1.0).contains(v)));
            }
            prop_assert_eq!(&u, &union(&f2, &f1).unwrap());
            prop_assert_eq!(&i, &intersection(&f2, &f1).unwrap());
            prop_assert_eq!(union(&u, &f3).unwrap(), union(&f1, &union(&f2, &f3).unwrap()).unwrap());
            prop_assert_eq!(
                intersection(&i, &f3).unwrap(),
                intersection(&f1, &intersection(&f2, &f3).unwrap()).unwrap()
            );
            prop_assert_eq!(&union(&f1, &f1).unwrap(), &f1);
            prop_assert_eq!(&intersection(&f1, &f1).unwrap(), &f1);
            // De Morgan is exact: max/min commute with the order-reversing map 1 - x.
            prop_assert_eq!(
                complement(&u),
                intersection(&complement(&f1), &complement(&f2)).unwrap()
            );
            prop_assert_eq!(&subtract(&f1, &Band::zeros(4, 3)).unwrap(), &f1);
            prop_assert_eq!(subtract(&f1, &Band::ones(4, 3)).unwrap(), Band::zeros(4, 3));
        }

        #[test]
        fn complement_is_an_involution(f in band_strategy(5, 5)) {
            // 1 - (1 - x) can differ from x by one rounding step for arbitrary doubles.
            let back = complement(&complement(&f));
            for (a, b) in back.values().iter().zip(f.values()) {
                prop_assert!((a - b).abs() <= f64::EPSILON);
            }
        }

        #[test]
        fn complement_is_exact_on_dyadic_values(raw in prop::collection::vec(0u32..=256, 25)) {
            let f = Band::new(5, 5, raw.iter().map(|&k| k as f64 / 256.0).collect()).unwrap();
            prop_assert_eq!(complement(&complement(&f)), f);
        }
    }
}
