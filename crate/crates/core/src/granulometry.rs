//! Granulometric size distributions and pattern spectra.
//!
//! The `k`-openings `γ^k = δ^k ε^k` by a digital disk form a granulometry.
//! `V(k) = Σ_u γ^k(f)(u)` is the mass that survives the `k`-th sieve,
//! `Ξ[k] = 1 - V(k)/V(0)` its cumulative distribution and
//! `ξ[k] = Ξ[k+1] - Ξ[k]` the pattern spectrum.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::Band;
use crate::morphology::{dilate, erode, standard_se, SeKind};

pub const DEFAULT_BINS: usize = 25;

#[derive(Debug, Error, PartialEq)]
pub enum GranulometryError {
    #[error("image has zero mass; the size distribution is undefined")]
    EmptyImage,
    #[error("opening depth K must be at least 1")]
    ZeroDepth,
    #[error("spectrum dump line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GranulometricCurve {
    /// `V[0..=K]`.
    pub values: Vec<f64>,
    pub se_kind: SeKind,
}

impl GranulometricCurve {
    pub fn depth(&self) -> usize {
        self.values.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSpectrum {
    /// `ξ[0..K]`.
    pub xi: Vec<f64>,
    pub se_kind: SeKind,
}

impl PatternSpectrum {
    pub fn bins(&self) -> usize {
        self.xi.len()
    }

    /// Spectrum of a degenerate band: `K` zeros.
    pub fn zeros(bins: usize, se_kind: SeKind) -> Self {
        Self {
            xi: vec![0.0; bins],
            se_kind,
        }
    }

    /// One value per line, full precision.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.xi {
            writeln!(out, "{v:?}").unwrap();
        }
        out
    }

    pub fn from_text(text: &str, se_kind: SeKind) -> Result<Self, GranulometryError> {
        let xi = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.trim().parse::<f64>().map_err(|e| GranulometryError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { xi, se_kind })
    }
}

/// `V[k]` for `k = 0..=depth`.
///
/// The erosion chain `ε^k` is built incrementally and each level is dilated
/// back `k` times. Once the eroded band is identically zero every deeper
/// opening is zero as well.
pub fn granulometric_curve(
    f: &Band,
    se_kind: SeKind,
    depth: usize,
) -> Result<GranulometricCurve, GranulometryError> {
    if depth == 0 {
        return Err(GranulometryError::ZeroDepth);
    }
    let se = standard_se(se_kind);
    let mut values = Vec::with_capacity(depth + 1);
    values.push(f.sum());
    let mut eroded = f.clone();
    for k in 1..=depth {
        eroded = erode(&eroded, &se, 1).expect("n = 1");
        if eroded.is_zero() {
            values.resize(depth + 1, 0.0);
            break;
        }
        values.push(dilate(&eroded, &se, k).expect("k >= 1").sum());
    }
    Ok(GranulometricCurve { values, se_kind })
}

/// `Ξ[k] = 1 - V(k)/V(0)`.
pub fn size_distribution(curve: &GranulometricCurve) -> Result<Vec<f64>, GranulometryError> {
    let v0 = curve.values[0];
    if v0 <= 0.0 {
        return Err(GranulometryError::EmptyImage);
    }
    Ok(curve.values.iter().map(|v| 1.0 - v / v0).collect())
}

pub fn spectrum_from_curve(
    curve: &GranulometricCurve,
) -> Result<PatternSpectrum, GranulometryError> {
    let cdf = size_distribution(curve)?;
    Ok(PatternSpectrum {
        xi: cdf.windows(2).map(|w| w[1] - w[0]).collect(),
        se_kind: curve.se_kind,
    })
}

/// Pattern spectrum with `bins` entries.
pub fn pattern_spectrum(
    f: &Band,
    se_kind: SeKind,
    bins: usize,
) -> Result<PatternSpectrum, GranulometryError> {
    if f.sum() <= 0.0 {
        return Err(GranulometryError::EmptyImage);
    }
    spectrum_from_curve(&granulometric_curve(f, se_kind, bins)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphology::open;

    fn curve(values: Vec<f64>) -> GranulometricCurve {
        GranulometricCurve {
            values,
            se_kind: SeKind::Cross3,
        }
    }

    #[test]
    fn size_distribution_examples() {
        assert_eq!(size_distribution(&curve(vec![10., 5., 0.])).unwrap(), [0., 0.5, 1.0]);
        assert_eq!(size_distribution(&curve(vec![7., 7., 7.])).unwrap(), [0., 0., 0.]);
        assert_eq!(
            size_distribution(&curve(vec![0., 0.])),
            Err(GranulometryError::EmptyImage)
        );
    }

    #[test]
    fn curve_examples() {
        let zero = granulometric_curve(&Band::zeros(8, 8), SeKind::Cross3, 5).unwrap();
        assert_eq!(zero.values, vec![0.0; 6]);
        assert_eq!(zero.depth(), 5);

        let imp = Band::zeros(9, 9).with_pixel(4, 4, 1.0).unwrap();
        let c = granulometric_curve(&imp, SeKind::Cross3, 4).unwrap();
        assert_eq!(c.values, [1., 0., 0., 0., 0.]);
        assert_eq!(
            granulometric_curve(&imp, SeKind::Cross3, 0),
            Err(GranulometryError::ZeroDepth)
        );
    }

    #[test]
    fn curve_matches_from_scratch_openings() {
        let f = Band::from_fn(16, 16, |r, c| if (r * 7 + c * 11) % 5 < 3 { 1.0 } else { 0.0 });
        for kind in [SeKind::Cross3, SeKind::Square3] {
            let se = standard_se(kind);
            let inc = granulometric_curve(&f, kind, 6).unwrap();
            for k in 1..=6 {
                assert_eq!(inc.values[k], open(&f, &se, k).unwrap().sum());
            }
        }
    }

    #[test]
    fn isolated_pixels_sieve_at_first_bin() {
        let f = Band::from_fn(12, 12, |r, c| if r % 3 == 1 && c % 3 == 1 { 1.0 } else { 0.0 });
        let s = pattern_spectrum(&f, SeKind::Cross3, 5).unwrap();
        assert_eq!(s.xi, [1., 0., 0., 0., 0.]);
        assert_eq!(pattern_spectrum(&f, SeKind::Cross3, DEFAULT_BINS).unwrap().bins(), 25);
    }

    #[test]
    fn empty_band_is_an_error() {
        assert_eq!(
            pattern_spectrum(&Band::zeros(4, 4), SeKind::Cross3, 3),
            Err(GranulometryError::EmptyImage)
        );
    }

    #[test]
    fn text_dump_round_trip() {
        let s = PatternSpectrum {
            xi: vec![0.1, 1.0 / 3.0, 0.0],
            se_kind: SeKind::Square3,
        };
        let back = PatternSpectrum::from_text(&s.to_text(), SeKind::Square3).unwrap();
        assert_eq!(back, s);
        assert!(matches!(
            PatternSpectrum::from_text("0.1\nx\n", SeKind::Cross3),
            Err(GranulometryError::Parse { line: 2, .. })
        ));
    }
}
