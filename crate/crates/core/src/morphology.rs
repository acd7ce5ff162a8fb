//! Flat morphological operators on single bands.
//!
//! Dilation is `δ_g(f)(u) = ⋁_v f(v) ∧ g(u - v)` and erosion is
//! `ε_g(f)(u) = ⋀_v f(v) ∨ ḡ(v - u)`, with `v` ranging over the grid only.
//! For a binary structuring element these reduce to a neighborhood max over
//! the reflected element and a neighborhood min over the element. Pixels
//! outside the grid act as 0 for dilation and 1 for erosion.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::image::{complement, Band, Grid};

#[derive(Debug, Error, PartialEq)]
pub enum MorphError {
    #[error("iteration count must be at least 1")]
    ZeroIterations,
    #[error("invalid structuring element: {0}")]
    InvalidElement(String),
}

/// The elementary digital disks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SeKind {
    #[default]
    Cross3,
    Square3,
}

impl fmt::Display for SeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeKind::Cross3 => "cross3",
            SeKind::Square3 => "square3",
        })
    }
}

impl FromStr for SeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cross3" => Ok(SeKind::Cross3),
            "square3" => Ok(SeKind::Square3),
            other => Err(format!("unknown structuring element {other:?} (cross3 | square3)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Cross3,
    Square3,
    General,
}

/// A binary structuring element with an origin inside its support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    width: usize,
    height: usize,
    mask: Vec<bool>,
    origin: (usize, usize),
    /// `(row, col)` offsets of the set pixels relative to the origin.
    offsets: Vec<(isize, isize)>,
    shape: Shape,
}

impl StructuringElement {
    /// `rows` is the element as a matrix of 0/1 values; `origin` is zero-based `(row, col)`.
    pub fn new(rows: &[&[u8]], origin: (usize, usize)) -> Result<Self, MorphError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        if height == 0 || width == 0 {
            return Err(MorphError::InvalidElement("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != width) {
            return Err(MorphError::InvalidElement("ragged rows".into()));
        }
        let mut mask = Vec::with_capacity(width * height);
        for row in rows {
            for &v in *row {
                match v {
                    0 => mask.push(false),
                    1 => mask.push(true),
                    other => {
                        return Err(MorphError::InvalidElement(format!(
                            "value {other} is not binary"
                        )))
                    }
                }
            }
        }
        Self::from_mask(width, height, mask, origin)
    }

    pub fn from_mask(
        width: usize,
        height: usize,
        mask: Vec<bool>,
        origin: (usize, usize),
    ) -> Result<Self, MorphError> {
        if mask.len() != width * height || width == 0 {
            return Err(MorphError::InvalidElement("mask size mismatch".into()));
        }
        if origin.0 >= height || origin.1 >= width {
            return Err(MorphError::InvalidElement(format!(
                "origin {origin:?} outside {height}x{width}"
            )));
        }
        if !mask.iter().any(|&b| b) {
            return Err(MorphError::InvalidElement("no set pixel".into()));
        }
        let offsets = mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| {
                (
                    (i / width) as isize - origin.0 as isize,
                    (i % width) as isize - origin.1 as isize,
                )
            })
            .collect();
        let mut se = Self {
            width,
            height,
            mask,
            origin,
            offsets,
            shape: Shape::General,
        };
        se.shape = se.classify();
        Ok(se)
    }

    fn classify(&self) -> Shape {
        if self.width != 3 || self.height != 3 || self.origin != (1, 1) {
            return Shape::General;
        }
        if self.mask.iter().all(|&b| b) {
            Shape::Square3
        } else if self.mask == [false, true, false, true, true, true, false, true, false] {
            Shape::Cross3
        } else {
            Shape::General
        }
    }

    /// A solid `size x size` square with a centered origin (`size` odd).
    pub fn square(size: usize) -> Result<Self, MorphError> {
        if size.is_multiple_of(2) {
            return Err(MorphError::InvalidElement("square size must be odd".into()));
        }
        Self::from_mask(size, size, vec![true; size * size], (size / 2, size / 2))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }

    pub fn offsets(&self) -> &[(isize, isize)] {
        &self.offsets
    }

    /// `g(d)` for an offset `d` relative to the origin; 0 outside the support.
    pub fn value_at(&self, dr: isize, dc: isize) -> f64 {
        let r = dr + self.origin.0 as isize;
        let c = dc + self.origin.1 as isize;
        if r < 0 || c < 0 || r >= self.height as isize || c >= self.width as isize {
            return 0.0;
        }
        if self.mask[r as usize * self.width + c as usize] {
            1.0
        } else {
            0.0
        }
    }

    pub fn contains_origin(&self) -> bool {
        self.value_at(0, 0) == 1.0
    }

    /// Reflection through the origin.
    pub fn reflect(&self) -> Self {
        let mut mask = self.mask.clone();
        mask.reverse();
        let origin = (self.height - 1 - self.origin.0, self.width - 1 - self.origin.1);
        Self::from_mask(self.width, self.height, mask, origin)
            .expect("reflection preserves validity")
    }

    pub fn is_symmetric(&self) -> bool {
        let mut offsets: Vec<_> = self.offsets.clone();
        let mut reflected: Vec<_> = self.offsets.iter().map(|&(r, c)| (-r, -c)).collect();
        offsets.sort_unstable();
        reflected.sort_unstable();
        offsets == reflected
    }
}

pub fn standard_se(kind: SeKind) -> StructuringElement {
    let rows: [&[u8]; 3] = match kind {
        SeKind::Cross3 => [&[0, 1, 0], &[1, 1, 1], &[0, 1, 0]],
        SeKind::Square3 => [&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]],
    };
    StructuringElement::new(&rows, (1, 1)).expect("standard elements are valid")
}

#[derive(Clone, Copy)]
enum Reduce {
    Max,
    Min,
}

impl Reduce {
    #[inline(always)]
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Reduce::Max => a.max(b),
            Reduce::Min => a.min(b),
        }
    }

    fn neutral(self) -> f64 {
        match self {
            Reduce::Max => 0.0,
            Reduce::Min => 1.0,
        }
    }
}

/// `out(u) = reduce_{d in offsets} f(u + d)`, skipping positions off the grid.
fn shifted_reduce(grid: Grid, src: &[f64], offsets: &[(isize, isize)], op: Reduce) -> Vec<f64> {
    let (w, h) = (grid.width as isize, grid.height as isize);
    let mut out = vec![op.neutral(); src.len()];
    for &(dr, dc) in offsets {
        let r0 = (-dr).max(0);
        let r1 = (h - dr).min(h);
        let c0 = (-dc).max(0);
        let c1 = (w - dc).min(w);
        if r0 >= r1 || c0 >= c1 {
            continue;
        }
        for r in r0..r1 {
            let dst_row = (r * w) as usize;
            let src_start = ((r + dr) * w + dc + c0) as usize;
            let len = (c1 - c0) as usize;
            let dst = &mut out[dst_row + c0 as usize..dst_row + c1 as usize];
            let s = &src[src_start..src_start + len];
            for (o, &v) in dst.iter_mut().zip(s) {
                *o = op.apply(*o, v);
            }
        }
    }
    out
}

/// Three-tap reduction along rows (`horizontal`) or columns.
fn line3(grid: Grid, src: &[f64], horizontal: bool, op: Reduce) -> Vec<f64> {
    let (w, h) = (grid.width, grid.height);
    let mut out = src.to_vec();
    if horizontal {
        for r in 0..h {
            let row = &src[r * w..(r + 1) * w];
            let dst = &mut out[r * w..(r + 1) * w];
            for c in 1..w {
                dst[c] = op.apply(dst[c], row[c - 1]);
                dst[c - 1] = op.apply(dst[c - 1], row[c]);
            }
        }
    } else {
        for r in 1..h {
            let (upper, lower) = out.split_at_mut(r * w);
            let above = &src[(r - 1) * w..r * w];
            let here = &src[r * w..(r + 1) * w];
            let dst_above = &mut upper[(r - 1) * w..];
            let dst_here = &mut lower[..w];
            for c in 0..w {
                dst_here[c] = op.apply(dst_here[c], above[c]);
                dst_above[c] = op.apply(dst_above[c], here[c]);
            }
        }
    }
    out
}

fn flat_once(f: &Band, se: &StructuringElement, op: Reduce) -> Band {
    let grid = f.grid();
    let src = f.values();
    let values = match se.shape {
        Shape::Square3 => {
            let rows = line3(grid, src, true, op);
            line3(grid, &rows, false, op)
        }
        Shape::Cross3 => {
            let mut h = line3(grid, src, true, op);
            let v = line3(grid, src, false, op);
            for (a, b) in h.iter_mut().zip(v) {
                *a = op.apply(*a, b);
            }
            h
        }
        Shape::General => match op {
            // δ reads f(u - b): the reflected element.
            Reduce::Max => {
                let reflected: Vec<_> = se.offsets.iter().map(|&(r, c)| (-r, -c)).collect();
                shifted_reduce(grid, src, &reflected, op)
            }
            Reduce::Min => shifted_reduce(grid, src, &se.offsets, op),
        },
    };
    Band::from_raw(grid, values)
}

fn iterate(
    f: &Band,
    se: &StructuringElement,
    n: usize,
    op: Reduce,
) -> Result<Band, MorphError> {
    if n == 0 {
        return Err(MorphError::ZeroIterations);
    }
    let mut out = flat_once(f, se, op);
    for _ in 1..n {
        out = flat_once(&out, se, op);
    }
    Ok(out)
}

/// `n`-fold dilation `δ_g^n(f)`.
pub fn dilate(f: &Band, se: &StructuringElement, n: usize) -> Result<Band, MorphError> {
    iterate(f, se, n, Reduce::Max)
}

/// `n`-fold erosion `ε_g^n(f)`.
pub fn erode(f: &Band, se: &StructuringElement, n: usize) -> Result<Band, MorphError> {
    iterate(f, se, n, Reduce::Min)
}

pub fn anti_dilate(f: &Band, se: &StructuringElement) -> Result<Band, MorphError> {
    Ok(complement(&dilate(f, se, 1)?))
}

pub fn anti_erode(f: &Band, se: &StructuringElement) -> Result<Band, MorphError> {
    Ok(complement(&erode(f, se, 1)?))
}

/// `n`-opening `γ_g^n = δ_g^n ε_g^n`.
pub fn open(f: &Band, se: &StructuringElement, n: usize) -> Result<Band, MorphError> {
    dilate(&erode(f, se, n)?, se, n)
}

/// `n`-closing `φ_g^n = ε_g^n δ_g^n`.
pub fn close(f: &Band, se: &StructuringElement, n: usize) -> Result<Band, MorphError> {
    erode(&dilate(f, se, n)?, se, n)
}
