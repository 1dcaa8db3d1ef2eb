//! Two-dimensional separable transforms.
//!
//! * [`square_forward`] is the Mallat pyramid: each level filters the rows
//!   and columns of the current low-pass block once, so every basis function
//!   has equal dilation in `x` and `y`.
//! * [`rect_forward`] runs a complete multilevel 1D transform along every row
//!   and then along every column. Subband `(sx, sy)` pairs any `x` scale with
//!   any `y` scale, giving basis functions supported on rectangles.
//!
//! Axis conventions: `x` is the column index and `y` the row index. A band
//! name lists the `x` filter first, so `hl` is high-pass in `x` and low-pass
//! in `y` (it responds to vertical edges).

mod energy;
mod rect;
mod square;
mod stream;

pub use energy::{energy_distribution, EnergyTable, LevelEnergy};
pub(crate) use rect::axis_span;
pub use rect::{rect_forward, rect_forward_with_order, rect_inverse, AxisOrder, RectGrid};
pub use square::{square_forward, square_inverse, SquareBand, SquareLevel, SquarePyramid};
pub use stream::{apply_mask, coeff_stream, CoeffContainer, CoeffKey};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::filterbank::FilterBank;

/// Largest depth picked when the caller does not specify one.
pub const DEFAULT_MAX_LEVELS: usize = 6;

/// A dense row-major plane of real samples. Also used for subband blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} image needs {} samples, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    /// Builds an image from `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Copies the `rows x cols` window whose top-left corner is `(r0, c0)`.
    pub fn crop(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Image {
        Image::from_fn(rows, cols, |r, c| self.get(r0 + r, c0 + c))
    }

    /// Writes `block` with its top-left corner at `(r0, c0)`.
    pub fn paste(&mut self, r0: usize, c0: usize, block: &Image) {
        for r in 0..block.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + block.cols].copy_from_slice(block.row(r));
        }
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn max_abs_diff(&self, other: &Image) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn same_shape(&self, other: &Image) -> bool {
        self.rows == other.rows && self.cols == other.cols
    }

    /// Pads to `rows x cols` by whole-point reflection about the last row
    /// and column.
    pub fn pad_reflect(&self, rows: usize, cols: usize) -> Image {
        let fold = |p: usize, n: usize| -> usize {
            if n == 1 {
                return 0;
            }
            let period = 2 * (n - 1);
            let q = p % period;
            if q >= n {
                period - q
            } else {
                q
            }
        };
        Image::from_fn(rows, cols, |r, c| {
            self.get(fold(r, self.rows), fold(c, self.cols))
        })
    }
}

/// Which separable transform to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Square,
    Rect,
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransformKind::Square => "square",
            TransformKind::Rect => "rect",
        })
    }
}

impl FromStr for TransformKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(TransformKind::Square),
            "rect" | "rectangular" => Ok(TransformKind::Rect),
            other => Err(Error::Config(format!("unknown transform `{other}`"))),
        }
    }
}

/// Decomposition depth; square transforms use `levels_x` for both axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Levels {
    pub x: usize,
    pub y: usize,
}

impl Levels {
    pub fn uniform(j: usize) -> Self {
        Self { x: j, y: j }
    }

    /// `min(v2(rows), v2(cols), 6)` on both axes, where `v2` is the 2-adic
    /// valuation.
    pub fn default_for(rows: usize, cols: usize) -> Self {
        Self::uniform(default_levels(rows, cols))
    }
}

impl fmt::Display for Levels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.x == self.y {
            write!(f, "{}", self.x)
        } else {
            write!(f, "{},{}", self.x, self.y)
        }
    }
}

impl FromStr for Levels {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad levels `{s}` (expected J or Jx,Jy)"));
        let parse = |t: &str| t.trim().parse::<usize>().ok().filter(|&v| v > 0);
        match s.split_once(',') {
            None => parse(s).map(Levels::uniform).ok_or_else(bad),
            Some((a, b)) => Ok(Levels {
                x: parse(a).ok_or_else(bad)?,
                y: parse(b).ok_or_else(bad)?,
            }),
        }
    }
}

/// See [`Levels::default_for`].
pub fn default_levels(rows: usize, cols: usize) -> usize {
    let v2 = |n: usize| {
        if n == 0 {
            0
        } else {
            n.trailing_zeros() as usize
        }
    };
    v2(rows).min(v2(cols)).min(DEFAULT_MAX_LEVELS)
}

/// Either kind of 2D decomposition.
#[derive(Debug, Clone, PartialEq)]
pub enum Decomposition {
    Square(SquarePyramid),
    Rect(RectGrid),
}

impl Decomposition {
    pub fn forward(
        img: &Image,
        fb: &FilterBank,
        kind: TransformKind,
        levels: Levels,
        boundary: crate::dwt1d::BoundaryMode,
    ) -> Result<Self> {
        match kind {
            TransformKind::Square => {
                if levels.x != levels.y {
                    return Err(Error::Config(
                        "square transform takes a single level count".into(),
                    ));
                }
                square_forward(img, fb, levels.x, boundary).map(Decomposition::Square)
            }
            TransformKind::Rect => {
                rect_forward(img, fb, levels.x, levels.y, boundary).map(Decomposition::Rect)
            }
        }
    }

    pub fn kind(&self) -> TransformKind {
        match self {
            Decomposition::Square(_) => TransformKind::Square,
            Decomposition::Rect(_) => TransformKind::Rect,
        }
    }

    pub fn levels(&self) -> Levels {
        match self {
            Decomposition::Square(p) => Levels::uniform(p.depth()),
            Decomposition::Rect(g) => Levels {
                x: g.jx(),
                y: g.jy(),
            },
        }
    }
}

impl CoeffContainer for Decomposition {
    fn rows(&self) -> usize {
        match self {
            Decomposition::Square(p) => p.rows(),
            Decomposition::Rect(g) => g.rows(),
        }
    }

    fn cols(&self) -> usize {
        match self {
            Decomposition::Square(p) => p.cols(),
            Decomposition::Rect(g) => g.cols(),
        }
    }

    fn bank(&self) -> &str {
        match self {
            Decomposition::Square(p) => p.bank(),
            Decomposition::Rect(g) => g.bank(),
        }
    }

    fn boundary(&self) -> crate::dwt1d::BoundaryMode {
        match self {
            Decomposition::Square(p) => p.boundary(),
            Decomposition::Rect(g) => g.boundary(),
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            Decomposition::Square(p) => p.values(),
            Decomposition::Rect(g) => g.values(),
        }
    }

    fn keys(&self) -> Vec<CoeffKey> {
        match self {
            Decomposition::Square(p) => p.keys(),
            Decomposition::Rect(g) => g.keys(),
        }
    }

    fn with_values(&self, values: &[f64]) -> Result<Self> {
        match self {
            Decomposition::Square(p) => p.with_values(values).map(Decomposition::Square),
            Decomposition::Rect(g) => g.with_values(values).map(Decomposition::Rect),
        }
    }

    fn reconstruct(&self, fb: &FilterBank) -> Result<Image> {
        match self {
            Decomposition::Square(p) => p.reconstruct(fb),
            Decomposition::Rect(g) => g.reconstruct(fb),
        }
    }

    fn dilation_sums(&self) -> Option<Vec<usize>> {
        match self {
            Decomposition::Square(p) => p.dilation_sums(),
            Decomposition::Rect(g) => g.dilation_sums(),
        }
    }
}
