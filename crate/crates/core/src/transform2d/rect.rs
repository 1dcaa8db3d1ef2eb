use crate::dwt1d::{check_levels, forward_packed, inverse_packed, BoundaryMode};
use crate::error::{Error, Result};
use crate::filterbank::FilterBank;

use super::stream::check_len;
use super::{CoeffContainer, CoeffKey, Image};

/// Which axis the rectangular transform processes first. Both give the same
/// coefficients up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AxisOrder {
    #[default]
    RowsFirst,
    ColumnsFirst,
}

/// Rectangular (tensor-product) coefficients.
///
/// Subbands are indexed by a per-axis scale `s`: 0 is the scaling channel
/// (A), `1..=J` are detail levels from the coarsest to the finest. Along an
/// axis of length `n` with `J` levels the A channel and the coarsest detail
/// have `n >> J` entries and detail `s` has `n >> (J - s + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RectGrid {
    rows: usize,
    cols: usize,
    jx: usize,
    jy: usize,
    boundary: BoundaryMode,
    bank: String,
    /// `bands[sy * (jx + 1) + sx]`
    bands: Vec<Image>,
}

/// `(start, len)` of scale `s` in the packed layout of an axis.
pub(crate) fn axis_span(n: usize, levels: usize, s: usize) -> (usize, usize) {
    if s == 0 {
        (0, n >> levels)
    } else {
        let w = n >> (levels - s + 1);
        (w, w)
    }
}

impl RectGrid {
    pub fn zeros(
        rows: usize,
        cols: usize,
        jx: usize,
        jy: usize,
        boundary: BoundaryMode,
        bank: impl Into<String>,
    ) -> Result<Self> {
        check_levels(cols, jx)?;
        check_levels(rows, jy)?;
        let mut bands = Vec::with_capacity((jx + 1) * (jy + 1));
        for sy in 0..=jy {
            for sx in 0..=jx {
                let (_, h) = axis_span(rows, jy, sy);
                let (_, w) = axis_span(cols, jx, sx);
                bands.push(Image::zeros(h, w));
            }
        }
        Ok(Self {
            rows,
            cols,
            jx,
            jy,
            boundary,
            bank: bank.into(),
            bands,
        })
    }

    pub fn jx(&self) -> usize {
        self.jx
    }

    pub fn jy(&self) -> usize {
        self.jy
    }

    pub fn band(&self, sx: usize, sy: usize) -> &Image {
        &self.bands[sy * (self.jx + 1) + sx]
    }

    pub fn band_mut(&mut self, sx: usize, sy: usize) -> &mut Image {
        &mut self.bands[sy * (self.jx + 1) + sx]
    }

    /// Subband indices `(sx, sy)` in canonical order `(sx + sy, sx, sy)`.
    pub fn band_order(&self) -> Vec<(usize, usize)> {
        let mut order: Vec<(usize, usize)> = (0..=self.jy)
            .flat_map(|sy| (0..=self.jx).map(move |sx| (sx, sy)))
            .collect();
        order.sort_by_key(|&(sx, sy)| (sx + sy, sx, sy));
        order
    }

    /// Dilation level of scale `s` along an axis of length `n`: the A channel
    /// and the coarsest detail share `log2(n >> J)`; each finer detail adds 1.
    fn axis_dilation(n: usize, levels: usize, s: usize) -> usize {
        let base = (n >> levels).max(1).ilog2() as usize;
        base + s.saturating_sub(1)
    }

    /// `l_x + l_y` for subband `(sx, sy)`.
    pub fn dilation_sum(&self, sx: usize, sy: usize) -> usize {
        Self::axis_dilation(self.cols, self.jx, sx) + Self::axis_dilation(self.rows, self.jy, sy)
    }

    /// The packed plane: every row holds `[A, coarsest detail, ..., finest]`
    /// along x, and likewise every column along y.
    pub fn to_plane(&self) -> Image {
        let mut plane = Image::zeros(self.rows, self.cols);
        for sy in 0..=self.jy {
            for sx in 0..=self.jx {
                let (r0, _) = axis_span(self.rows, self.jy, sy);
                let (c0, _) = axis_span(self.cols, self.jx, sx);
                plane.paste(r0, c0, self.band(sx, sy));
            }
        }
        plane
    }

    fn from_plane(
        plane: &Image,
        jx: usize,
        jy: usize,
        boundary: BoundaryMode,
        bank: String,
    ) -> Self {
        let (rows, cols) = (plane.rows(), plane.cols());
        let mut bands = Vec::with_capacity((jx + 1) * (jy + 1));
        for sy in 0..=jy {
            for sx in 0..=jx {
                let (r0, h) = axis_span(rows, jy, sy);
                let (c0, w) = axis_span(cols, jx, sx);
                bands.push(plane.crop(r0, c0, h, w));
            }
        }
        Self {
            rows,
            cols,
            jx,
            jy,
            boundary,
            bank,
            bands,
        }
    }

    fn check_shape(&self) -> Result<()> {
        check_levels(self.cols, self.jx)?;
        check_levels(self.rows, self.jy)?;
        if self.bands.len() != (self.jx + 1) * (self.jy + 1) {
            return Err(Error::Malformed("wrong number of subbands".into()));
        }
        for sy in 0..=self.jy {
            for sx in 0..=self.jx {
                let (_, h) = axis_span(self.rows, self.jy, sy);
                let (_, w) = axis_span(self.cols, self.jx, sx);
                let b = self.band(sx, sy);
                if b.rows() != h || b.cols() != w {
                    return Err(Error::Malformed(format!(
                        "subband ({sx},{sy}) is {}x{}, expected {h}x{w}",
                        b.rows(),
                        b.cols()
                    )));
                }
            }
        }
        Ok(())
    }
}

impl CoeffContainer for RectGrid {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn bank(&self) -> &str {
        &self.bank
    }

    fn boundary(&self) -> BoundaryMode {
        self.boundary
    }

    fn values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total());
        for (sx, sy) in self.band_order() {
            out.extend_from_slice(self.band(sx, sy).data());
        }
        out
    }

    fn keys(&self) -> Vec<CoeffKey> {
        let mut out = Vec::with_capacity(self.total());
        for (sx, sy) in self.band_order() {
            let b = self.band(sx, sy);
            for row in 0..b.rows() {
                for col in 0..b.cols() {
                    out.push(CoeffKey::Rect { sx, sy, row, col });
                }
            }
        }
        out
    }

    fn with_values(&self, values: &[f64]) -> Result<Self> {
        check_len(values, self.total())?;
        let mut out = self.clone();
        let mut pos = 0;
        for (sx, sy) in self.band_order() {
            let b = out.band_mut(sx, sy);
            let n = b.len();
            b.data_mut().copy_from_slice(&values[pos..pos + n]);
            pos += n;
        }
        Ok(out)
    }

    fn reconstruct(&self, fb: &FilterBank) -> Result<Image> {
        rect_inverse(self, fb)
    }

    fn dilation_sums(&self) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(self.total());
        for (sx, sy) in self.band_order() {
            let l = self.dilation_sum(sx, sy);
            out.extend(std::iter::repeat_n(l, self.band(sx, sy).len()));
        }
        Some(out)
    }
}

fn transform_rows(plane: &mut Image, levels: usize, fb: &FilterBank, b: BoundaryMode, fwd: bool) {
    let cols = plane.cols();
    let mut scratch = vec![0.0; cols];
    for chunk in plane.data_mut().chunks_exact_mut(cols) {
        if fwd {
            forward_packed(chunk, &mut scratch, fb, levels, b);
        } else {
            inverse_packed(chunk, &mut scratch, fb, levels, b);
        }
    }
}

fn transform_cols(plane: &mut Image, levels: usize, fb: &FilterBank, b: BoundaryMode, fwd: bool) {
    let (rows, cols) = (plane.rows(), plane.cols());
    let mut line = vec![0.0; rows];
    let mut scratch = vec![0.0; rows];
    for c in 0..cols {
        for (r, v) in line.iter_mut().enumerate() {
            *v = plane.get(r, c);
        }
        if fwd {
            forward_packed(&mut line, &mut scratch, fb, levels, b);
        } else {
            inverse_packed(&mut line, &mut scratch, fb, levels, b);
        }
        for (r, v) in line.iter().enumerate() {
            plane.set(r, c, *v);
        }
    }
}

/// Rectangular transform: `jx` levels along every row, then `jy` levels
/// along every column.
pub fn rect_forward(
    img: &Image,
    fb: &FilterBank,
    jx: usize,
    jy: usize,
    boundary: BoundaryMode,
) -> Result<RectGrid> {
    rect_forward_with_order(img, fb, jx, jy, boundary, AxisOrder::RowsFirst)
}

/// [`rect_forward`] with an explicit axis order.
pub fn rect_forward_with_order(
    img: &Image,
    fb: &FilterBank,
    jx: usize,
    jy: usize,
    boundary: BoundaryMode,
    order: AxisOrder,
) -> Result<RectGrid> {
    check_levels(img.cols(), jx)?;
    check_levels(img.rows(), jy)?;
    if boundary == BoundaryMode::Symmetric && !fb.supports_symmetric() {
        return Err(Error::IncompatibleBoundary(fb.name.clone()));
    }
    let mut plane = img.clone();
    match order {
        AxisOrder::RowsFirst => {
            transform_rows(&mut plane, jx, fb, boundary, true);
            transform_cols(&mut plane, jy, fb, boundary, true);
        }
        AxisOrder::ColumnsFirst => {
            transform_cols(&mut plane, jy, fb, boundary, true);
            transform_rows(&mut plane, jx, fb, boundary, true);
        }
    }
    Ok(RectGrid::from_plane(
        &plane,
        jx,
        jy,
        boundary,
        fb.name.clone(),
    ))
}

/// Exact inverse of [`rect_forward`].
pub fn rect_inverse(grid: &RectGrid, fb: &FilterBank) -> Result<Image> {
    grid.check_shape()?;
    if grid.boundary == BoundaryMode::Symmetric && !fb.supports_symmetric() {
        return Err(Error::IncompatibleBoundary(fb.name.clone()));
    }
    let mut plane = grid.to_plane();
    transform_cols(&mut plane, grid.jy, fb, grid.boundary, false);
    transform_rows(&mut plane, grid.jx, fb, grid.boundary, false);
    Ok(plane)
}
