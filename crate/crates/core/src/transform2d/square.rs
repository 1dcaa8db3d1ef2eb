use crate::dwt1d::{analysis_into, check_levels, synthesis_into, BoundaryMode};
use crate::error::{Error, Result};
use crate::filterbank::FilterBank;

use super::stream::check_len;
use super::{CoeffContainer, CoeffKey, Image};

/// Subband tag for the square transform; the first letter is the `x` filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SquareBand {
    Ll,
    /// low-pass in x, high-pass in y: `phi(x) psi(y)`
    Lh,
    /// high-pass in x, low-pass in y: `psi(x) phi(y)`
    Hl,
    /// `psi(x) psi(y)`
    Hh,
}

impl SquareBand {
    pub fn tag(self) -> &'static str {
        match self {
            SquareBand::Ll => "ll",
            SquareBand::Lh => "lh",
            SquareBand::Hl => "hl",
            SquareBand::Hh => "hh",
        }
    }
}

/// Detail blocks produced by one pyramid step.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareLevel {
    pub lh: Image,
    pub hl: Image,
    pub hh: Image,
}

/// Mallat pyramid coefficients. `levels[k - 1]` holds the blocks from
/// decomposition step `k`, so `levels[0]` is the finest (largest) level and
/// `levels.last()` the coarsest; `ll` is the final low-pass block.
#[derive(Debug, Clone, PartialEq)]
pub struct SquarePyramid {
    rows: usize,
    cols: usize,
    boundary: BoundaryMode,
    bank: String,
    pub ll: Image,
    pub levels: Vec<SquareLevel>,
}

fn check_dims(rows: usize, cols: usize, levels: usize) -> Result<()> {
    check_levels(rows, levels)?;
    check_levels(cols, levels)
}

impl SquarePyramid {
    /// An all-zero pyramid with the given layout.
    pub fn zeros(
        rows: usize,
        cols: usize,
        depth: usize,
        boundary: BoundaryMode,
        bank: impl Into<String>,
    ) -> Result<Self> {
        check_dims(rows, cols, depth)?;
        let levels = (1..=depth)
            .map(|k| {
                let (r, c) = (rows >> k, cols >> k);
                SquareLevel {
                    lh: Image::zeros(r, c),
                    hl: Image::zeros(r, c),
                    hh: Image::zeros(r, c),
                }
            })
            .collect();
        Ok(Self {
            rows,
            cols,
            boundary,
            bank: bank.into(),
            ll: Image::zeros(rows >> depth, cols >> depth),
            levels,
        })
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Blocks of level `scale` counted from the coarsest (1..=depth).
    fn level_at_scale(&self, scale: usize) -> &SquareLevel {
        &self.levels[self.depth() - scale]
    }

    fn check_shape(&self) -> Result<()> {
        check_dims(self.rows, self.cols, self.depth())?;
        let bad = |what: String| Err(Error::Malformed(what));
        let j = self.depth();
        if self.ll.rows() != self.rows >> j || self.ll.cols() != self.cols >> j {
            return bad("ll block has the wrong shape".into());
        }
        for (idx, lvl) in self.levels.iter().enumerate() {
            let (r, c) = (self.rows >> (idx + 1), self.cols >> (idx + 1));
            for (tag, b) in [("lh", &lvl.lh), ("hl", &lvl.hl), ("hh", &lvl.hh)] {
                if b.rows() != r || b.cols() != c {
                    return bad(format!("level {} {tag} block is not {r}x{c}", idx + 1));
                }
            }
        }
        Ok(())
    }

    fn blocks(&self) -> Vec<(usize, SquareBand, &Image)> {
        let mut out = vec![(0, SquareBand::Ll, &self.ll)];
        for s in 1..=self.depth() {
            let lvl = self.level_at_scale(s);
            out.push((s, SquareBand::Lh, &lvl.lh));
            out.push((s, SquareBand::Hl, &lvl.hl));
            out.push((s, SquareBand::Hh, &lvl.hh));
        }
        out
    }
}

impl CoeffContainer for SquarePyramid {
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
        for (_, _, b) in self.blocks() {
            out.extend_from_slice(b.data());
        }
        out
    }

    fn keys(&self) -> Vec<CoeffKey> {
        let mut out = Vec::with_capacity(self.total());
        for (scale, band, b) in self.blocks() {
            for row in 0..b.rows() {
                for col in 0..b.cols() {
                    out.push(CoeffKey::Square {
                        scale,
                        band,
                        row,
                        col,
                    });
                }
            }
        }
        out
    }

    fn with_values(&self, values: &[f64]) -> Result<Self> {
        check_len(values, self.total())?;
        let mut out = self.clone();
        let mut pos = 0;
        let mut take = |b: &mut Image| {
            let n = b.len();
            b.data_mut().copy_from_slice(&values[pos..pos + n]);
            pos += n;
        };
        take(&mut out.ll);
        let j = out.depth();
        for s in 1..=j {
            let lvl = &mut out.levels[j - s];
            take(&mut lvl.lh);
            take(&mut lvl.hl);
            take(&mut lvl.hh);
        }
        Ok(out)
    }

    fn reconstruct(&self, fb: &FilterBank) -> Result<Image> {
        square_inverse(self, fb)
    }
}

fn rows_forward(plane: &mut Image, r: usize, c: usize, fb: &FilterBank, b: BoundaryMode) {
    let cols = plane.cols();
    let mut src = vec![0.0; c];
    let mut lo = vec![0.0; c / 2];
    let mut hi = vec![0.0; c / 2];
    for row in 0..r {
        let off = row * cols;
        src.copy_from_slice(&plane.data()[off..off + c]);
        analysis_into(&src, &mut lo, &mut hi, fb, b);
        let dst = &mut plane.data_mut()[off..off + c];
        dst[..c / 2].copy_from_slice(&lo);
        dst[c / 2..].copy_from_slice(&hi);
    }
}

fn cols_forward(plane: &mut Image, r: usize, c: usize, fb: &FilterBank, b: BoundaryMode) {
    let mut src = vec![0.0; r];
    let mut lo = vec![0.0; r / 2];
    let mut hi = vec![0.0; r / 2];
    for col in 0..c {
        for (row, v) in src.iter_mut().enumerate() {
            *v = plane.get(row, col);
        }
        analysis_into(&src, &mut lo, &mut hi, fb, b);
        for i in 0..r / 2 {
            plane.set(i, col, lo[i]);
            plane.set(r / 2 + i, col, hi[i]);
        }
    }
}

fn rows_inverse(plane: &mut Image, r: usize, c: usize, fb: &FilterBank, b: BoundaryMode) {
    let cols = plane.cols();
    let mut out = vec![0.0; c];
    for row in 0..r {
        let off = row * cols;
        let (lo, hi) = plane.data()[off..off + c].split_at(c / 2);
        synthesis_into(lo, hi, &mut out, fb, b);
        plane.data_mut()[off..off + c].copy_from_slice(&out);
    }
}

fn cols_inverse(plane: &mut Image, r: usize, c: usize, fb: &FilterBank, b: BoundaryMode) {
    let mut lo = vec![0.0; r / 2];
    let mut hi = vec![0.0; r / 2];
    let mut out = vec![0.0; r];
    for col in 0..c {
        for i in 0..r / 2 {
            lo[i] = plane.get(i, col);
            hi[i] = plane.get(r / 2 + i, col);
        }
        synthesis_into(&lo, &hi, &mut out, fb, b);
        for (row, v) in out.iter().enumerate() {
            plane.set(row, col, *v);
        }
    }
}

/// Mallat pyramid with `depth` levels. `2^depth` must divide both dimensions.
pub fn square_forward(
    img: &Image,
    fb: &FilterBank,
    depth: usize,
    boundary: BoundaryMode,
) -> Result<SquarePyramid> {
    let (rows, cols) = (img.rows(), img.cols());
    check_dims(rows, cols, depth)?;
    if boundary == BoundaryMode::Symmetric && !fb.supports_symmetric() {
        return Err(Error::IncompatibleBoundary(fb.name.clone()));
    }
    let mut plane = img.clone();
    let mut levels = Vec::with_capacity(depth);
    for k in 0..depth {
        let (r, c) = (rows >> k, cols >> k);
        rows_forward(&mut plane, r, c, fb, boundary);
        cols_forward(&mut plane, r, c, fb, boundary);
        let (hr, hc) = (r / 2, c / 2);
        levels.push(SquareLevel {
            lh: plane.crop(hr, 0, hr, hc),
            hl: plane.crop(0, hc, hr, hc),
            hh: plane.crop(hr, hc, hr, hc),
        });
    }
    let ll = plane.crop(0, 0, rows >> depth, cols >> depth);
    Ok(SquarePyramid {
        rows,
        cols,
        boundary,
        bank: fb.name.clone(),
        ll,
        levels,
    })
}

/// Exact inverse of [`square_forward`].
pub fn square_inverse(pyr: &SquarePyramid, fb: &FilterBank) -> Result<Image> {
    pyr.check_shape()?;
    if pyr.boundary == BoundaryMode::Symmetric && !fb.supports_symmetric() {
        return Err(Error::IncompatibleBoundary(fb.name.clone()));
    }
    let mut plane = Image::zeros(pyr.rows, pyr.cols);
    plane.paste(0, 0, &pyr.ll);
    for k in (0..pyr.depth()).rev() {
        let (r, c) = (pyr.rows >> k, pyr.cols >> k);
        let (hr, hc) = (r / 2, c / 2);
        let lvl = &pyr.levels[k];
        plane.paste(hr, 0, &lvl.lh);
        plane.paste(0, hc, &lvl.hl);
        plane.paste(hr, hc, &lvl.hh);
        cols_inverse(&mut plane, r, c, fb, pyr.boundary);
        rows_inverse(&mut plane, r, c, fb, pyr.boundary);
    }
    Ok(plane)
}
