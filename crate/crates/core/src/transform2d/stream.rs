use crate::dwt1d::BoundaryMode;
use crate::error::{Error, Result};
use crate::filterbank::FilterBank;

use super::{Image, SquareBand};

/// Location of one coefficient slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoeffKey {
    /// `scale` 0 is the LL block; `scale` s >= 1 is the s-th detail level
    /// counted from the coarsest.
    Square {
        scale: usize,
        band: SquareBand,
        row: usize,
        col: usize,
    },
    /// Per-axis scale index: 0 is the scaling (A) channel, s >= 1 the s-th
    /// detail level counted from the coarsest.
    Rect {
        sx: usize,
        sy: usize,
        row: usize,
        col: usize,
    },
}

/// Common view over coefficient containers, in canonical stream order.
///
/// The canonical order is: subbands sorted by `(scale, band)` for square
/// pyramids and by `(sx + sy, sx, sy)` for rectangular grids, each block
/// row-major. It is total and deterministic.
pub trait CoeffContainer: Sized {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn bank(&self) -> &str;
    fn boundary(&self) -> BoundaryMode;

    /// Number of coefficient slots (always `rows * cols`).
    fn total(&self) -> usize {
        self.rows() * self.cols()
    }

    /// All coefficient values in canonical order.
    fn values(&self) -> Vec<f64>;

    /// Slot keys in canonical order.
    fn keys(&self) -> Vec<CoeffKey>;

    /// Same layout with new values (canonical order).
    fn with_values(&self, values: &[f64]) -> Result<Self>;

    fn reconstruct(&self, fb: &FilterBank) -> Result<Image>;

    /// Per-slot sum of per-axis dilation levels, for containers whose
    /// subbands carry independent per-axis scales. `None` for square pyramids.
    fn dilation_sums(&self) -> Option<Vec<usize>> {
        None
    }
}

/// `(key, value)` pairs in canonical order.
pub fn coeff_stream<C: CoeffContainer>(c: &C) -> Vec<(CoeffKey, f64)> {
    c.keys().into_iter().zip(c.values()).collect()
}

/// Zeroes every slot whose mask entry is `false`. Kept values are untouched.
pub fn apply_mask<C: CoeffContainer>(c: &C, mask: &[bool]) -> Result<C> {
    let mut values = c.values();
    if mask.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            found: mask.len(),
        });
    }
    for (v, &keep) in values.iter_mut().zip(mask) {
        if !keep {
            *v = 0.0;
        }
    }
    c.with_values(&values)
}

pub(super) fn check_len(values: &[f64], total: usize) -> Result<()> {
    if values.len() != total {
        return Err(Error::LengthMismatch {
            expected: total,
            found: values.len(),
        });
    }
    Ok(())
}
