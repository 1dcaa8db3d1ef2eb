//! One-dimensional fast wavelet transform.
//!
//! One analysis step maps a signal of even length `n` to two half-length
//! channels:
//!
//! ```text
//! approx_i = 1/sqrt(2) * sum_j h_dual_j * s_{2i+j}
//! detail_i = 1/sqrt(2) * sum_j g_dual_j * s_{2i+j}
//! ```
//!
//! where `j` runs over the absolute tap indices (so a filter with start
//! offset `o` reads the window beginning at `2i + o`). Synthesis is the
//! transpose with the primal filters:
//!
//! ```text
//! s_n = 1/sqrt(2) * sum_i (h_{n-2i} * approx_i + g_{n-2i} * detail_i)
//! ```
//!
//! Out-of-range samples are either wrapped (periodic) or reflected about the
//! first and last sample (whole-point symmetric). Each output value is a sum
//! evaluated in fixed tap order, so results do not depend on scheduling.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::filterbank::FilterBank;

/// How a finite signal is extended past its ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoundaryMode {
    #[default]
    Periodic,
    /// Whole-point symmetric extension (`.. s2 s1 | s0 s1 .. s_{n-1} | s_{n-2} ..`).
    /// Only valid for odd-length symmetric banks.
    Symmetric,
}

impl fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryMode::Periodic => "periodic",
            BoundaryMode::Symmetric => "symmetric",
        })
    }
}

impl FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(BoundaryMode::Periodic),
            "symmetric" => Ok(BoundaryMode::Symmetric),
            other => Err(Error::Config(format!("unknown boundary mode `{other}`"))),
        }
    }
}

/// Multilevel 1D coefficients. `details[0]` is the coarsest level and
/// `details.last()` the finest; `details[k].len() == approx.len() << k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffLevels {
    pub approx: Vec<f64>,
    pub details: Vec<Vec<f64>>,
    pub boundary: BoundaryMode,
}

impl CoeffLevels {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Total coefficient count, equal to the original signal length.
    pub fn len(&self) -> usize {
        self.approx.len() + self.details.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Concatenation `[approx, coarsest detail, ..., finest detail]`.
    pub fn to_packed(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        out.extend_from_slice(&self.approx);
        for d in &self.details {
            out.extend_from_slice(d);
        }
        out
    }

    fn check_shape(&self) -> Result<()> {
        if self.approx.is_empty() {
            return Err(Error::Malformed("empty approximation channel".into()));
        }
        for (k, d) in self.details.iter().enumerate() {
            let want = self.approx.len() << k;
            if d.len() != want {
                return Err(Error::Malformed(format!(
                    "detail level {k} has {} entries, expected {want}",
                    d.len()
                )));
            }
        }
        Ok(())
    }
}

#[inline]
fn wrap(p: i64, n: usize) -> usize {
    p.rem_euclid(n as i64) as usize
}

/// Whole-point reflection of position `p` into `0..n`.
#[inline]
fn reflect(p: i64, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as i64 - 1);
    let q = p.rem_euclid(period);
    if q >= n as i64 {
        (period - q) as usize
    } else {
        q as usize
    }
}

fn check_boundary(fb: &FilterBank, boundary: BoundaryMode) -> Result<()> {
    if boundary == BoundaryMode::Symmetric && !fb.supports_symmetric() {
        return Err(Error::IncompatibleBoundary(fb.name.clone()));
    }
    Ok(())
}

/// Analysis kernel writing into caller-provided halves.
pub(crate) fn analysis_into(
    signal: &[f64],
    approx: &mut [f64],
    detail: &mut [f64],
    fb: &FilterBank,
    boundary: BoundaryMode,
) {
    let n = signal.len();
    let half = n / 2;
    debug_assert!(approx.len() == half && detail.len() == half);
    for i in 0..half {
        let base = 2 * i as i64;
        let mut a = 0.0;
        for (j, c) in fb.h_dual.iter() {
            let p = base + j;
            let idx = match boundary {
                BoundaryMode::Periodic => wrap(p, n),
                BoundaryMode::Symmetric => reflect(p, n),
            };
            a += c * signal[idx];
        }
        let mut d = 0.0;
        for (j, c) in fb.g_dual.iter() {
            let p = base + j;
            let idx = match boundary {
                BoundaryMode::Periodic => wrap(p, n),
                BoundaryMode::Symmetric => reflect(p, n),
            };
            d += c * signal[idx];
        }
        approx[i] = a * FRAC_1_SQRT_2;
        detail[i] = d * FRAC_1_SQRT_2;
    }
}

/// Synthesis kernel writing into `out` (length `2 * approx.len()`).
pub(crate) fn synthesis_into(
    approx: &[f64],
    detail: &[f64],
    out: &mut [f64],
    fb: &FilterBank,
    boundary: BoundaryMode,
) {
    let half = approx.len();
    let n = 2 * half;
    debug_assert!(detail.len() == half && out.len() == n);
    for (s, slot) in out.iter_mut().enumerate() {
        let s = s as i64;
        let mut acc = 0.0;
        for (j, c) in fb.h.iter() {
            let p = s - j;
            if p.rem_euclid(2) != 0 {
                continue;
            }
            let i = match boundary {
                BoundaryMode::Periodic => wrap(p / 2, half),
                // approx_i sits at position 2i
                BoundaryMode::Symmetric => reflect(p, n) / 2,
            };
            acc += c * approx[i];
        }
        for (j, c) in fb.g.iter() {
            let p = s - j;
            if p.rem_euclid(2) != 0 {
                continue;
            }
            let i = match boundary {
                BoundaryMode::Periodic => wrap(p.div_euclid(2), half),
                // detail_i sits at position 2i + 1
                BoundaryMode::Symmetric => (reflect(p + 1, n) - 1) / 2,
            };
            acc += c * detail[i];
        }
        *slot = acc * FRAC_1_SQRT_2;
    }
}

/// One analysis step. The signal length must be even and at least 2.
pub fn analysis_step(
    signal: &[f64],
    fb: &FilterBank,
    boundary: BoundaryMode,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = signal.len();
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::OddLength(n));
    }
    check_boundary(fb, boundary)?;
    let mut approx = vec![0.0; n / 2];
    let mut detail = vec![0.0; n / 2];
    analysis_into(signal, &mut approx, &mut detail, fb, boundary);
    Ok((approx, detail))
}

/// One synthesis step, the exact inverse of [`analysis_step`].
pub fn synthesis_step(
    approx: &[f64],
    detail: &[f64],
    fb: &FilterBank,
    boundary: BoundaryMode,
) -> Result<Vec<f64>> {
    if approx.len() != detail.len() {
        return Err(Error::LengthMismatch {
            expected: approx.len(),
            found: detail.len(),
        });
    }
    if approx.is_empty() {
        return Err(Error::OddLength(0));
    }
    check_boundary(fb, boundary)?;
    let mut out = vec![0.0; 2 * approx.len()];
    synthesis_into(approx, detail, &mut out, fb, boundary);
    Ok(out)
}

pub(crate) fn check_levels(len: usize, levels: usize) -> Result<()> {
    if levels == 0
        || levels >= usize::BITS as usize
        || len == 0
        || !len.is_multiple_of(1usize << levels)
    {
        return Err(Error::Divisibility { len, levels });
    }
    Ok(())
}

/// In-place multilevel transform of `buf` into the packed layout
/// `[approx, coarsest detail, ..., finest detail]`. `scratch` must be at
/// least as long as `buf`. Shape checks are the caller's job.
pub(crate) fn forward_packed(
    buf: &mut [f64],
    scratch: &mut [f64],
    fb: &FilterBank,
    levels: usize,
    boundary: BoundaryMode,
) {
    let mut len = buf.len();
    for _ in 0..levels {
        let half = len / 2;
        let (lo, hi) = scratch[..len].split_at_mut(half);
        analysis_into(&buf[..len], lo, hi, fb, boundary);
        buf[..len].copy_from_slice(&scratch[..len]);
        len = half;
    }
}

/// Inverse of [`forward_packed`].
pub(crate) fn inverse_packed(
    buf: &mut [f64],
    scratch: &mut [f64],
    fb: &FilterBank,
    levels: usize,
    boundary: BoundaryMode,
) {
    let n = buf.len();
    let mut len = n >> levels;
    for _ in 0..levels {
        let (lo, hi) = buf[..2 * len].split_at(len);
        synthesis_into(lo, hi, &mut scratch[..2 * len], fb, boundary);
        buf[..2 * len].copy_from_slice(&scratch[..2 * len]);
        len *= 2;
    }
}

/// Multilevel forward transform: `levels` analysis steps on the approximation
/// channel. `2^levels` must divide the signal length.
pub fn forward(
    signal: &[f64],
    fb: &FilterBank,
    levels: usize,
    boundary: BoundaryMode,
) -> Result<CoeffLevels> {
    check_levels(signal.len(), levels)?;
    check_boundary(fb, boundary)?;
    let mut buf = signal.to_vec();
    let mut scratch = vec![0.0; buf.len()];
    forward_packed(&mut buf, &mut scratch, fb, levels, boundary);
    let mut len = signal.len() >> levels;
    let approx = buf[..len].to_vec();
    let mut details = Vec::with_capacity(levels);
    let mut start = len;
    for _ in 0..levels {
        details.push(buf[start..start + len].to_vec());
        start += len;
        len *= 2;
    }
    Ok(CoeffLevels {
        approx,
        details,
        boundary,
    })
}

/// Inverse of [`forward`].
pub fn inverse(coeffs: &CoeffLevels, fb: &FilterBank) -> Result<Vec<f64>> {
    coeffs.check_shape()?;
    check_boundary(fb, coeffs.boundary)?;
    let mut buf = coeffs.to_packed();
    let mut scratch = vec![0.0; buf.len()];
    inverse_packed(&mut buf, &mut scratch, fb, coeffs.levels(), coeffs.boundary);
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::builtin;
    use std::f64::consts::SQRT_2;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn haar_constant_step() {
        let fb = builtin("haar").unwrap();
        let (a, d) = analysis_step(&[1.0; 4], &fb, BoundaryMode::Periodic).unwrap();
        assert!(close(&a, &[SQRT_2, SQRT_2], 1e-15));
        assert!(close(&d, &[0.0, 0.0], 1e-15));
    }

    #[test]
    fn haar_impulse_step() {
        let fb = builtin("haar").unwrap();
        let (a, d) = analysis_step(&[1.0, 0.0, 0.0, 0.0], &fb, BoundaryMode::Periodic).unwrap();
        assert!(close(&a, &[FRAC_1_SQRT_2, 0.0], 1e-15));
        assert!(close(&d, &[FRAC_1_SQRT_2, 0.0], 1e-15));
    }

    #[test]
    fn d4_linear_interior_details_vanish() {
        let fb = builtin("d4").unwrap();
        let s: Vec<f64> = (0..8).map(f64::from).collect();
        let (_, d) = analysis_step(&s, &fb, BoundaryMode::Periodic).unwrap();
        // windows 2i..2i+3 stay inside 0..8 for i = 0, 1, 2
        for &v in &d[..3] {
            assert!(v.abs() < 1e-12, "{d:?}");
        }
        assert!(d[3].abs() > 1.0);
    }

    #[test]
    fn synthesis_examples() {
        let fb = builtin("haar").unwrap();
        let s =
            synthesis_step(&[SQRT_2, SQRT_2], &[0.0, 0.0], &fb, BoundaryMode::Periodic).unwrap();
        assert!(close(&s, &[1.0; 4], 1e-15));
        let s = synthesis_step(&[1.0, 0.0], &[0.0, 0.0], &fb, BoundaryMode::Periodic).unwrap();
        assert!(close(&s, &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0], 1e-15));
    }

    #[test]
    fn step_round_trip_all_banks() {
        let x = [3.0, -1.0, 4.0, 1.5, -5.0, 9.0, 2.0, 6.5];
        for name in ["haar", "d4", "crf137"] {
            let fb = builtin(name).unwrap();
            let (a, d) = analysis_step(&x, &fb, BoundaryMode::Periodic).unwrap();
            let back = synthesis_step(&a, &d, &fb, BoundaryMode::Periodic).unwrap();
            assert!(close(&back, &x, 1e-12), "{name}");
        }
    }

    #[test]
    fn forward_constant_haar() {
        let fb = builtin("haar").unwrap();
        let c = forward(&[1.0; 4], &fb, 2, BoundaryMode::Periodic).unwrap();
        assert!(close(&c.approx, &[2.0], 1e-15));
        assert!(close(&c.details[0], &[0.0], 1e-15));
        assert!(close(&c.details[1], &[0.0, 0.0], 1e-15));
    }

    #[test]
    fn forward_ramp_haar() {
        let fb = builtin("haar").unwrap();
        let s: Vec<f64> = (0..8).map(f64::from).collect();
        let c = forward(&s, &fb, 1, BoundaryMode::Periodic).unwrap();
        assert!(close(&c.details[0], &[-FRAC_1_SQRT_2; 4], 1e-15));
    }

    #[test]
    fn errors() {
        let fb = builtin("haar").unwrap();
        assert!(matches!(
            analysis_step(&[1.0, 2.0, 3.0], &fb, BoundaryMode::Periodic),
            Err(Error::OddLength(3))
        ));
        assert!(matches!(
            analysis_step(&[1.0, 2.0], &fb, BoundaryMode::Symmetric),
            Err(Error::IncompatibleBoundary(_))
        ));
        assert!(matches!(
            synthesis_step(&[1.0], &[1.0, 2.0], &fb, BoundaryMode::Periodic),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            forward(&[0.0; 12], &fb, 3, BoundaryMode::Periodic),
            Err(Error::Divisibility { len: 12, levels: 3 })
        ));
        let bad = CoeffLevels {
            approx: vec![1.0],
            details: vec![vec![0.0], vec![0.0]],
            boundary: BoundaryMode::Periodic,
        };
        assert!(matches!(inverse(&bad, &fb), Err(Error::Malformed(_))));
    }

    #[test]
    fn symmetric_round_trip_small_lengths() {
        let fb = builtin("crf137").unwrap();
        for n in [2usize, 4, 6, 8, 10, 16] {
            let x: Vec<f64> = (0..n).map(|i| ((i * 7 + 3) % 11) as f64 - 4.0).collect();
            let (a, d) = analysis_step(&x, &fb, BoundaryMode::Symmetric).unwrap();
            let back = synthesis_step(&a, &d, &fb, BoundaryMode::Symmetric).unwrap();
            assert!(close(&back, &x, 1e-12), "n = {n}: {back:?}");
        }
    }

    #[test]
    fn symmetric_extension_annihilates_cubics_at_edges() {
        // whole-point extension of a linear ramp is not linear across the
        // edges, but an even polynomial about sample 0 stays polynomial.
        let fb = builtin("crf137").unwrap();
        let x: Vec<f64> = (0..32).map(|i| (i as f64).powi(2)).collect();
        let (_, d) = analysis_step(&x, &fb, BoundaryMode::Symmetric).unwrap();
        for &v in &d[..10] {
            assert!(v.abs() < 1e-9, "{d:?}");
        }
    }

    #[test]
    fn reflect_indices() {
        let got: Vec<usize> = (-4..10).map(|p| reflect(p, 5)).collect();
        assert_eq!(got, vec![4, 3, 2, 1, 0, 1, 2, 3, 4, 3, 2, 1, 0, 1]);
    }
}
