//! Approximation-rate experiments: synthetic test functions on the unit
//! square, N-term error curves and log-log slope fits, plus the Haar
//! coefficient oracles in [`oracle`].

mod oracle;

pub use oracle::{
    coefficient_bound_check, coefficient_identity_check, haar_psi, haar_psi_antiderivative,
    simpson, BoundSweep, IdentityCheck, Polynomial,
};

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rayon::prelude::*;

use crate::approx::select_top_n;
use crate::dwt1d::BoundaryMode;
use crate::error::{Error, Result};
use crate::filterbank::FilterBank;
use crate::transform2d::{apply_mask, CoeffContainer, Decomposition, Image, Levels, TransformKind};

/// Axis-aligned rectangles `[x0, x1) x [y0, y1)` used by
/// [`TestFunction::AxisEdges`]. Corners avoid dyadic positions.
pub const AXIS_EDGE_RECTS: [[f64; 4]; 3] = [
    [0.13, 0.62, 0.21, 0.77],
    [0.45, 0.91, 0.08, 0.36],
    [0.71, 0.87, 0.55, 0.93],
];

/// Functions on `[0,1]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestFunction {
    /// `sin(2 pi x) sin(2 pi y)`
    TensorSmooth,
    /// `sin(2 pi x) + sin(2 pi y)`
    AdditiveSmooth,
    /// Indicator of the union of [`AXIS_EDGE_RECTS`].
    AxisEdges,
    /// Indicator of `x + y > 1`.
    DiagonalEdge,
}

impl TestFunction {
    pub const ALL: [TestFunction; 4] = [
        TestFunction::TensorSmooth,
        TestFunction::AdditiveSmooth,
        TestFunction::AxisEdges,
        TestFunction::DiagonalEdge,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            TestFunction::TensorSmooth => "tensor_smooth",
            TestFunction::AdditiveSmooth => "additive_smooth",
            TestFunction::AxisEdges => "axis_edges",
            TestFunction::DiagonalEdge => "diagonal_edge",
        }
    }

    pub fn eval(self, x: f64, y: f64) -> f64 {
        use std::f64::consts::TAU;
        match self {
            TestFunction::TensorSmooth => (TAU * x).sin() * (TAU * y).sin(),
            TestFunction::AdditiveSmooth => (TAU * x).sin() + (TAU * y).sin(),
            TestFunction::AxisEdges => {
                let inside = AXIS_EDGE_RECTS
                    .iter()
                    .any(|r| x >= r[0] && x < r[1] && y >= r[2] && y < r[3]);
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            TestFunction::DiagonalEdge => {
                if x + y > 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TestFunction::ALL
            .into_iter()
            .find(|t| t.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown test function '{s}'")))
    }
}

/// `n x n` midpoint samples: pixel `(r, c)` holds `f((c + 1/2)/n, (r + 1/2)/n)`.
pub fn sample_function(f: TestFunction, n: usize) -> Image {
    let h = 1.0 / n as f64;
    Image::from_fn(n, n, |r, c| {
        f.eval((c as f64 + 0.5) * h, (r as f64 + 0.5) * h)
    })
}

/// `(sum |e|^q / count)^(1/q)`; `q = inf` gives the max error.
pub fn lq_error(a: &Image, b: &Image, q: f64) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::DimensionMismatch("images differ in shape".into()));
    }
    if !(q >= 1.0) {
        return Err(Error::Config(format!("q = {q} must be >= 1")));
    }
    let diffs = a.data().iter().zip(b.data()).map(|(x, y)| (x - y).abs());
    if q.is_infinite() {
        return Ok(diffs.fold(0.0, f64::max));
    }
    let s: f64 = diffs.map(|e| e.powf(q)).sum();
    Ok((s / a.len() as f64).powf(1.0 / q))
}

/// Error of the best-N approximation at a series of budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub transform: String,
    pub bank: String,
    pub q: f64,
    /// `(N, error)` with N strictly increasing.
    pub points: Vec<(usize, f64)>,
}

impl RateCurve {
    pub fn budgets(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    pub fn csv_header() -> &'static str {
        "transform,bank,N,error_q"
    }

    /// Data rows only, without header or slope line.
    pub fn csv_rows(&self) -> String {
        self.points
            .iter()
            .map(|(n, e)| format!("{},{},{},{:e}\n", self.transform, self.bank, n, e))
            .collect()
    }

    /// Header, rows and a trailing `# slope` comment over the default range.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n{}", Self::csv_header(), self.csv_rows());
        match fit_loglog_slope(self, default_fit_range(self.points.len())) {
            Ok(s) => out.push_str(&format!(
                "# slope transform={} bank={} q={} value={:.6}\n",
                self.transform, self.bank, self.q, s
            )),
            Err(e) => out.push_str(&format!("# slope unavailable: {e}\n")),
        }
        out
    }

    /// Parses CSV written by [`RateCurve::to_csv`]. Rows for several
    /// transform/bank pairs are split into separate curves in order of first
    /// appearance. Comment lines are skipped.
    pub fn parse_csv(text: &str, q: f64) -> Result<Vec<RateCurve>> {
        let mut curves: Vec<RateCurve> = Vec::new();
        let mut header_seen = false;
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !header_seen && line.starts_with("transform,") {
                header_seen = true;
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad("expected 4 fields"));
            }
            let n: usize = f[2].trim().parse().map_err(|_| bad("bad N"))?;
            let e: f64 = f[3].trim().parse().map_err(|_| bad("bad error value"))?;
            let (t, b) = (f[0].trim(), f[1].trim());
            let idx = match curves.iter().position(|c| c.transform == t && c.bank == b) {
                Some(k) => k,
                None => {
                    curves.push(RateCurve {
                        transform: t.to_string(),
                        bank: b.to_string(),
                        q,
                        points: Vec::new(),
                    });
                    curves.len() - 1
                }
            };
            let c = &mut curves[idx];
            if c.points.last().is_some_and(|&(last, _)| last >= n) {
                return Err(bad("N must be strictly increasing"));
            }
            if !(e >= 0.0) {
                return Err(bad("negative error"));
            }
            c.points.push((n, e));
        }
        Ok(curves)
    }
}

/// Checks that budgets are strictly increasing, nonzero and at most `total`.
pub fn check_budgets(budgets: &[usize], total: usize) -> Result<()> {
    if budgets.is_empty() {
        return Err(Error::Config("no budgets given".into()));
    }
    if budgets[0] == 0 {
        return Err(Error::Config("budgets must be positive".into()));
    }
    if budgets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("budgets must be strictly increasing".into()));
    }
    let last = *budgets.last().unwrap();
    if last > total {
        return Err(Error::SelectionOverflow {
            requested: last,
            total,
        });
    }
    Ok(())
}

/// Top-N error curve. Budgets run in parallel; the result follows input order.
pub fn rate_curve(
    img: &Image,
    kind: TransformKind,
    fb: &FilterBank,
    levels: Levels,
    budgets: &[usize],
    q: f64,
) -> Result<RateCurve> {
    check_budgets(budgets, img.len())?;
    let dec = Decomposition::forward(img, fb, kind, levels, BoundaryMode::Periodic)?;
    let values = dec.values();
    let points = budgets
        .par_iter()
        .map(|&n| {
            let mask = select_top_n(&values, n)?;
            let approx = apply_mask(&dec, &mask)?.reconstruct(fb)?;
            Ok((n, lq_error(img, &approx, q)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RateCurve {
        transform: kind.to_string(),
        bank: fb.name.clone(),
        q,
        points,
    })
}

/// Index range that drops the first and last 15% of points.
pub fn default_fit_range(len: usize) -> Range<usize> {
    let drop = (len as f64 * 0.15).floor() as usize;
    drop..len - drop
}

/// Least-squares slope of `ln(error)` against `ln(N)` over `range`.
pub fn fit_loglog_slope(curve: &RateCurve, range: Range<usize>) -> Result<f64> {
    let pts = curve
        .points
        .get(range.clone())
        .ok_or_else(|| Error::Numeric(format!("fit range {range:?} out of bounds")))?;
    if pts.len() < 3 {
        return Err(Error::Numeric(format!(
            "need at least 3 points to fit, got {}",
            pts.len()
        )));
    }
    if pts.iter().any(|&(_, e)| !(e > 0.0)) {
        return Err(Error::Numeric("zero error inside fit range".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|&(_, e)| e.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// `2^lo, 2^(lo+1), ..., 2^hi`.
pub fn dyadic_budgets(lo: u32, hi: u32) -> Vec<usize> {
    (lo..=hi).map(|k| 1usize << k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::builtin;

    #[test]
    fn tensor_smooth_two_by_two() {
        let img = sample_function(TestFunction::TensorSmooth, 2);
        let want = [1.0, -1.0, -1.0, 1.0];
        for (a, b) in img.data().iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn indicator_samples_are_binary() {
        for f in [TestFunction::AxisEdges, TestFunction::DiagonalEdge] {
            let img = sample_function(f, 64);
            assert!(img.data().iter().all(|&v| v == 0.0 || v == 1.0));
            assert!(img.data().contains(&1.0));
        }
    }

    #[test]
    fn additive_mean_zero() {
        let img = sample_function(TestFunction::AdditiveSmooth, 256);
        let mean = img.data().iter().sum::<f64>() / img.len() as f64;
        assert!(mean.abs() < 1e-3);
    }

    #[test]
    fn tags_round_trip() {
        for f in TestFunction::ALL {
            assert_eq!(f.tag().parse::<TestFunction>().unwrap(), f);
        }
        assert!("nope".parse::<TestFunction>().is_err());
    }

    #[test]
    fn full_budget_is_exact() {
        let fb = builtin("haar").unwrap();
        let img = sample_function(TestFunction::TensorSmooth, 32);
        for kind in [TransformKind::Square, TransformKind::Rect] {
            let c = rate_curve(&img, kind, &fb, Levels::uniform(5), &[1024], 2.0).unwrap();
            assert!(c.points[0].1 < 1e-10);
        }
    }

    #[test]
    fn budgets_validated() {
        assert!(check_budgets(&[4, 2], 10).is_err());
        assert!(check_budgets(&[2, 2], 10).is_err());
        assert!(check_budgets(&[2, 20], 10).is_err());
        assert!(check_budgets(&[], 10).is_err());
        assert!(check_budgets(&[1, 10], 10).is_ok());
    }

    #[test]
    fn exact_power_law_slope() {
        let curve = RateCurve {
            transform: "rect".into(),
            bank: "haar".into(),
            q: 2.0,
            points: dyadic_budgets(4, 12)
                .into_iter()
                .map(|n| (n, 3.0 / n as f64))
                .collect(),
        };
        let s = fit_loglog_slope(&curve, default_fit_range(curve.points.len())).unwrap();
        assert!((s + 1.0).abs() < 1e-9);
        assert!(fit_loglog_slope(&curve, 0..2).is_err());
    }

    #[test]
    fn slope_rejects_zero_error() {
        let curve = RateCurve {
            transform: "rect".into(),
            bank: "haar".into(),
            q: 2.0,
            points: vec![(1, 1.0), (2, 0.5), (4, 0.0)],
        };
        assert!(fit_loglog_slope(&curve, 0..3).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let curve = RateCurve {
            transform: "square".into(),
            bank: "d4".into(),
            q: 2.0,
            points: vec![(16, 0.5), (32, 0.25), (64, 0.125), (128, 0.0625)],
        };
        let parsed = RateCurve::parse_csv(&curve.to_csv(), 2.0).unwrap();
        assert_eq!(parsed, vec![curve]);
    }

    #[test]
    fn lq_error_values() {
        let a = Image::zeros(2, 2);
        let b = Image::new(2, 2, vec![1.0, -1.0, 1.0, -1.0]).unwrap();
        assert!((lq_error(&a, &b, 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lq_error(&a, &b, f64::INFINITY).unwrap(), 1.0);
    }
}
