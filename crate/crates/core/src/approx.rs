//! Non-linear N-term approximation: coefficient selection, reconstruction
//! and error reporting.
//!
//! Two selection rules are provided:
//!
//! * [`SelectionStrategy::TopN`] keeps the `n` largest magnitudes (ties go to
//!   the earlier slot in canonical stream order).
//! * [`SelectionStrategy::TheoremThreshold`] follows the level-dependent
//!   threshold construction for functions with a bounded mixed derivative.
//!   With `l = l_x + l_y` the dilation sum of a subband, `N(l)` the number of
//!   slots at that sum and `D` the mixed-derivative norm,
//!
//!   ```text
//!   l0    = max { l : l^2 * N(l) <= budget }
//!   eps_l = D / 2^(l + (M + 1/p)/2 * l0 + (M - 1/p)/2 * l)      for l > l0
//!   ```
//!
//!   Every slot with `l <= l0` is kept, as is the scaling block; above `l0`
//!   a coefficient survives only if its magnitude, converted to the
//!   unit-square normalization `beta = c / (sqrt(rows * cols) * 2^(l/2))`,
//!   is strictly greater than `eps_l`.

use std::collections::BTreeMap;
use std::fmt;

use crate::dwt1d::BoundaryMode;
use crate::error::{Error, Result};
use crate::filterbank::FilterBank;
use crate::transform2d::{
    apply_mask, CoeffContainer, CoeffKey, Decomposition, Image, Levels, RectGrid, TransformKind,
};

/// Peak value used for PSNR.
pub const PSNR_PEAK: f64 = 255.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionStrategy {
    TopN { n: usize },
    TheoremThreshold { m: u32, p: f64, budget: usize },
}

impl SelectionStrategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SelectionStrategy::TopN { n: 0 } => {
                Err(Error::Config("top-N selection needs n >= 1".into()))
            }
            SelectionStrategy::TheoremThreshold { m, p, budget } => {
                if m == 0 {
                    return Err(Error::Config("M must be positive".into()));
                }
                let p_min = 1f64.max(1.0 / m as f64);
                if !(p >= p_min) {
                    return Err(Error::Config(format!("p = {p} must be >= {p_min}")));
                }
                if budget == 0 {
                    return Err(Error::Config("budget N must be positive".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionStrategy::TopN { n } => write!(f, "topn:{n}"),
            SelectionStrategy::TheoremThreshold { m, p, budget } => {
                write!(f, "theorem:M={m}:p={p}:N={budget}")
            }
        }
    }
}

/// Keeps the `n` largest `|value|`; ties are broken by position (earlier wins).
pub fn select_top_n(values: &[f64], n: usize) -> Result<Vec<bool>> {
    if n > values.len() {
        return Err(Error::SelectionOverflow {
            requested: n,
            total: values.len(),
        });
    }
    if n == 0 {
        return Err(Error::Config("top-N selection needs n >= 1".into()));
    }
    let mut mask = vec![false; values.len()];
    if n == values.len() {
        mask.fill(true);
        return Ok(mask);
    }
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let cmp = |a: &usize, b: &usize| values[*b].abs().total_cmp(&values[*a].abs()).then(a.cmp(b));
    idx.select_nth_unstable_by(n - 1, cmp);
    for &i in &idx[..n] {
        mask[i] = true;
    }
    Ok(mask)
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Discrete proxy for `|| d^{2M} f / dx^M dy^M ||_{L_p}` on the unit square:
/// `M`-th forward differences along x then y, divided by the grid steps
/// (`1/cols`, `1/rows`) to the `M`-th power, then a Riemann-weighted `L_p`
/// norm. `p = inf` gives the max norm.
pub fn estimate_mixed_norm(img: &Image, m: u32, p: f64) -> Result<f64> {
    let mm = m as usize;
    if m == 0 {
        return Err(Error::Config("M must be positive".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::Config(format!("p = {p} must be >= 1")));
    }
    if img.rows() <= mm || img.cols() <= mm {
        return Err(Error::Numeric(format!(
            "{}x{} image is too small for order-{m} differences",
            img.rows(),
            img.cols()
        )));
    }
    let weights: Vec<f64> = (0..=m)
        .map(|k| {
            let sign = if (m - k).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial(m, k)
        })
        .collect();
    let (rows, cols) = (img.rows() - mm, img.cols() - mm);
    let dx = 1.0 / img.cols() as f64;
    let dy = 1.0 / img.rows() as f64;
    let scale = (dx * dy).powi(-(m as i32));

    // differences along x
    let ddx = Image::from_fn(img.rows(), cols, |r, c| {
        weights
            .iter()
            .enumerate()
            .map(|(k, w)| w * img.get(r, c + k))
            .sum()
    });
    let mut acc = 0.0f64;
    for r in 0..rows {
        for c in 0..cols {
            let v: f64 = weights
                .iter()
                .enumerate()
                .map(|(k, w)| w * ddx.get(r + k, c))
                .sum::<f64>()
                * scale;
            if p.is_infinite() {
                acc = acc.max(v.abs());
            } else {
                acc += v.abs().powf(p);
            }
        }
    }
    if p.is_infinite() {
        Ok(acc)
    } else {
        Ok((acc * dx * dy).powf(1.0 / p))
    }
}

/// Level-dependent thresholds for [`SelectionStrategy::TheoremThreshold`].
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSchedule {
    pub l0: usize,
    /// Mixed-derivative norm estimate.
    pub d: f64,
    pub m: u32,
    pub p: f64,
    /// `N(l)`: slot count per dilation sum.
    pub populations: BTreeMap<usize, usize>,
    /// `eps_l` for every populated `l > l0`.
    pub eps: BTreeMap<usize, f64>,
    /// `sqrt(rows * cols)`: converts sample-domain coefficients to the
    /// unit-square normalization.
    pub coeff_scale: f64,
}

impl ThresholdSchedule {
    fn build(sums: &[usize], img: &Image, m: u32, p: f64, budget: usize) -> Result<Self> {
        SelectionStrategy::TheoremThreshold { m, p, budget }.validate()?;
        let mut populations = BTreeMap::new();
        for &l in sums {
            *populations.entry(l).or_insert(0usize) += 1;
        }
        let l0 = populations
            .iter()
            .filter(|(&l, &n)| (l as u128).pow(2) * n as u128 <= budget as u128)
            .map(|(&l, _)| l)
            .max()
            .unwrap_or(0);
        let d = estimate_mixed_norm(img, m, p)?;
        let a = (m as f64 + 1.0 / p) / 2.0;
        let b = (m as f64 - 1.0 / p) / 2.0;
        let eps = populations
            .keys()
            .filter(|&&l| l > l0)
            .map(|&l| {
                let l_f = l as f64;
                (l, d / 2f64.powf(l_f + a * l0 as f64 + b * l_f))
            })
            .collect();
        Ok(Self {
            l0,
            d,
            m,
            p,
            populations,
            eps,
            coeff_scale: ((img.rows() * img.cols()) as f64).sqrt(),
        })
    }

    /// Whether a coefficient `c` in a subband with dilation sum `l` survives.
    pub fn keeps(&self, c: f64, l: usize) -> bool {
        if l <= self.l0 {
            return true;
        }
        if self.d == 0.0 {
            return false;
        }
        let eps = self.eps.get(&l).copied().unwrap_or(0.0);
        let beta = c.abs() / (self.coeff_scale * 2f64.powf(l as f64 / 2.0));
        beta > eps
    }

    /// `sum_l l^2 N(l)`: budgets at or above this keep every slot.
    pub fn saturation_budget(&self) -> usize {
        self.populations.iter().map(|(&l, &n)| l * l * n).sum()
    }
}

/// Threshold schedule for a rectangular grid. `D` is estimated on the grid's
/// reconstruction.
pub fn theorem_thresholds(
    grid: &RectGrid,
    fb: &FilterBank,
    m: u32,
    p: f64,
    budget: usize,
) -> Result<ThresholdSchedule> {
    let sums = grid
        .dilation_sums()
        .expect("rect grids carry dilation sums");
    let img = grid.reconstruct(fb)?;
    ThresholdSchedule::build(&sums, &img, m, p, budget)
}

/// Result of [`apply_selection`].
#[derive(Debug, Clone)]
pub struct Selection {
    pub mask: Vec<bool>,
    pub kept: usize,
    pub total: usize,
    pub schedule: Option<ThresholdSchedule>,
}

/// Selects coefficients and zeroes the rest. Kept values are never altered.
pub fn apply_selection<C: CoeffContainer>(
    container: &C,
    strategy: &SelectionStrategy,
    fb: &FilterBank,
) -> Result<(C, Selection)> {
    strategy.validate()?;
    let values = container.values();
    let total = values.len();
    let (mask, schedule) = match *strategy {
        SelectionStrategy::TopN { n } => (select_top_n(&values, n)?, None),
        SelectionStrategy::TheoremThreshold { m, p, budget } => {
            let sums = container.dilation_sums().ok_or_else(|| {
                Error::Unsupported("threshold selection needs a rectangular grid".into())
            })?;
            let img = container.reconstruct(fb)?;
            let schedule = ThresholdSchedule::build(&sums, &img, m, p, budget)?;
            let keys = container.keys();
            let mask = values
                .iter()
                .zip(&sums)
                .zip(&keys)
                .map(|((&c, &l), key)| {
                    matches!(key, CoeffKey::Rect { sx: 0, sy: 0, .. }) || schedule.keeps(c, l)
                })
                .collect();
            (mask, Some(schedule))
        }
    };
    let kept = mask.iter().filter(|&&k| k).count();
    let masked = apply_mask(container, &mask)?;
    Ok((
        masked,
        Selection {
            mask,
            kept,
            total,
            schedule,
        },
    ))
}

/// Error metrics of one compression run.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionReport {
    pub image: String,
    pub bank: String,
    pub transform: String,
    pub strategy: String,
    pub kept: usize,
    pub total: usize,
    /// `total / kept`
    pub ratio: f64,
    /// `+inf` when the reconstruction is exact.
    pub psnr: f64,
    /// Euclidean norm of the pixel error.
    pub l2_error: f64,
    pub linf_error: f64,
}

impl CompressionReport {
    pub fn csv_header() -> &'static str {
        "image,bank,transform,strategy,kept,total,ratio,psnr_db,l2,linf"
    }

    pub fn to_csv_row(&self) -> String {
        let psnr = if self.psnr.is_infinite() {
            "inf".to_string()
        } else {
            format!("{:.4}", self.psnr)
        };
        format!(
            "{},{},{},{},{},{},{:.4},{},{:.6},{:.6}",
            self.image,
            self.bank,
            self.transform,
            self.strategy,
            self.kept,
            self.total,
            self.ratio,
            psnr,
            self.l2_error,
            self.linf_error
        )
    }

    pub fn with_labels(
        mut self,
        image: impl Into<String>,
        bank: impl Into<String>,
        transform: impl Into<String>,
        strategy: impl Into<String>,
    ) -> Self {
        self.image = image.into();
        self.bank = bank.into();
        self.transform = transform.into();
        self.strategy = strategy.into();
        self
    }
}

/// Error metrics between `original` and `reconstructed`. Pixels are not
/// clamped; PSNR uses a peak of 255.
pub fn compress_report(
    original: &Image,
    reconstructed: &Image,
    kept: usize,
    total: usize,
) -> Result<CompressionReport> {
    if !original.same_shape(reconstructed) {
        return Err(Error::DimensionMismatch(format!(
            "original is {}x{}, reconstruction is {}x{}",
            original.rows(),
            original.cols(),
            reconstructed.rows(),
            reconstructed.cols()
        )));
    }
    if kept == 0 || kept > total {
        return Err(Error::Numeric(format!("kept = {kept} outside 1..={total}")));
    }
    let mut sq = 0.0;
    let mut linf = 0.0f64;
    for (a, b) in original.data().iter().zip(reconstructed.data()) {
        let e = a - b;
        sq += e * e;
        linf = linf.max(e.abs());
    }
    let mse = sq / original.len() as f64;
    let psnr = if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PSNR_PEAK * PSNR_PEAK / mse).log10()
    };
    Ok(CompressionReport {
        image: String::new(),
        bank: String::new(),
        transform: String::new(),
        strategy: String::new(),
        kept,
        total,
        ratio: total as f64 / kept as f64,
        psnr,
        l2_error: sq.sqrt(),
        linf_error: linf,
    })
}

/// Output of [`compress`].
#[derive(Debug, Clone)]
pub struct Compressed {
    pub reconstructed: Image,
    pub report: CompressionReport,
    pub selection: Selection,
}

/// Transform, select, reconstruct and report in one call.
pub fn compress(
    img: &Image,
    fb: &FilterBank,
    kind: TransformKind,
    levels: Levels,
    boundary: BoundaryMode,
    strategy: &SelectionStrategy,
) -> Result<Compressed> {
    let dec = Decomposition::forward(img, fb, kind, levels, boundary)?;
    compress_decomposition(img, &dec, fb, strategy)
}

/// [`compress`] for an existing decomposition of `img`.
pub fn compress_decomposition(
    img: &Image,
    dec: &Decomposition,
    fb: &FilterBank,
    strategy: &SelectionStrategy,
) -> Result<Compressed> {
    let (masked, selection) = apply_selection(dec, strategy, fb)?;
    // keeping every slot is the identity; skip the round trip so the
    // report is exact rather than rounding-limited
    let reconstructed = if selection.kept == selection.total
        && img.rows() == dec.rows()
        && img.cols() == dec.cols()
    {
        img.clone()
    } else {
        masked.reconstruct(fb)?
    };
    let report = compress_report(img, &reconstructed, selection.kept, selection.total)?
        .with_labels("", &fb.name, dec.kind().to_string(), strategy.to_string());
    Ok(Compressed {
        reconstructed,
        report,
        selection,
    })
}

/// `N = round(total / ratio)`, at least 1.
pub fn budget_for_ratio(total: usize, ratio: f64) -> Result<usize> {
    if !(ratio >= 1.0) || !ratio.is_finite() {
        return Err(Error::Config(format!("ratio {ratio} must be >= 1")));
    }
    Ok(((total as f64 / ratio).round() as usize).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filterbank::builtin;
    use crate::transform2d::rect_forward;
    use std::f64::consts::PI;

    fn sample(n: usize, f: impl Fn(f64, f64) -> f64) -> Image {
        Image::from_fn(n, n, |r, c| {
            f((c as f64 + 0.5) / n as f64, (r as f64 + 0.5) / n as f64)
        })
    }

    #[test]
    fn top_n_magnitude_order() {
        let mask = select_top_n(&[3.0, -5.0, 2.0, 0.0], 2).unwrap();
        assert_eq!(mask, vec![true, true, false, false]);
    }

    #[test]
    fn top_n_ties_prefer_earlier() {
        let mask = select_top_n(&[1.0, -1.0, 1.0], 2).unwrap();
        assert_eq!(mask, vec![true, true, false]);
    }

    #[test]
    fn top_n_bounds() {
        assert_eq!(select_top_n(&[1.0, 2.0], 2).unwrap(), vec![true, true]);
        assert!(matches!(
            select_top_n(&[1.0, 2.0], 3),
            Err(Error::SelectionOverflow {
                requested: 3,
                total: 2
            })
        ));
    }

    #[test]
    fn psnr_values() {
        let a = Image::zeros(4, 4);
        let r = compress_report(&a, &a, 16, 16).unwrap();
        assert!(r.psnr.is_infinite() && r.l2_error == 0.0);
        let b = Image::filled(4, 4, 1.0);
        let r = compress_report(&a, &b, 4, 16).unwrap();
        assert!((r.psnr - 48.1308).abs() < 1e-3);
        assert_eq!(r.ratio, 4.0);
        let b = Image::filled(4, 4, 255.0);
        let r = compress_report(&a, &b, 4, 16).unwrap();
        assert!(r.psnr.abs() < 1e-12);
        assert!(compress_report(&a, &Image::zeros(2, 2), 1, 4).is_err());
    }

    #[test]
    fn mixed_norm_constant_and_bilinear() {
        assert_eq!(
            estimate_mixed_norm(&Image::filled(16, 16, 7.0), 1, 2.0).unwrap(),
            0.0
        );
        let d = estimate_mixed_norm(&sample(256, |x, y| x * y), 1, 2.0).unwrap();
        assert!((d - 1.0).abs() < 0.02, "{d}");
    }

    #[test]
    fn mixed_norm_sin_sin() {
        let img = sample(256, |x, y| (2.0 * PI * x).sin() * (2.0 * PI * y).sin());
        let d = estimate_mixed_norm(&img, 1, 2.0).unwrap();
        let want = 2.0 * PI * PI;
        assert!((d - want).abs() / want < 0.02, "{d} vs {want}");
    }

    #[test]
    fn mixed_norm_too_small() {
        assert!(estimate_mixed_norm(&Image::zeros(2, 2), 2, 2.0).is_err());
    }

    #[test]
    fn large_budget_keeps_everything() {
        let fb = builtin("haar").unwrap();
        let img = sample(16, |x, y| (x * 3.0).sin() + y * y);
        let grid = rect_forward(&img, &fb, 4, 4, BoundaryMode::Periodic).unwrap();
        let s = theorem_thresholds(&grid, &fb, 1, 2.0, usize::MAX / 2).unwrap();
        assert_eq!(s.l0, *s.populations.keys().max().unwrap());
        assert!(s.eps.is_empty());
        let strat = SelectionStrategy::TheoremThreshold {
            m: 1,
            p: 2.0,
            budget: s.saturation_budget(),
        };
        let (masked, sel) = apply_selection(&grid, &strat, &fb).unwrap();
        assert_eq!(sel.kept, sel.total);
        assert_eq!(masked, grid);
    }

    #[test]
    fn constant_image_theorem_is_exact() {
        let fb = builtin("haar").unwrap();
        let img = Image::filled(32, 32, 100.0);
        let grid = rect_forward(&img, &fb, 5, 5, BoundaryMode::Periodic).unwrap();
        let strat = SelectionStrategy::TheoremThreshold {
            m: 1,
            p: 2.0,
            budget: 50,
        };
        let (masked, sel) = apply_selection(&grid, &strat, &fb).unwrap();
        let sched = sel.schedule.unwrap();
        assert_eq!(sched.d, 0.0);
        let sums = grid.dilation_sums().unwrap();
        let want = sums.iter().filter(|&&l| l <= sched.l0).count();
        assert_eq!(sel.kept, want);
        let back = masked.reconstruct(&fb).unwrap();
        assert!(back.max_abs_diff(&img) < 1e-9);
    }

    #[test]
    fn theorem_rejects_square() {
        let fb = builtin("haar").unwrap();
        let img = Image::filled(8, 8, 1.0);
        let dec = Decomposition::forward(
            &img,
            &fb,
            TransformKind::Square,
            Levels::uniform(2),
            BoundaryMode::Periodic,
        )
        .unwrap();
        let strat = SelectionStrategy::TheoremThreshold {
            m: 1,
            p: 2.0,
            budget: 10,
        };
        assert!(matches!(
            apply_selection(&dec, &strat, &fb),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn strategy_validation() {
        assert!(SelectionStrategy::TheoremThreshold {
            m: 1,
            p: 0.5,
            budget: 1
        }
        .validate()
        .is_err());
        assert!(SelectionStrategy::TheoremThreshold {
            m: 2,
            p: 1.0,
            budget: 1
        }
        .validate()
        .is_ok());
        assert!(SelectionStrategy::TopN { n: 0 }.validate().is_err());
    }

    #[test]
    fn ratio_budget() {
        assert_eq!(budget_for_ratio(262_144, 160.0).unwrap(), 1638);
        assert_eq!(budget_for_ratio(262_144, 80.0).unwrap(), 3277);
        assert_eq!(budget_for_ratio(100, 1.0).unwrap(), 100);
        assert!(budget_for_ratio(100, 0.5).is_err());
    }
}
