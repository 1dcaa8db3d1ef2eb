//! Biorthogonal filter banks.
//!
//! Taps are stored in the two-scale convention `phi(x) = sum_i h_i phi(2x - i)`,
//! so the Haar low-pass is `(1, 1)` and every low-pass filter sums to 2. The
//! transform kernels in [`crate::dwt1d`] apply a `1/sqrt(2)` factor on both the
//! analysis and the synthesis side, which makes orthogonal banks
//! energy-preserving. Relative to the unnormalized recursion (a bare `1/2` on
//! synthesis only) this rescales the level-`l` coefficients by `2^(l/2)`.
//!
//! The four sequences are
//!
//! * `h`      - synthesis low-pass (scaling function `phi`)
//! * `h_dual` - analysis low-pass (dual scaling function)
//! * `g`      - synthesis high-pass (wavelet `psi`)
//! * `g_dual` - analysis high-pass (dual wavelet); its discrete moments
//!   determine how many polynomial degrees the detail channel annihilates.

use std::fmt::Write as _;

use crate::dwt1d::{analysis_step, synthesis_step, BoundaryMode};
use crate::error::{Error, Result};

const CRF137_SPEC: &str = include_str!("../filters/crf137.filter");

/// Tolerance used when a bank is validated at construction time.
pub const BUILTIN_TOL: f64 = 1e-10;

/// Tolerance for the discrete moment sums.
pub const MOMENT_TOL: f64 = 1e-8;

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["haar", "d4", "crf137"];

/// A finite tap sequence; `coeffs[k]` is the tap at index `offset + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Taps {
    pub offset: i32,
    pub coeffs: Vec<f64>,
}

impl Taps {
    pub fn new(offset: i32, coeffs: Vec<f64>) -> Self {
        Self { offset, coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Tap value at absolute index `j` (zero outside the support).
    pub fn at(&self, j: i64) -> f64 {
        let k = j - self.offset as i64;
        if k < 0 || k >= self.coeffs.len() as i64 {
            0.0
        } else {
            self.coeffs[k as usize]
        }
    }

    /// Iterator over `(absolute index, tap)`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(k, &c)| (self.offset as i64 + k as i64, c))
    }

    /// `sum_j c_j * j^k`, evaluated in index order.
    pub fn moment(&self, k: u32) -> f64 {
        self.iter()
            .map(|(j, c)| c * (j as f64).powi(k as i32))
            .sum()
    }

    /// True when the taps have odd length and are mirror-symmetric about `center`.
    fn odd_symmetric_about(&self, center: i64) -> bool {
        if self.coeffs.len().is_multiple_of(2) {
            return false;
        }
        let half = (self.coeffs.len() / 2) as i64;
        if self.offset as i64 + half != center {
            return false;
        }
        (1..=half).all(|d| self.at(center - d) == self.at(center + d))
    }
}

/// A biorthogonal filter bank. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub name: String,
    pub h: Taps,
    pub h_dual: Taps,
    pub g: Taps,
    pub g_dual: Taps,
    /// Vanishing moments of `psi`.
    pub m_vanishing: u32,
    /// Vanishing moments of the dual wavelet (`M` in the approximation rates).
    pub m_dual_vanishing: u32,
}

impl FilterBank {
    /// Builds a bank and runs the full validation (nonempty taps, impulse
    /// round trip at [`BUILTIN_TOL`], declared moments against the taps).
    pub fn new(
        name: impl Into<String>,
        h: Taps,
        h_dual: Taps,
        g: Taps,
        g_dual: Taps,
        m_vanishing: u32,
        m_dual_vanishing: u32,
    ) -> Result<Self> {
        let fb = Self {
            name: name.into(),
            h,
            h_dual,
            g,
            g_dual,
            m_vanishing,
            m_dual_vanishing,
        };
        fb.check()?;
        Ok(fb)
    }

    fn check(&self) -> Result<()> {
        for (label, taps) in self.named_taps() {
            if taps.is_empty() {
                return Err(Error::Validation {
                    bank: self.name.clone(),
                    condition: format!("tap sequence `{label}` is empty"),
                });
            }
            if taps.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::Validation {
                    bank: self.name.clone(),
                    condition: format!("tap sequence `{label}` has a non-finite entry"),
                });
            }
        }
        let report = validate_biorthogonality(self, BUILTIN_TOL);
        if !report.passed {
            return Err(Error::Validation {
                bank: self.name.clone(),
                condition: format!(
                    "impulse round trip deviates by {:e} (> {:e}); biorthogonality fails",
                    report.max_deviation, BUILTIN_TOL
                ),
            });
        }
        let dual = discrete_vanishing_moments(self, MOMENT_TOL);
        if dual != self.m_dual_vanishing {
            return Err(Error::MomentMismatch {
                bank: self.name.clone(),
                which: "dual vanishing moments",
                declared: self.m_dual_vanishing,
                measured: dual,
            });
        }
        let primal = primal_vanishing_moments(self, MOMENT_TOL);
        if primal != self.m_vanishing {
            return Err(Error::MomentMismatch {
                bank: self.name.clone(),
                which: "vanishing moments",
                declared: self.m_vanishing,
                measured: primal,
            });
        }
        Ok(())
    }

    fn named_taps(&self) -> [(&'static str, &Taps); 4] {
        [
            ("h", &self.h),
            ("h_dual", &self.h_dual),
            ("g", &self.g),
            ("g_dual", &self.g_dual),
        ]
    }

    pub fn max_len(&self) -> usize {
        self.named_taps()
            .iter()
            .map(|(_, t)| t.len())
            .max()
            .unwrap_or(0)
    }

    /// Whether whole-point symmetric extension reconstructs perfectly with
    /// this bank: low-pass filters odd and symmetric about 0, high-pass
    /// filters odd and symmetric about 1.
    pub fn supports_symmetric(&self) -> bool {
        self.h.odd_symmetric_about(0)
            && self.h_dual.odd_symmetric_about(0)
            && self.g.odd_symmetric_about(1)
            && self.g_dual.odd_symmetric_about(1)
    }

    /// Orthogonal banks have identical analysis and synthesis taps.
    pub fn is_orthogonal(&self) -> bool {
        self.h == self.h_dual && self.g == self.g_dual
    }

    /// Serializes to the plain-text filter spec format accepted by
    /// [`load_filter_spec`]. Decimals use the shortest representation that
    /// parses back to the same `f64`.
    pub fn to_filter_spec(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "bank {}", self.name);
        for (label, taps) in self.named_taps() {
            let _ = write!(out, "{label} {}", taps.offset);
            for c in &taps.coeffs {
                let _ = write!(out, " {c:?}");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "moments {} {}",
            self.m_vanishing, self.m_dual_vanishing
        );
        out
    }
}

/// Returns one of the bundled banks: `haar`, `d4` or `crf137`.
pub fn builtin(name: &str) -> Result<FilterBank> {
    match name {
        "haar" => FilterBank::new(
            "haar",
            Taps::new(0, vec![1.0, 1.0]),
            Taps::new(0, vec![1.0, 1.0]),
            Taps::new(0, vec![1.0, -1.0]),
            Taps::new(0, vec![1.0, -1.0]),
            1,
            1,
        ),
        "d4" => {
            let s3 = 3f64.sqrt();
            let h = vec![
                (1.0 + s3) / 4.0,
                (3.0 + s3) / 4.0,
                (3.0 - s3) / 4.0,
                (1.0 - s3) / 4.0,
            ];
            // g_j = (-1)^j h_{3-j}
            let g = vec![h[3], -h[2], h[1], -h[0]];
            FilterBank::new(
                "d4",
                Taps::new(0, h.clone()),
                Taps::new(0, h),
                Taps::new(0, g.clone()),
                Taps::new(0, g),
                2,
                2,
            )
        }
        "crf137" => load_filter_spec(CRF137_SPEC),
        other => Err(Error::UnknownBank(other.to_string())),
    }
}

/// Parses a filter spec document:
///
/// ```text
/// bank <name>
/// h|h_dual|g|g_dual <start_offset> <c0> <c1> ...
/// moments <M> <M_dual>
/// ```
///
/// Tokens are whitespace separated and `#` starts a comment. The result is
/// fully validated, including the declared moments.
pub fn load_filter_spec(text: &str) -> Result<FilterBank> {
    let mut name: Option<String> = None;
    let mut taps: [Option<Taps>; 4] = [None, None, None, None];
    let mut moments: Option<(u32, u32)> = None;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        let Some(key) = tokens.next() else { continue };
        let rest: Vec<&str> = tokens.collect();
        let perr = |msg: String| Error::Parse { line, msg };

        match key {
            "bank" => {
                if name.is_some() {
                    return Err(perr("duplicate `bank` line".into()));
                }
                match rest.as_slice() {
                    [n] => name = Some((*n).to_string()),
                    _ => return Err(perr("`bank` takes exactly one name".into())),
                }
            }
            "h" | "h_dual" | "g" | "g_dual" => {
                let slot = match key {
                    "h" => 0,
                    "h_dual" => 1,
                    "g" => 2,
                    _ => 3,
                };
                if taps[slot].is_some() {
                    return Err(perr(format!("duplicate `{key}` line")));
                }
                let Some((off, coeffs)) = rest.split_first() else {
                    return Err(perr(format!("`{key}` is missing its start offset")));
                };
                let offset: i32 = off
                    .parse()
                    .map_err(|_| perr(format!("bad start offset `{off}`")))?;
                if coeffs.is_empty() {
                    return Err(perr(format!("`{key}` has no coefficients")));
                }
                let coeffs = coeffs
                    .iter()
                    .map(|t| {
                        t.parse::<f64>()
                            .ok()
                            .filter(|v| v.is_finite())
                            .ok_or_else(|| perr(format!("bad coefficient `{t}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                taps[slot] = Some(Taps::new(offset, coeffs));
            }
            "moments" => {
                if moments.is_some() {
                    return Err(perr("duplicate `moments` line".into()));
                }
                match rest.as_slice() {
                    [m, md] => {
                        let m = m
                            .parse()
                            .map_err(|_| perr(format!("bad moment count `{m}`")))?;
                        let md = md
                            .parse()
                            .map_err(|_| perr(format!("bad moment count `{md}`")))?;
                        moments = Some((m, md));
                    }
                    _ => return Err(perr("`moments` takes two integers".into())),
                }
            }
            other => return Err(perr(format!("unknown keyword `{other}`"))),
        }
    }

    let missing = |what: &str| Error::Parse {
        line: last_line,
        msg: format!("missing `{what}` line"),
    };
    let name = name.ok_or_else(|| missing("bank"))?;
    let [h, h_dual, g, g_dual] = taps;
    let h = h.ok_or_else(|| missing("h"))?;
    let h_dual = h_dual.ok_or_else(|| missing("h_dual"))?;
    let g = g.ok_or_else(|| missing("g"))?;
    let g_dual = g_dual.ok_or_else(|| missing("g_dual"))?;
    let (m, md) = moments.ok_or_else(|| missing("moments"))?;
    FilterBank::new(name, h, h_dual, g, g_dual, m, md)
}

/// Outcome of [`validate_biorthogonality`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub bank: String,
    pub signal_len: usize,
    pub max_deviation: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Sends every unit impulse of a periodic signal of length
/// `4 * max filter length` through one analysis and one synthesis step and
/// reports the largest deviation from the identity.
pub fn validate_biorthogonality(fb: &FilterBank, tol: f64) -> ValidationReport {
    let len = (4 * fb.max_len()).max(2);
    let len = len + len % 2;
    let mut max_dev = 0.0f64;
    let mut impulse = vec![0.0; len];
    for k in 0..len {
        impulse.fill(0.0);
        impulse[k] = 1.0;
        let dev = match analysis_step(&impulse, fb, BoundaryMode::Periodic)
            .and_then(|(a, d)| synthesis_step(&a, &d, fb, BoundaryMode::Periodic))
        {
            Ok(back) => back
                .iter()
                .zip(&impulse)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        };
        // NaN must fail the check
        if !(dev <= max_dev) {
            max_dev = if dev.is_nan() { f64::INFINITY } else { dev };
        }
    }
    ValidationReport {
        bank: fb.name.clone(),
        signal_len: len,
        max_deviation: max_dev,
        tol,
        passed: max_dev <= tol,
    }
}

fn leading_zero_moments(taps: &Taps, tol: f64) -> u32 {
    let cap = taps.len() as u32;
    (0..cap)
        .take_while(|&k| taps.moment(k).abs() <= tol)
        .count() as u32
}

/// Largest `M` with `|sum_j g_dual_j j^k| <= tol` for all `k < M`, capped at
/// the filter length.
pub fn discrete_vanishing_moments(fb: &FilterBank, tol: f64) -> u32 {
    leading_zero_moments(&fb.g_dual, tol)
}

/// Same scan on the synthesis high-pass `g` (vanishing moments of `psi`).
pub fn primal_vanishing_moments(fb: &FilterBank, tol: f64) -> u32 {
    leading_zero_moments(&fb.g, tol)
}
