//! One-dimensional Haar coefficient oracles.
//!
//! With `psi` the Haar wavelet on `[0, 1)` (`+1` then `-1`) and `Psi_1` its
//! antiderivative (the hat function on `[0, 1]`), integration by parts gives
//!
//! ```text
//! <f, psi(s x - t)> = -(1/s) * integral f'(x) Psi_1(s x - t) dx
//! ```
//!
//! Both sides are evaluated by composite Simpson quadrature split at the
//! kinks of `psi`, so polynomial integrands up to degree 3 are exact up to
//! rounding.

use crate::error::{Error, Result};

/// Real polynomial with coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Polynomial(c)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.0.len() <= 1 {
            return Polynomial(vec![0.0]);
        }
        Polynomial(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }
}

/// Haar wavelet: `1` on `[0, 1/2)`, `-1` on `[1/2, 1)`, `0` elsewhere.
pub fn haar_psi(x: f64) -> f64 {
    if (0.0..0.5).contains(&x) {
        1.0
    } else if (0.5..1.0).contains(&x) {
        -1.0
    } else {
        0.0
    }
}

/// `Psi_m(x) = integral_{-inf}^x t^(m-1) psi(t) dt` for the Haar wavelet.
/// Only `m = 1` has a closed form here.
pub fn haar_psi_antiderivative(m: u32, x: f64) -> Result<f64> {
    if m != 1 {
        return Err(Error::Unsupported(format!(
            "Haar antiderivative of order {m} (only 1 is available)"
        )));
    }
    Ok(if (0.0..=0.5).contains(&x) {
        x
    } else if x > 0.5 && x <= 1.0 {
        1.0 - x
    } else {
        0.0
    })
}

/// Composite Simpson rule on `[a, b]` with panel width at most `step`.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, step: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut n = ((b - a) / step).ceil() as usize;
    n = n.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Both sides of the integration-by-parts identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

fn support(sigma: f64, theta: f64) -> (f64, f64, f64) {
    (theta / sigma, (theta + 0.5) / sigma, (theta + 1.0) / sigma)
}

/// Evaluates `<f, psi(s x - t)>` directly and through `-(1/s) <f', Psi_1(s x - t)>`.
pub fn coefficient_identity_check(
    f: &Polynomial,
    sigma: f64,
    theta: f64,
    step: f64,
) -> Result<IdentityCheck> {
    if !(sigma > 0.0) || !(step > 0.0) {
        return Err(Error::Config("sigma and step must be positive".into()));
    }
    let (a, m, b) = support(sigma, theta);
    let lhs = simpson(|x| f.eval(x), a, m, step) - simpson(|x| f.eval(x), m, b, step);
    let df = f.derivative();
    let g = |x: f64| df.eval(x) * haar_psi_antiderivative(1, sigma * x - theta).unwrap();
    let rhs = -(simpson(g, a, m, step) + simpson(g, m, b, step)) / sigma;
    Ok(IdentityCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

/// Ratios `|<f, psi(s x - t)>| * s^(2 - 1/p) / ||f'||_{L_p(window)}` over a
/// dilation sweep, with the window `[t/s, (t+1)/s]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSweep {
    /// `(sigma, ratio)`
    pub ratios: Vec<(f64, f64)>,
    pub max: f64,
    pub min: f64,
}

impl BoundSweep {
    /// `max / min`
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }
}

/// Haar (one vanishing moment) coefficient-decay check. `f` and its
/// derivative `df` are sampled by quadrature with `step` relative to the
/// window length.
pub fn coefficient_bound_check(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    sigmas: &[f64],
    theta: f64,
    p: f64,
) -> Result<BoundSweep> {
    if !(p >= 1.0) || p.is_infinite() {
        return Err(Error::Config(format!("p = {p} must be finite and >= 1")));
    }
    if sigmas.is_empty() {
        return Err(Error::Config("empty sigma sweep".into()));
    }
    let mut ratios = Vec::with_capacity(sigmas.len());
    for &s in sigmas {
        if !(s > 0.0) {
            return Err(Error::Config(format!("sigma {s} must be positive")));
        }
        let (a, m, b) = support(s, theta);
        let step = (b - a) * 1e-4;
        let coef = simpson(&f, a, m, step) - simpson(&f, m, b, step);
        let norm = (simpson(|x| df(x).abs().powf(p), a, b, step)).powf(1.0 / p);
        if !(norm > 0.0) {
            return Err(Error::Numeric(format!(
                "derivative vanishes on the window at sigma = {s}"
            )));
        }
        ratios.push((s, coef.abs() * s.powf(2.0 - 1.0 / p) / norm));
    }
    let max = ratios.iter().map(|r| r.1).fold(f64::MIN, f64::max);
    let min = ratios.iter().map(|r| r.1).fold(f64::MAX, f64::min);
    Ok(BoundSweep { ratios, max, min })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hat_values() {
        assert_eq!(haar_psi_antiderivative(1, 0.5).unwrap(), 0.5);
        assert_eq!(haar_psi_antiderivative(1, 1.0).unwrap(), 0.0);
        assert_eq!(haar_psi_antiderivative(1, 0.25).unwrap(), 0.25);
        assert_eq!(haar_psi_antiderivative(1, -0.1).unwrap(), 0.0);
        assert!(haar_psi_antiderivative(2, 0.3).is_err());
    }

    #[test]
    fn hat_is_running_integral_of_psi() {
        for x in [0.1f64, 0.3, 0.5, 0.7, 0.95] {
            // psi is constant on each half; evaluate it at interior points only
            let direct = simpson(|_| haar_psi(0.25), 0.0, x.min(0.5), 1e-4)
                + simpson(|_| haar_psi(0.75), 0.5, x.max(0.5), 1e-4);
            assert!((direct - haar_psi_antiderivative(1, x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_identity() {
        let r = coefficient_identity_check(&Polynomial::monomial(1), 1.0, 0.0, 1e-3).unwrap();
        assert!((r.lhs + 0.25).abs() < 1e-12);
        assert!((r.rhs + 0.25).abs() < 1e-12);
        let r = coefficient_identity_check(&Polynomial::monomial(1), 2.0, 0.0, 1e-3).unwrap();
        assert!((r.lhs + 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn constant_identity() {
        let r = coefficient_identity_check(&Polynomial(vec![3.0]), 4.0, 0.5, 1e-3).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12);
    }

    #[test]
    fn derivative_and_eval() {
        let p = Polynomial(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(p.derivative(), Polynomial(vec![2.0, 6.0]));
    }

    #[test]
    fn linear_ratio_is_quarter() {
        let sigmas: Vec<f64> = (0..=8).map(|k| 2f64.powi(k)).collect();
        let s = coefficient_bound_check(|x| x, |_| 1.0, &sigmas, 0.0, 2.0).unwrap();
        for &(_, r) in &s.ratios {
            assert!((r - 0.25).abs() < 1e-9, "{r}");
        }
    }

    #[test]
    fn constant_is_error() {
        assert!(coefficient_bound_check(|_| 1.0, |_| 0.0, &[1.0], 0.0, 2.0).is_err());
    }
}
