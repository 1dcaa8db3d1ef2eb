//! Haar coefficients of polynomials by direct quadrature and by integration
//! by parts, and the decay ratio under dilation.
//!
//! cargo run --example haar_oracle

use rectwave::ratelab::{coefficient_bound_check, coefficient_identity_check, Polynomial};

fn main() -> rectwave::error::Result<()> {
    for k in 0..=3 {
        let f = Polynomial::monomial(k);
        for sigma in [1.0, 2.0, 4.0] {
            for theta in [0.0, 0.5] {
                let r = coefficient_identity_check(&f, sigma, theta, 1e-5)?;
                println!(
                    "x^{k} sigma={sigma} theta={theta}: lhs {:+.10} rhs {:+.10} residual {:.1e}",
                    r.lhs, r.rhs, r.residual
                );
            }
        }
    }

    let sigmas: Vec<f64> = (0..=8).map(|k| 2f64.powi(k)).collect();
    let linear = coefficient_bound_check(|x| x, |_| 1.0, &sigmas, 0.0, 2.0)?;
    let sine = coefficient_bound_check(f64::sin, f64::cos, &sigmas, 0.0, 2.0)?;
    println!("\nsigma     f=x       f=sin x");
    for (a, b) in linear.ratios.iter().zip(&sine.ratios) {
        println!("{:<8} {:.6}  {:.6}", a.0, a.1, b.1);
    }
    println!("spread   {:.6}  {:.6}", linear.spread(), sine.spread());
    Ok(())
}
