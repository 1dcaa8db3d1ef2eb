//! Best-N error curves for every test function, with fitted slopes.
//!
//! cargo run --release --example rate_study

use rectwave::filterbank::builtin;
use rectwave::ratelab::{
    default_fit_range, dyadic_budgets, fit_loglog_slope, rate_curve, sample_function, TestFunction,
};
use rectwave::transform2d::{Levels, TransformKind};

fn main() -> rectwave::error::Result<()> {
    let n = 256;
    let budgets = dyadic_budgets(8, 14);
    for bank in ["haar", "d4"] {
        let fb = builtin(bank)?;
        for f in TestFunction::ALL {
            let img = sample_function(f, n);
            let mut line = format!("{bank:<5} {:<16}", f.tag());
            for kind in [TransformKind::Square, TransformKind::Rect] {
                let curve = rate_curve(&img, kind, &fb, Levels::default_for(n, n), &budgets, 2.0)?;
                let range = default_fit_range(curve.points.len());
                // curves that reach rounding level have no meaningful slope
                let floor = curve.points[range.clone()].iter().any(|p| p.1 < 1e-10);
                match fit_loglog_slope(&curve, range) {
                    Ok(s) if !floor => line += &format!("  {kind} slope {s:+.3}"),
                    _ => line += &format!("  {kind} slope  exact"),
                }
                let last = curve.points.last().unwrap();
                line += &format!(" (err@{} {:.2e})", last.0, last.1);
            }
            println!("{line}");
        }
    }
    Ok(())
}
