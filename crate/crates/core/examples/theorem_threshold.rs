//! Level-dependent thresholding of the rectangular transform next to plain
//! top-N selection with the same number of kept coefficients.
//!
//! cargo run --example theorem_threshold

use rectwave::approx::{apply_selection, compress_report, SelectionStrategy};
use rectwave::dwt1d::BoundaryMode;
use rectwave::filterbank::builtin;
use rectwave::ratelab::{sample_function, TestFunction};
use rectwave::transform2d::{rect_forward, CoeffContainer};

fn main() -> rectwave::error::Result<()> {
    let fb = builtin("haar")?;
    let img = sample_function(TestFunction::TensorSmooth, 64);
    let grid = rect_forward(&img, &fb, 6, 6, BoundaryMode::Periodic)?;

    for budget in [100, 300, 500, 2000, 8000] {
        let strategy = SelectionStrategy::TheoremThreshold {
            m: 1,
            p: 2.0,
            budget,
        };
        let (kept_grid, sel) = apply_selection(&grid, &strategy, &fb)?;
        let sched = sel.schedule.as_ref().unwrap();
        let thr = compress_report(&img, &kept_grid.reconstruct(&fb)?, sel.kept, sel.total)?;

        let top = SelectionStrategy::TopN { n: sel.kept };
        let (top_grid, _) = apply_selection(&grid, &top, &fb)?;
        let best = compress_report(&img, &top_grid.reconstruct(&fb)?, sel.kept, sel.total)?;

        println!(
            "N={budget:<5} l0={} D={:.3} kept={:<5} error {:.4e} (top-N {:.4e}, x{:.2})",
            sched.l0,
            sched.d,
            sel.kept,
            thr.l2_error,
            best.l2_error,
            thr.l2_error / best.l2_error
        );
    }
    Ok(())
}
