//! Keep 1/80 and 1/160 of the coefficients and compare the two transforms.
//!
//! cargo run --release --example compress [image.pgm]

use rectwave::approx::{budget_for_ratio, compress, CompressionReport, SelectionStrategy};
use rectwave::dwt1d::BoundaryMode;
use rectwave::filterbank::builtin;
use rectwave::imageio::{axis_edges_fixture, read_pgm_file};
use rectwave::transform2d::{Levels, TransformKind};

fn main() -> rectwave::error::Result<()> {
    let (label, img) = match std::env::args().nth(1) {
        Some(path) => (path.clone(), read_pgm_file(&path)?),
        None => ("axis_edges_512".to_string(), axis_edges_fixture(512)),
    };
    let levels = Levels::default_for(img.rows(), img.cols());

    println!("{}", CompressionReport::csv_header());
    for bank in ["d4", "crf137"] {
        let fb = builtin(bank)?;
        for ratio in [80.0, 160.0] {
            let n = budget_for_ratio(img.len(), ratio)?;
            for kind in [TransformKind::Square, TransformKind::Rect] {
                let c = compress(
                    &img,
                    &fb,
                    kind,
                    levels,
                    BoundaryMode::Periodic,
                    &SelectionStrategy::TopN { n },
                )?;
                let report = CompressionReport {
                    image: label.clone(),
                    ..c.report
                };
                println!("{}", report.to_csv_row());
            }
        }
    }
    Ok(())
}
