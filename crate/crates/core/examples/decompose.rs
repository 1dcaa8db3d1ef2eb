//! Decompose one image with both transforms and write the composite views.
//!
//! cargo run --example decompose [image.pgm] [out_dir]

use std::path::PathBuf;

use rectwave::dwt1d::BoundaryMode;
use rectwave::filterbank::builtin;
use rectwave::imageio::{axis_edges_fixture, read_pgm_file, render_composite, write_pgm_file};
use rectwave::transform2d::{CoeffContainer, Decomposition, Levels, TransformKind};

fn main() -> rectwave::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let img = match args.next() {
        Some(path) => read_pgm_file(path)?,
        None => axis_edges_fixture(256),
    };
    let out_dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let fb = builtin("haar")?;
    let levels = Levels::default_for(img.rows(), img.cols());

    for kind in [TransformKind::Square, TransformKind::Rect] {
        let dec = Decomposition::forward(&img, &fb, kind, levels, BoundaryMode::Periodic)?;
        let path = out_dir.join(format!("composite_{kind}.pgm"));
        write_pgm_file(&path, &render_composite(&dec))?;

        let back = dec.reconstruct(&fb)?;
        println!(
            "{kind:<6} J={} energy {:.3e} / {:.3e}  round trip {:.1e}  -> {}",
            levels,
            img.energy(),
            dec.values().iter().map(|v| v * v).sum::<f64>(),
            back.max_abs_diff(&img),
            path.display()
        );
    }
    Ok(())
}
