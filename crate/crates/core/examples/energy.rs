//! Edge (lh, hl) versus cross (hh) energy per level of the square transform.
//!
//! cargo run --example energy [image.pgm]

use rectwave::dwt1d::BoundaryMode;
use rectwave::filterbank::builtin;
use rectwave::imageio::{axis_edges_fixture, read_pgm_file};
use rectwave::transform2d::{default_levels, energy_distribution, square_forward};

fn main() -> rectwave::error::Result<()> {
    let img = match std::env::args().nth(1) {
        Some(path) => read_pgm_file(path)?,
        None => axis_edges_fixture(512),
    };
    let fb = builtin("d4")?;
    let pyr = square_forward(
        &img,
        &fb,
        default_levels(img.rows(), img.cols()),
        BoundaryMode::Periodic,
    )?;
    let table = energy_distribution(&pyr);
    print!("{}", table.to_csv());
    for l in &table.levels {
        println!(
            "level {}: cross/edge = {:.3}",
            l.level,
            if l.edge > 0.0 { l.cross / l.edge } else { 0.0 }
        );
    }
    Ok(())
}
