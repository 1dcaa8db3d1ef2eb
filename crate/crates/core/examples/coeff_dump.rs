//! Write a coefficient dump, load it back bit-exactly and reconstruct.
//!
//! cargo run --example coeff_dump [out_dir]

use std::path::PathBuf;

use rectwave::dwt1d::BoundaryMode;
use rectwave::filterbank::builtin;
use rectwave::imageio::{dump_coeffs, load_coeffs_as, read_dump_header};
use rectwave::ratelab::{sample_function, TestFunction};
use rectwave::transform2d::{CoeffContainer, Decomposition, Levels, TransformKind};

fn main() -> rectwave::error::Result<()> {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    let fb = builtin("crf137")?;
    let img = sample_function(TestFunction::AdditiveSmooth, 128);
    let dec = Decomposition::forward(
        &img,
        &fb,
        TransformKind::Rect,
        Levels { x: 5, y: 3 },
        BoundaryMode::Symmetric,
    )?;

    let path = out_dir.join("additive_smooth.coeffs");
    std::fs::write(&path, dump_coeffs(&dec)?)?;
    let bytes = std::fs::read(&path)?;
    let (header, payload) = read_dump_header(&bytes)?;
    println!(
        "{} ({} payload bytes): {header:?}",
        path.display(),
        payload.len()
    );

    let back = load_coeffs_as(&bytes, TransformKind::Rect)?;
    let same = back
        .values()
        .iter()
        .zip(dec.values())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    println!("bit-exact: {same}");
    println!(
        "reconstruction error: {:.1e}",
        back.reconstruct(&fb)?.max_abs_diff(&img)
    );
    Ok(())
}
