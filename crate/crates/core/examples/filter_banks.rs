//! Inspect the built-in filter banks and round-trip one through the
//! filter-spec text format.
//!
//! cargo run --example filter_banks

use rectwave::filterbank::{
    builtin, discrete_vanishing_moments, load_filter_spec, validate_biorthogonality, BUILTIN_NAMES,
    BUILTIN_TOL, MOMENT_TOL,
};

fn main() -> rectwave::error::Result<()> {
    for name in BUILTIN_NAMES {
        let fb = builtin(name)?;
        let report = validate_biorthogonality(&fb, BUILTIN_TOL);
        println!(
            "{:<7} taps h/h~/g/g~ = {}/{}/{}/{}  moments {}  deviation {:.1e}  orthogonal {}",
            fb.name,
            fb.h.len(),
            fb.h_dual.len(),
            fb.g.len(),
            fb.g_dual.len(),
            discrete_vanishing_moments(&fb, MOMENT_TOL),
            report.max_deviation,
            fb.is_orthogonal(),
        );
    }

    let d4 = builtin("d4")?;
    let text = d4.to_filter_spec();
    println!("\n{text}");
    let back = load_filter_spec(&text)?;
    assert_eq!(back, d4);
    Ok(())
}
