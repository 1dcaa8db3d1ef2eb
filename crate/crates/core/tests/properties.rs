use proptest::prelude::*;

use rectwave::approx::{apply_selection, compress, select_top_n, SelectionStrategy};
use rectwave::dwt1d::{self, BoundaryMode};
use rectwave::filterbank::{builtin, load_filter_spec, validate_biorthogonality, FilterBank};
use rectwave::imageio::{dump_coeffs, load_coeffs, read_pgm, write_pgm};
use rectwave::transform2d::{
    rect_forward, rect_forward_with_order, square_forward, AxisOrder, CoeffContainer,
    Decomposition, Image, Levels, TransformKind,
};

fn bank_strategy() -> impl Strategy<Value = FilterBank> {
    prop_oneof![Just("haar"), Just("d4"), Just("crf137")].prop_map(|n| builtin(n).unwrap())
}

fn kind_strategy() -> impl Strategy<Value = TransformKind> {
    prop_oneof![Just(TransformKind::Square), Just(TransformKind::Rect)]
}

/// `(rows, cols, J)` with `2^J` dividing both sides.
fn shape_strategy() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..=3, 1usize..=4, 1usize..=4).prop_map(|(j, a, b)| (a << j, b << j, j))
}

fn image_strategy() -> impl Strategy<Value = (Image, usize)> {
    shape_strategy().prop_flat_map(|(r, c, j)| {
        prop::collection::vec(-100.0f64..100.0, r * c)
            .prop_map(move |d| (Image::new(r, c, d).unwrap(), j))
    })
}

fn boundary_for(fb: &FilterBank, symmetric: bool) -> BoundaryMode {
    if symmetric && fb.supports_symmetric() {
        BoundaryMode::Symmetric
    } else {
        BoundaryMode::Periodic
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn one_dimensional_round_trip(
        fb in bank_strategy(),
        len_j in (1usize..=4, 1usize..=5),
        seed in prop::collection::vec(-10.0f64..10.0, 256),
        symmetric in any::<bool>(),
    ) {
        let (j, mult) = len_j;
        let n = mult << j;
        let signal = &seed[..n];
        let b = boundary_for(&fb, symmetric);
        let c = dwt1d::forward(signal, &fb, j, b).unwrap();
        prop_assert_eq!(c.len(), n);
        let back = dwt1d::inverse(&c, &fb).unwrap();
        for (x, y) in signal.iter().zip(&back) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn two_dimensional_round_trip(
        fb in bank_strategy(),
        kind in kind_strategy(),
        (img, j) in image_strategy(),
        symmetric in any::<bool>(),
    ) {
        let b = boundary_for(&fb, symmetric);
        let dec = Decomposition::forward(&img, &fb, kind, Levels::uniform(j), b).unwrap();
        prop_assert_eq!(dec.values().len(), img.len());
        prop_assert!(dec.reconstruct(&fb).unwrap().max_abs_diff(&img) < 1e-9);
    }

    #[test]
    fn orthogonal_banks_preserve_energy(
        name in prop_oneof![Just("haar"), Just("d4")],
        kind in kind_strategy(),
        (img, j) in image_strategy(),
    ) {
        let fb = builtin(name).unwrap();
        let dec = Decomposition::forward(&img, &fb, kind, Levels::uniform(j), BoundaryMode::Periodic).unwrap();
        let e: f64 = dec.values().iter().map(|v| v * v).sum();
        prop_assert!((e - img.energy()).abs() <= 1e-9 * img.energy().max(1.0));
    }

    #[test]
    fn transforms_are_linear(
        fb in bank_strategy(),
        kind in kind_strategy(),
        (img, j) in image_strategy(),
        a in -3.0f64..3.0,
    ) {
        let other = Image::from_fn(img.rows(), img.cols(), |r, c| ((r * 7 + c * 3) % 11) as f64);
        let mix = Image::from_fn(img.rows(), img.cols(), |r, c| a * img.get(r, c) + other.get(r, c));
        let lv = Levels::uniform(j);
        let t = |x: &Image| Decomposition::forward(x, &fb, kind, lv, BoundaryMode::Periodic).unwrap().values();
        let (tx, ty, tm) = (t(&img), t(&other), t(&mix));
        for k in 0..tm.len() {
            prop_assert!((tm[k] - (a * tx[k] + ty[k])).abs() < 1e-8);
        }
    }

    #[test]
    fn rect_axis_order_is_irrelevant(
        fb in bank_strategy(),
        (img, j) in image_strategy(),
        jx_less in 0usize..2,
    ) {
        let jx = j.saturating_sub(jx_less).max(1);
        let a = rect_forward_with_order(&img, &fb, jx, j, BoundaryMode::Periodic, AxisOrder::RowsFirst).unwrap();
        let b = rect_forward_with_order(&img, &fb, jx, j, BoundaryMode::Periodic, AxisOrder::ColumnsFirst).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn scaling_blocks_agree(fb in bank_strategy(), (img, j) in image_strategy()) {
        let sq = square_forward(&img, &fb, j, BoundaryMode::Periodic).unwrap();
        let rc = rect_forward(&img, &fb, j, j, BoundaryMode::Periodic).unwrap();
        prop_assert!(sq.ll.max_abs_diff(rc.band(0, 0)) < 1e-10);
    }

    #[test]
    fn top_n_keeps_the_largest(values in prop::collection::vec(-50.0f64..50.0, 1..200), frac in 0.0f64..1.0) {
        let n = ((values.len() as f64 * frac) as usize).max(1);
        let mask = select_top_n(&values, n).unwrap();
        prop_assert_eq!(mask.iter().filter(|&&k| k).count(), n);
        let min_kept = values.iter().zip(&mask).filter(|p| *p.1).map(|p| p.0.abs()).fold(f64::MAX, f64::min);
        let max_dropped = values.iter().zip(&mask).filter(|p| !*p.1).map(|p| p.0.abs()).fold(0.0, f64::max);
        prop_assert!(min_kept >= max_dropped);
    }

    #[test]
    fn dropped_energy_is_squared_error(
        name in prop_oneof![Just("haar"), Just("d4")],
        kind in kind_strategy(),
        (img, j) in image_strategy(),
        frac in 0.05f64..1.0,
    ) {
        let fb = builtin(name).unwrap();
        let dec = Decomposition::forward(&img, &fb, kind, Levels::uniform(j), BoundaryMode::Periodic).unwrap();
        let n = ((img.len() as f64 * frac) as usize).max(1);
        let (masked, sel) = apply_selection(&dec, &SelectionStrategy::TopN { n }, &fb).unwrap();
        prop_assert_eq!(sel.kept, n);
        let dropped: f64 = dec.values().iter().zip(&sel.mask).filter(|p| !*p.1).map(|p| p.0 * p.0).sum();
        let err = masked.reconstruct(&fb).unwrap();
        let sq: f64 = err.data().iter().zip(img.data()).map(|(a, b)| (a - b).powi(2)).sum();
        prop_assert!((sq - dropped).abs() <= 1e-8 * img.energy().max(1.0));
        for (a, b) in masked.values().iter().zip(dec.values()) {
            prop_assert!(*a == 0.0 || *a == b);
        }
    }

    #[test]
    fn top_n_error_shrinks_with_budget(
        name in prop_oneof![Just("haar"), Just("d4")],
        (img, j) in image_strategy(),
    ) {
        let fb = builtin(name).unwrap();
        let mut last = f64::INFINITY;
        for k in 1..=4 {
            let n = (img.len() * k / 4).max(1);
            let c = compress(&img, &fb, TransformKind::Rect, Levels::uniform(j), BoundaryMode::Periodic,
                &SelectionStrategy::TopN { n }).unwrap();
            prop_assert!(c.report.l2_error <= last + 1e-9);
            last = c.report.l2_error;
        }
    }

    #[test]
    fn pgm_round_trip(r in 1usize..20, c in 1usize..20, seed in any::<u64>()) {
        let img = Image::from_fn(r, c, |i, j| ((seed >> ((i * c + j) % 56)) as usize % 256) as f64);
        let bytes = write_pgm(&img);
        prop_assert_eq!(read_pgm(&bytes).unwrap(), img.clone());
        let mut ascii = format!("P2\n{c} {r}\n255\n");
        for v in img.data() {
            ascii.push_str(&format!("{} ", *v as u8));
        }
        prop_assert_eq!(read_pgm(ascii.as_bytes()).unwrap(), img);
    }

    #[test]
    fn dumps_are_bit_exact(
        fb in bank_strategy(),
        kind in kind_strategy(),
        (img, j) in image_strategy(),
    ) {
        let dec = Decomposition::forward(&img, &fb, kind, Levels::uniform(j), BoundaryMode::Periodic).unwrap();
        let back = load_coeffs(&dump_coeffs(&dec).unwrap()).unwrap();
        let bits = |d: &Decomposition| d.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&back), bits(&dec));
        prop_assert_eq!(back.kind(), kind);
    }

    #[test]
    fn perturbed_taps_fail_validation(
        fb in bank_strategy(),
        which in 0usize..4,
        pos in 0usize..16,
        delta in prop_oneof![1e-6f64..1e-2, -1e-2f64..-1e-6],
    ) {
        let mut bad = fb.clone();
        let taps = match which {
            0 => &mut bad.h,
            1 => &mut bad.h_dual,
            2 => &mut bad.g,
            _ => &mut bad.g_dual,
        };
        let k = pos % taps.coeffs.len();
        taps.coeffs[k] += delta;
        prop_assert!(!validate_biorthogonality(&bad, 1e-10).passed);
    }

    #[test]
    fn filter_spec_round_trip(fb in bank_strategy()) {
        prop_assert_eq!(load_filter_spec(&fb.to_filter_spec()).unwrap(), fb);
    }
}
