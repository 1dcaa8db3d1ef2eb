//! Square (Mallat) and rectangular (tensor-product) wavelet transforms of
//! greyscale images, with N-term compression and approximation-rate tools.
//!
//! The square transform repeatedly splits only the low-pass block, so every
//! basis function has the same dilation along both axes. The rectangular
//! transform runs a full multilevel transform along each axis independently,
//! pairing any horizontal scale with any vertical one. Functions with a
//! bounded mixed derivative, and images with axis-aligned edges, need far
//! fewer rectangular coefficients for the same error.
//!
//! ```
//! use rectwave::approx::{compress, SelectionStrategy};
//! use rectwave::dwt1d::BoundaryMode;
//! use rectwave::filterbank::builtin;
//! use rectwave::ratelab::{sample_function, TestFunction};
//! use rectwave::transform2d::{Levels, TransformKind};
//!
//! let fb = builtin("d4").unwrap();
//! let img = sample_function(TestFunction::TensorSmooth, 64);
//! let keep = SelectionStrategy::TopN { n: 200 };
//! let run = |kind| {
//!     compress(&img, &fb, kind, Levels::uniform(4), BoundaryMode::Periodic, &keep)
//!         .unwrap()
//!         .report
//!         .l2_error
//! };
//! assert!(run(TransformKind::Rect) < run(TransformKind::Square));
//! ```
//!
//! Runnable examples:
//!
//! - `filter_banks`: built-in banks, validation, filter-spec text format
//! - `decompose`: both transforms and their composite views
//! - `compress`: ratio 80 and 160 comparison on one image
//! - `energy`: edge and cross energies per level
//! - `rate_study`: error curves and slopes for every test function
//! - `theorem_threshold`: level-dependent thresholds against top-N
//! - `haar_oracle`: Haar coefficient identity and decay ratios
//! - `coeff_dump`: binary coefficient dumps
//!
//! ```bash
//! cargo run --release --example compress -- lena.pgm
//! ```

// NaN-rejecting checks read as `!(x >= lo)` throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod cli;
pub mod dwt1d;
pub mod error;
pub mod filterbank;
pub mod imageio;
pub mod ratelab;
pub mod transform2d;

pub use error::{Error, Result};
pub use filterbank::{builtin, FilterBank};
pub use transform2d::{CoeffContainer, Decomposition, Image, Levels, TransformKind};
