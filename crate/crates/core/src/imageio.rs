//! File formats: 8-bit greyscale PGM, binary coefficient dumps, and the
//! log-scaled composite view of a decomposition.
//!
//! A coefficient dump is one ASCII header line
//!
//! ```text
//! rectwave-coeffs v1 <transform> <bank> <rows> <cols> <J or Jx,Jy> <boundary>
//! ```
//!
//! followed by `rows * cols` little-endian `f64` values in canonical stream
//! order.

use std::fs;
use std::path::Path;

use crate::dwt1d::BoundaryMode;
use crate::error::{Error, Result};
use crate::ratelab::{sample_function, TestFunction};
use crate::transform2d::{
    CoeffContainer, Decomposition, Image, Levels, RectGrid, SquarePyramid, TransformKind,
};

const DUMP_MAGIC: &str = "rectwave-coeffs";
const DUMP_VERSION: &str = "v1";

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.buf.len() {
            let b = self.buf[self.pos];
            if b == b'#' {
                while self.pos < self.buf.len() && self.buf[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Option<&'a str> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.buf.len() && !self.buf[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        std::str::from_utf8(&self.buf[start..self.pos]).ok()
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        let t = self
            .token()
            .ok_or_else(|| Error::Pgm(format!("truncated header: missing {what}")))?;
        t.parse()
            .map_err(|_| Error::Pgm(format!("bad {what} `{t}`")))
    }
}

/// Decodes a binary (`P5`) or ASCII (`P2`) greyscale PGM with maxval <= 255.
pub fn read_pgm(bytes: &[u8]) -> Result<Image> {
    let mut cur = Cursor { buf: bytes, pos: 0 };
    let magic = cur.token().ok_or_else(|| Error::Pgm("empty file".into()))?;
    let binary = match magic {
        "P5" => true,
        "P2" => false,
        m => return Err(Error::Pgm(format!("bad magic `{m}`"))),
    };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Pgm("zero dimension".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::Pgm(format!("maxval {maxval} outside 1..=255")));
    }
    let count = width * height;
    let data: Vec<f64> = if binary {
        // exactly one whitespace byte separates the header from the raster
        let start = cur.pos + 1;
        let raster = bytes.get(start..).unwrap_or(&[]);
        if raster.len() < count {
            return Err(Error::Pgm(format!(
                "truncated raster: {} of {count} bytes",
                raster.len()
            )));
        }
        raster[..count].iter().map(|&b| b as f64).collect()
    } else {
        let mut v = Vec::with_capacity(count);
        for i in 0..count {
            let t = cur
                .token()
                .ok_or_else(|| Error::Pgm(format!("truncated raster: {i} of {count} samples")))?;
            let x: usize = t
                .parse()
                .map_err(|_| Error::Pgm(format!("bad sample `{t}`")))?;
            if x > maxval {
                return Err(Error::Pgm(format!("sample {x} exceeds maxval {maxval}")));
            }
            v.push(x as f64);
        }
        v
    };
    if binary && data.iter().any(|&x| x > maxval as f64) {
        return Err(Error::Pgm(format!("sample exceeds maxval {maxval}")));
    }
    Image::new(height, width, data)
}

/// Samples are rounded half away from zero and clamped to `0..=255`.
pub fn to_pixel(v: f64) -> u8 {
    if v.is_nan() {
        return 0;
    }
    v.round().clamp(0.0, 255.0) as u8
}

/// Encodes as binary `P5` with maxval 255.
pub fn write_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.cols(), img.rows()).into_bytes();
    out.extend(img.data().iter().map(|&v| to_pixel(v)));
    out
}

pub fn read_pgm_file(path: impl AsRef<Path>) -> Result<Image> {
    read_pgm(&fs::read(path)?)
}

pub fn write_pgm_file(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    fs::write(path, write_pgm(img))?;
    Ok(())
}

/// Serializes a decomposition.
pub fn dump_coeffs(dec: &Decomposition) -> Result<Vec<u8>> {
    let bank = dec.bank();
    if bank.is_empty() || bank.chars().any(char::is_whitespace) {
        return Err(Error::Dump(format!(
            "bank name `{bank}` cannot be stored in a dump header"
        )));
    }
    let mut out = format!(
        "{DUMP_MAGIC} {DUMP_VERSION} {} {} {} {} {} {}\n",
        dec.kind(),
        bank,
        dec.rows(),
        dec.cols(),
        dec.levels(),
        dec.boundary()
    )
    .into_bytes();
    out.reserve(8 * dec.total());
    for v in dec.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

/// Parsed dump header.
#[derive(Debug, Clone, PartialEq)]
pub struct DumpHeader {
    pub kind: TransformKind,
    pub bank: String,
    pub rows: usize,
    pub cols: usize,
    pub levels: Levels,
    pub boundary: BoundaryMode,
}

fn parse_header(line: &str) -> Result<DumpHeader> {
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.len() != 8 || f[0] != DUMP_MAGIC {
        return Err(Error::Dump("not a coefficient dump".into()));
    }
    if f[1] != DUMP_VERSION {
        return Err(Error::Dump(format!("unsupported version `{}`", f[1])));
    }
    let dim = |s: &str| {
        s.parse::<usize>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| Error::Dump(format!("bad dimension `{s}`")))
    };
    let as_dump = |e: Error| Error::Dump(e.to_string());
    Ok(DumpHeader {
        kind: f[2].parse().map_err(as_dump)?,
        bank: f[3].to_string(),
        rows: dim(f[4])?,
        cols: dim(f[5])?,
        levels: f[6].parse().map_err(as_dump)?,
        boundary: f[7].parse().map_err(as_dump)?,
    })
}

/// Splits a dump into header and raw payload.
pub fn read_dump_header(bytes: &[u8]) -> Result<(DumpHeader, &[u8])> {
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::Dump("missing header line".into()))?;
    let line =
        std::str::from_utf8(&bytes[..nl]).map_err(|_| Error::Dump("header is not UTF-8".into()))?;
    Ok((parse_header(line)?, &bytes[nl + 1..]))
}

/// Inverse of [`dump_coeffs`]; bit-exact.
pub fn load_coeffs(bytes: &[u8]) -> Result<Decomposition> {
    let (h, payload) = read_dump_header(bytes)?;
    let total = h.rows * h.cols;
    if payload.len() != 8 * total {
        return Err(Error::Dump(format!(
            "payload has {} bytes, expected {}",
            payload.len(),
            8 * total
        )));
    }
    let values: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let layout_err = |e: Error| Error::Dump(format!("inconsistent header: {e}"));
    let empty = match h.kind {
        TransformKind::Square => {
            if h.levels.x != h.levels.y {
                return Err(Error::Dump("square dump with two level counts".into()));
            }
            Decomposition::Square(
                SquarePyramid::zeros(h.rows, h.cols, h.levels.x, h.boundary, h.bank)
                    .map_err(layout_err)?,
            )
        }
        TransformKind::Rect => Decomposition::Rect(
            RectGrid::zeros(h.rows, h.cols, h.levels.x, h.levels.y, h.boundary, h.bank)
                .map_err(layout_err)?,
        ),
    };
    empty.with_values(&values)
}

/// [`load_coeffs`] that also checks the transform tag.
pub fn load_coeffs_as(bytes: &[u8], expected: TransformKind) -> Result<Decomposition> {
    let dec = load_coeffs(bytes)?;
    if dec.kind() != expected {
        return Err(Error::Dump(format!(
            "dump holds a {} decomposition, expected {expected}",
            dec.kind()
        )));
    }
    Ok(dec)
}

fn log_scale(band: &Image, floor: f64) -> Image {
    let vmax = band.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = Image::zeros(band.rows(), band.cols());
    if vmax <= floor {
        return out;
    }
    let denom = vmax.ln_1p();
    for (o, v) in out.data_mut().iter_mut().zip(band.data()) {
        *o = 255.0 * v.abs().ln_1p() / denom;
    }
    out
}

/// One plane, same size as the input, with every subband log-scaled to
/// `0..=255` on its own. Square pyramids use the nested layout (`ll` top
/// left, then per level `hl` top right, `lh` bottom left, `hh` bottom
/// right); rectangular grids use the packed tensor layout. Bands whose peak
/// is at rounding-noise level relative to the largest coefficient stay black.
pub fn render_composite(dec: &Decomposition) -> Image {
    let vals = dec.values();
    let global = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-10 * global.max(1.0);
    let mut out = Image::zeros(dec.rows(), dec.cols());
    match dec {
        Decomposition::Square(p) => {
            out.paste(0, 0, &log_scale(&p.ll, floor));
            for (k, lvl) in p.levels.iter().enumerate() {
                let (r, c) = (p.rows() >> (k + 1), p.cols() >> (k + 1));
                out.paste(0, c, &log_scale(&lvl.hl, floor));
                out.paste(r, 0, &log_scale(&lvl.lh, floor));
                out.paste(r, c, &log_scale(&lvl.hh, floor));
            }
        }
        Decomposition::Rect(g) => {
            use crate::transform2d::axis_span;
            for sy in 0..=g.jy() {
                for sx in 0..=g.jx() {
                    let (r0, _) = axis_span(g.rows(), g.jy(), sy);
                    let (c0, _) = axis_span(g.cols(), g.jx(), sx);
                    out.paste(r0, c0, &log_scale(g.band(sx, sy), floor));
                }
            }
        }
    }
    out
}

/// The axis-aligned test image used as a compression fixture: background 40,
/// rectangles 220.
pub fn axis_edges_fixture(n: usize) -> Image {
    let mut img = sample_function(TestFunction::AxisEdges, n);
    for v in img.data_mut() {
        *v = 40.0 + 180.0 * *v;
    }
    img
}
