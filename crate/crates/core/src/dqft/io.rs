// SPDX-License-Identifier: Apache-2.0

//! Binary PPM (P6, maxval 255) images and the `QSPC` spectrum layout.
//!
//! `QSPC`: the magic `b"QSPC"`, then `u32` rows and `u32` cols, then
//! `rows * cols * 4` binary64 values in row-major pixel order with the
//! components of each quaternion in `q0, q1, q2, q3` order. All integers and
//! floats are little-endian.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;

use super::QImage;

pub const SPECTRUM_MAGIC: &[u8; 4] = b"QSPC";

/// 8-bit RGB raster, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

fn ppm_error(reason: impl Into<String>) -> Error {
    Error::Malformed { kind: "PPM", reason: reason.into() }
}

fn spectrum_error(reason: impl Into<String>) -> Error {
    Error::Malformed { kind: "QSPC", reason: reason.into() }
}

fn read_byte<R: BufRead>(r: &mut R) -> Result<Option<u8>> {
    let mut b = [0u8; 1];
    match r.read(&mut b)? {
        0 => Ok(None),
        _ => Ok(Some(b[0])),
    }
}

/// Next whitespace-delimited header token, skipping `#` comments.
/// Consumes exactly one whitespace byte after the token.
fn header_token<R: BufRead>(r: &mut R) -> Result<String> {
    let mut token = String::new();
    loop {
        let Some(b) = read_byte(r)? else {
            return if token.is_empty() { Err(ppm_error("truncated header")) } else { Ok(token) };
        };
        match b {
            b'#' if token.is_empty() => {
                let mut skip = Vec::new();
                r.read_until(b'\n', &mut skip)?;
            }
            b if b.is_ascii_whitespace() => {
                if !token.is_empty() {
                    return Ok(token);
                }
            }
            b => token.push(b as char),
        }
    }
}

fn header_number<R: BufRead>(r: &mut R, what: &str) -> Result<usize> {
    let tok = header_token(r)?;
    tok.parse().map_err(|_| ppm_error(format!("{what} `{tok}` is not a number")))
}

pub fn read_ppm<R: BufRead>(mut r: R) -> Result<RgbImage> {
    let magic = header_token(&mut r)?;
    if magic != "P6" {
        return Err(ppm_error(format!("magic `{magic}`, expected P6")));
    }
    let width = header_number(&mut r, "width")?;
    let height = header_number(&mut r, "height")?;
    let maxval = header_number(&mut r, "maxval")?;
    if maxval != 255 {
        return Err(ppm_error(format!("maxval {maxval}; only 8-bit (255) images are supported")));
    }
    if width == 0 || height == 0 {
        return Err(ppm_error(format!("empty image {width}x{height}")));
    }
    let len =
        width.checked_mul(height).and_then(|n| n.checked_mul(3)).ok_or_else(|| ppm_error("dimensions overflow"))?;
    let mut data = vec![0u8; len];
    r.read_exact(&mut data).map_err(|_| ppm_error(format!("expected {len} bytes of pixel data")))?;
    let pixels = data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Ok(RgbImage { width, height, pixels })
}

pub fn write_ppm<W: Write>(mut w: W, img: &RgbImage) -> Result<()> {
    write!(w, "P6\n{} {}\n255\n", img.width, img.height)?;
    for p in &img.pixels {
        w.write_all(p)?;
    }
    w.flush()?;
    Ok(())
}

/// Pure-quaternion embedding `(0, r/255, g/255, b/255)`.
pub fn rgb_to_qimage(img: &RgbImage) -> Result<QImage> {
    let data = img
        .pixels
        .iter()
        .map(|[r, g, b]| Quaternion::new(0.0, *r as f64 / 255.0, *g as f64 / 255.0, *b as f64 / 255.0))
        .collect();
    QImage::new(img.height, img.width, data)
}

/// Inverse of [`rgb_to_qimage`]: the vector part, rounded and clamped to 0..=255.
/// The real part is dropped.
pub fn qimage_to_rgb(img: &QImage) -> RgbImage {
    let to_byte = |x: f64| (x * 255.0).round().clamp(0.0, 255.0) as u8;
    RgbImage {
        width: img.cols(),
        height: img.rows(),
        pixels: img.pixels().iter().map(|q| [to_byte(q.q1), to_byte(q.q2), to_byte(q.q3)]).collect(),
    }
}

pub fn write_spectrum<W: Write>(mut w: W, spectrum: &QImage) -> Result<()> {
    let dim = |n: usize| u32::try_from(n).map_err(|_| spectrum_error(format!("dimension {n} exceeds u32")));
    w.write_all(SPECTRUM_MAGIC)?;
    w.write_all(&dim(spectrum.rows())?.to_le_bytes())?;
    w.write_all(&dim(spectrum.cols())?.to_le_bytes())?;
    for q in spectrum.pixels() {
        for c in q.components() {
            w.write_all(&c.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_spectrum<R: Read>(mut r: R) -> Result<QImage> {
    let mut header = [0u8; 12];
    r.read_exact(&mut header).map_err(|_| spectrum_error("truncated header"))?;
    if &header[..4] != SPECTRUM_MAGIC {
        return Err(spectrum_error("bad magic"));
    }
    let rows = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let count = rows.checked_mul(cols).ok_or_else(|| spectrum_error("dimensions overflow"))?;
    let mut data = Vec::with_capacity(count.min(1 << 20));
    let mut buf = [0u8; 32];
    for _ in 0..count {
        r.read_exact(&mut buf).map_err(|_| spectrum_error(format!("expected {count} quaternions")))?;
        let c = |k: usize| f64::from_le_bytes(buf[8 * k..8 * k + 8].try_into().unwrap());
        data.push(Quaternion::new(c(0), c(1), c(2), c(3)));
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(spectrum_error("trailing data after spectrum"));
    }
    QImage::new(rows, cols, data).map_err(|e| spectrum_error(e.to_string()))
}
