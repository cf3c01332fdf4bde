//! Binary 8-bit PGM (P5) codec.
//!
//! Reading accepts any whitespace and `#` comments between header fields.
//! Writing always emits the canonical header `P5\n<w> <h>\n255\n`, rounds
//! samples to the nearest integer and clamps them to `[0, 255]`.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;

fn decode_error(offset: usize, message: impl Into<String>) -> Error {
    Error::Decode {
        offset,
        message: message.into(),
    }
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c => self.pos += 1,
                _ => return,
            }
        }
    }

    /// Next decimal field and its starting offset.
    fn number(&mut self, what: &str) -> Result<(usize, usize)> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(decode_error(start, format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .map(|v| (v, start))
            .ok_or_else(|| decode_error(start, format!("{what} out of range")))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(decode_error(0, "missing P5 magic number"));
    }
    let mut h = Header { bytes, pos: 2 };
    let (width, _) = h.number("width")?;
    let (height, _) = h.number("height")?;
    let (maxval, maxval_at) = h.number("maxval")?;
    if maxval != 255 {
        return Err(decode_error(maxval_at, format!("maxval {maxval} is not 255")));
    }
    if width == 0 || height == 0 {
        return Err(decode_error(maxval_at, "zero image dimension"));
    }
    match bytes.get(h.pos) {
        Some(b) if b.is_ascii_whitespace() => h.pos += 1,
        _ => return Err(decode_error(h.pos, "expected a whitespace byte before the raster")),
    }
    let need = width * height;
    let raster = &bytes[h.pos..];
    if raster.len() < need {
        return Err(decode_error(
            bytes.len(),
            format!("truncated raster: {} of {need} bytes", raster.len()),
        ));
    }
    Image::new(width, height, raster[..need].iter().map(|&b| f64::from(b)).collect())
}

fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

pub fn encode_pgm(image: &Image) -> Vec<u8> {
    encode_pgm_with_comment(image, None)
}

/// Canonical encoding, optionally with one comment line after the magic number.
pub fn encode_pgm_with_comment(image: &Image, comment: Option<&str>) -> Vec<u8> {
    let mut out = Vec::with_capacity(image.len() + 32);
    out.extend_from_slice(b"P5\n");
    if let Some(c) = comment {
        for line in c.lines() {
            out.extend_from_slice(format!("# {line}\n").as_bytes());
        }
    }
    out.extend_from_slice(format!("{} {}\n255\n", image.width(), image.height()).as_bytes());
    out.extend(image.samples().iter().map(|&v| quantize(v)));
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<Image> {
    decode_pgm(&fs::read(path)?)
}

pub fn write_pgm(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_pgm(image))?;
    Ok(())
}
