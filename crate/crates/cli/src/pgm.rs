//! Binary PGM (magic `P5`, maxval 255) reading and writing.

use std::fs;
use std::path::Path;

use rnmf_core::DenseMatrix;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(CliError::invalid("image dimensions must be positive"));
        }
        if pixels.len() != width * height {
            return Err(CliError::invalid(format!(
                "pixel buffer has {} bytes, expected {}",
                pixels.len(),
                width * height
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Intensities as an `height x width` matrix of 0..=255 values.
    pub fn to_matrix(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.height, self.width, |r, c| self.get(c, r) as f64)
    }

    /// Builds an image from real-valued intensities, rounding and clamping
    /// each entry into 0..=255.
    pub fn from_matrix_clamped(m: &DenseMatrix) -> Self {
        let pixels = m
            .data()
            .iter()
            .map(|&v| v.round().clamp(0.0, 255.0) as u8)
            .collect();
        GrayImage {
            width: m.cols(),
            height: m.rows(),
            pixels,
        }
    }
}

fn skip_header_whitespace(bytes: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn read_header_int(bytes: &[u8], pos: usize) -> Result<(usize, usize)> {
    let start = skip_header_whitespace(bytes, pos);
    let mut end = start;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == start {
        return Err(CliError::invalid("bad PGM header: expected an integer"));
    }
    let text = std::str::from_utf8(&bytes[start..end]).expect("digits are ascii");
    let value = text
        .parse()
        .map_err(|_| CliError::invalid("bad PGM header: integer out of range"))?;
    Ok((value, end))
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        let magic = bytes
            .get(..2)
            .and_then(|m| std::str::from_utf8(m).ok())
            .unwrap_or("??");
        return Err(CliError::invalid(format!(
            "bad PGM magic `{magic}`: only binary `P5` is supported"
        )));
    }
    let (width, pos) = read_header_int(bytes, 2)?;
    let (height, pos) = read_header_int(bytes, pos)?;
    let (maxval, pos) = read_header_int(bytes, pos)?;
    if maxval != 255 {
        return Err(CliError::invalid(format!(
            "unsupported PGM maxval {maxval}: must be 255"
        )));
    }
    // Exactly one whitespace byte separates the header from the payload.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(CliError::invalid("bad PGM header: missing separator"));
    }
    let payload = &bytes[pos + 1..];
    if payload.len() < width * height {
        return Err(CliError::invalid(format!(
            "truncated PGM payload: {} bytes for {}x{}",
            payload.len(),
            width,
            height
        )));
    }
    GrayImage::from_pixels(width, height, payload[..width * height].to_vec())
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    decode_pgm(&bytes)
}

pub fn write_pgm(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_pgm(img)).map_err(|e| CliError::io(path.display().to_string(), e))
}
