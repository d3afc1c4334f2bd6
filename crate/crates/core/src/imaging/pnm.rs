//! Netpbm P1/P2/P4/P5 reading and writing.
//!
//! Writers emit a fixed layout: magic, `width height`, maxval (graymaps only,
//! always 255), each on its own line; ASCII rows use single spaces between
//! samples and end with a newline. PBM `1` (black) is cell value 1.

use std::fmt::Write as _;

use super::GrayImage;
use crate::error::{Error, Result};
use crate::grid::BinaryGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PnmFormat {
    /// ASCII bitmap.
    P1,
    /// ASCII graymap.
    P2,
    /// Binary bitmap.
    P4,
    /// Binary graymap.
    P5,
}

impl PnmFormat {
    pub fn is_bitmap(self) -> bool {
        matches!(self, PnmFormat::P1 | PnmFormat::P4)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PnmImage {
    Gray(GrayImage),
    Binary(BinaryGrid),
}

impl From<GrayImage> for PnmImage {
    fn from(img: GrayImage) -> Self {
        PnmImage::Gray(img)
    }
}

impl From<BinaryGrid> for PnmImage {
    fn from(g: BinaryGrid) -> Self {
        PnmImage::Binary(g)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn header_number(&mut self, what: &str) -> Result<u64> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.bytes.get(self.pos) {
                None => Err(Error::Truncated(format!("missing {what}"))),
                Some(&b) => Err(Error::Format(format!(
                    "expected {what}, found byte {b:#04x}"
                ))),
            };
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format(format!("{what} is too large")))
    }

    /// Consumes the single whitespace byte separating the header from raster data.
    fn raster_start(&mut self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            Some(&b) => Err(Error::Format(format!(
                "expected whitespace after header, found {b:#04x}"
            ))),
            None => Err(Error::Truncated("no raster data after header".into())),
        }
    }

    fn plain_bit(&mut self) -> Result<bool> {
        self.skip_whitespace_and_comments();
        match self.bytes.get(self.pos) {
            Some(b'0') => {
                self.pos += 1;
                Ok(false)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(true)
            }
            Some(&b) => Err(Error::Format(format!(
                "invalid bitmap sample byte {b:#04x}"
            ))),
            None => Err(Error::Truncated("bitmap ended early".into())),
        }
    }
}

/// Rescales `v` in `[0, maxval]` to `[0, 255]`, rounding half up.
fn rescale(v: u64, maxval: u64) -> u8 {
    ((v * 255 * 2 + maxval) / (2 * maxval)) as u8
}

pub fn read_pnm(bytes: &[u8]) -> Result<PnmImage> {
    let format = match bytes {
        [b'P', b'1', ..] => PnmFormat::P1,
        [b'P', b'2', ..] => PnmFormat::P2,
        [b'P', b'4', ..] => PnmFormat::P4,
        [b'P', b'5', ..] => PnmFormat::P5,
        [b'P', m, ..] => return Err(Error::Format(format!("unsupported magic P{}", *m as char))),
        _ => return Err(Error::Format("not a PNM file".into())),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.header_number("width")?;
    let height = cur.header_number("height")?;
    let (width, height) = (to_dim(width)?, to_dim(height)?);
    if width == 0 || height == 0 {
        return Err(Error::Dimension(format!(
            "image dimensions must be positive, got {height}x{width}"
        )));
    }
    if height
        .checked_mul(width)
        .is_none_or(|n| n > crate::grid::MAX_CELLS)
    {
        return Err(Error::Dimension(format!(
            "{height}x{width} image is too large"
        )));
    }

    match format {
        PnmFormat::P1 => {
            let mut grid = BinaryGrid::zeros(height, width)?;
            for i in 0..height {
                for j in 0..width {
                    if cur.plain_bit()? {
                        grid.set(i, j, true)?;
                    }
                }
            }
            Ok(PnmImage::Binary(grid))
        }
        PnmFormat::P4 => {
            let data = cur.raster_start()?;
            let stride = width.div_ceil(8);
            if data.len() < stride * height {
                return Err(Error::Truncated(format!(
                    "expected {} bitmap bytes, found {}",
                    stride * height,
                    data.len()
                )));
            }
            let grid = BinaryGrid::from_fn(height, width, |i, j| {
                (data[i * stride + j / 8] >> (7 - j % 8)) & 1 == 1
            })?;
            Ok(PnmImage::Binary(grid))
        }
        PnmFormat::P2 | PnmFormat::P5 => {
            let maxval = cur.header_number("maxval")?;
            if maxval == 0 || maxval > 65535 {
                return Err(Error::Format(format!("maxval {maxval} outside [1, 65535]")));
            }
            let n = height * width;
            let mut pixels = Vec::with_capacity(n);
            if format == PnmFormat::P2 {
                for _ in 0..n {
                    let v = cur.header_number("sample")?;
                    if v > maxval {
                        return Err(Error::Format(format!("sample {v} exceeds maxval {maxval}")));
                    }
                    pixels.push(rescale(v, maxval));
                }
            } else {
                let data = cur.raster_start()?;
                let sample_bytes = if maxval > 255 { 2 } else { 1 };
                if data.len() < n * sample_bytes {
                    return Err(Error::Truncated(format!(
                        "expected {} graymap bytes, found {}",
                        n * sample_bytes,
                        data.len()
                    )));
                }
                for k in 0..n {
                    let v = if sample_bytes == 2 {
                        u16::from_be_bytes([data[2 * k], data[2 * k + 1]]) as u64
                    } else {
                        data[k] as u64
                    };
                    if v > maxval {
                        return Err(Error::Format(format!("sample {v} exceeds maxval {maxval}")));
                    }
                    pixels.push(rescale(v, maxval));
                }
            }
            Ok(PnmImage::Gray(GrayImage::new(height, width, pixels)?))
        }
    }
}

fn to_dim(v: u64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::Dimension(format!("dimension {v} is too large")))
}

pub fn write_pnm(img: &PnmImage, format: PnmFormat) -> Result<Vec<u8>> {
    match (img, format) {
        (PnmImage::Binary(g), PnmFormat::P1 | PnmFormat::P4) => Ok(write_bitmap(g, format)),
        (PnmImage::Gray(g), PnmFormat::P2 | PnmFormat::P5) => Ok(write_graymap(g, format)),
        (PnmImage::Binary(g), _) => Ok(write_graymap(&GrayImage::from_binary(g), format)),
        (PnmImage::Gray(_), _) => Err(Error::Usage(
            "a grayscale image must be binarized before writing it as PBM".into(),
        )),
    }
}

fn write_bitmap(g: &BinaryGrid, format: PnmFormat) -> Vec<u8> {
    let (h, w) = g.dims();
    let mut out = format!(
        "{}\n{w} {h}\n",
        if format == PnmFormat::P1 { "P1" } else { "P4" }
    )
    .into_bytes();
    if format == PnmFormat::P1 {
        let mut text = String::with_capacity(h * w * 2);
        for i in 0..h {
            for j in 0..w {
                if j > 0 {
                    text.push(' ');
                }
                text.push(if g.at(i, j) { '1' } else { '0' });
            }
            text.push('\n');
        }
        out.extend_from_slice(text.as_bytes());
    } else {
        let stride = w.div_ceil(8);
        for i in 0..h {
            let mut row = vec![0u8; stride];
            for j in 0..w {
                if g.at(i, j) {
                    row[j / 8] |= 0x80 >> (j % 8);
                }
            }
            out.extend_from_slice(&row);
        }
    }
    out
}

fn write_graymap(img: &GrayImage, format: PnmFormat) -> Vec<u8> {
    let (h, w) = img.dims();
    if format == PnmFormat::P5 {
        let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
        out.extend_from_slice(img.pixels());
        return out;
    }
    let mut text = format!("P2\n{w} {h}\n255\n");
    for row in img.pixels().chunks_exact(w) {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                text.push(' ');
            }
            let _ = write!(text, "{v}");
        }
        text.push('\n');
    }
    text.into_bytes()
}
