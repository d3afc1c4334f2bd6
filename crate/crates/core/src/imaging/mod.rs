//! Grayscale images, thresholding and PNM interchange.

mod pnm;
mod threshold;

pub use pnm::{read_pnm, write_pnm, PnmFormat, PnmImage};
pub use threshold::{binarize_fixed, otsu_threshold, Threshold, ThresholdOrigin};

use crate::error::{Error, Result};
use crate::grid::BinaryGrid;

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    height: usize,
    width: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(height: usize, width: usize, pixels: Vec<u8>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Dimension(format!(
                "image dimensions must be positive, got {height}x{width}"
            )));
        }
        if height.checked_mul(width) != Some(pixels.len()) {
            return Err(Error::Dimension(format!(
                "{height}x{width} image needs {} pixels, got {}",
                height.saturating_mul(width),
                pixels.len()
            )));
        }
        Ok(GrayImage {
            height,
            width,
            pixels,
        })
    }

    pub fn filled(height: usize, width: usize, value: u8) -> Result<Self> {
        let n = height
            .checked_mul(width)
            .ok_or_else(|| Error::Dimension(format!("{height}x{width} image is too large")))?;
        Self::new(height, width, vec![value; n])
    }

    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(height.saturating_mul(width));
        for i in 0..height {
            for j in 0..width {
                pixels.push(f(i, j));
            }
        }
        Self::new(height, width, pixels)
    }

    /// Maps 1-cells to 255 and 0-cells to 0.
    pub fn from_binary(g: &BinaryGrid) -> Self {
        Self::from_fn(
            g.height(),
            g.width(),
            |i, j| if g.at(i, j) { 255 } else { 0 },
        )
        .expect("grid dimensions are valid")
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.pixels[i * self.width + j]
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn histogram(&self) -> [u64; 256] {
        let mut hist = [0u64; 256];
        for &p in &self.pixels {
            hist[p as usize] += 1;
        }
        hist
    }

    pub fn transpose(&self) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |i, j| self.get(j, i))
            .expect("dimensions are valid")
    }
}
