use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Plane;
use crate::error::{Error, Result};
use crate::grid::BinaryGrid;
use crate::imaging::GrayImage;

/// Gradient maps are thresholded at this fraction of their maximum magnitude.
pub const DEFAULT_EDGE_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GradientKind {
    Sobel,
    Prewitt,
    Roberts,
}

impl GradientKind {
    /// Smallest image side the kernel fits in.
    pub fn kernel_size(self) -> usize {
        match self {
            GradientKind::Sobel | GradientKind::Prewitt => 3,
            GradientKind::Roberts => 2,
        }
    }

    /// Horizontal-derivative kernel, anchored at its top-left entry plus
    /// `anchor` in both axes.
    fn gx_kernel(self) -> (&'static [&'static [f64]], isize) {
        const SOBEL: &[&[f64]] = &[&[-1.0, 0.0, 1.0], &[-2.0, 0.0, 2.0], &[-1.0, 0.0, 1.0]];
        const PREWITT: &[&[f64]] = &[&[-1.0, 0.0, 1.0], &[-1.0, 0.0, 1.0], &[-1.0, 0.0, 1.0]];
        const ROBERTS_X: &[&[f64]] = &[&[1.0, 0.0], &[0.0, -1.0]];
        match self {
            GradientKind::Sobel => (SOBEL, 1),
            GradientKind::Prewitt => (PREWITT, 1),
            GradientKind::Roberts => (ROBERTS_X, 0),
        }
    }

    fn gy_kernel(self) -> (&'static [&'static [f64]], isize) {
        const SOBEL: &[&[f64]] = &[&[-1.0, -2.0, -1.0], &[0.0, 0.0, 0.0], &[1.0, 2.0, 1.0]];
        const PREWITT: &[&[f64]] = &[&[-1.0, -1.0, -1.0], &[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]];
        const ROBERTS_Y: &[&[f64]] = &[&[0.0, 1.0], &[-1.0, 0.0]];
        match self {
            GradientKind::Sobel => (SOBEL, 1),
            GradientKind::Prewitt => (PREWITT, 1),
            GradientKind::Roberts => (ROBERTS_Y, 0),
        }
    }
}

impl fmt::Display for GradientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradientKind::Sobel => "sobel",
            GradientKind::Prewitt => "prewitt",
            GradientKind::Roberts => "roberts",
        })
    }
}

impl FromStr for GradientKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sobel" => Ok(GradientKind::Sobel),
            "prewitt" => Ok(GradientKind::Prewitt),
            "roberts" | "robert" => Ok(GradientKind::Roberts),
            other => Err(Error::Parse(format!("unknown gradient operator {other:?}"))),
        }
    }
}

/// Per-pixel horizontal/vertical responses and their Euclidean magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub height: usize,
    pub width: usize,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub magnitude: Vec<f64>,
}

impl GradientField {
    pub(crate) fn from_components(height: usize, width: usize, gx: Vec<f64>, gy: Vec<f64>) -> Self {
        let magnitude = gx.iter().zip(&gy).map(|(x, y)| x.hypot(*y)).collect();
        GradientField {
            height,
            width,
            gx,
            gy,
            magnitude,
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.width + j
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude.iter().copied().fold(0.0, f64::max)
    }
}

fn correlate_2d(plane: &Plane, kernel: &[&[f64]], anchor: isize) -> Vec<f64> {
    let mut out = Vec::with_capacity(plane.data.len());
    for i in 0..plane.height as isize {
        for j in 0..plane.width as isize {
            let mut acc = 0.0;
            for (a, row) in kernel.iter().enumerate() {
                for (b, &w) in row.iter().enumerate() {
                    if w != 0.0 {
                        acc += w * plane.clamped(i + a as isize - anchor, j + b as isize - anchor);
                    }
                }
            }
            out.push(acc);
        }
    }
    out
}

pub(crate) fn gradient_of_plane(plane: &Plane, kind: GradientKind) -> GradientField {
    let (kx, ax) = kind.gx_kernel();
    let (ky, ay) = kind.gy_kernel();
    let gx = correlate_2d(plane, kx, ax);
    let gy = correlate_2d(plane, ky, ay);
    GradientField::from_components(plane.height, plane.width, gx, gy)
}

pub fn gradient_operator(img: &GrayImage, kind: GradientKind) -> Result<GradientField> {
    let k = kind.kernel_size();
    if img.height() < k || img.width() < k {
        return Err(Error::Dimension(format!(
            "{kind} needs at least a {k}x{k} image, got {}x{}",
            img.height(),
            img.width()
        )));
    }
    Ok(gradient_of_plane(&Plane::from_image(img), kind))
}

/// Marks pixels whose magnitude is positive and at least `fraction` of the
/// field's maximum.
pub fn gradient_edges(field: &GradientField, fraction: f64) -> BinaryGrid {
    let cut = fraction * field.max_magnitude();
    BinaryGrid::from_fn(field.height, field.width, |i, j| {
        let m = field.magnitude[field.index(i, j)];
        m > 0.0 && m >= cut
    })
    .expect("field dimensions are valid")
}
