//! Classical edge operators: Sobel, Prewitt, Roberts, Laplacian of Gaussian
//! and Canny.
//!
//! Every kernel reads outside the image by replicating the nearest border
//! pixel. Smoothing and LoG kernels use dyadic weights whose sums are exact
//! (1 and 0 respectively), so on 8-bit input the filtered values carry no
//! rounding error and adding a constant to the image leaves every gradient
//! and second-derivative response bit-identical.

mod canny;
mod gradient;
mod log;

pub use canny::{canny, canny_detailed, CannyParams, CannyResult, ThresholdScale};
pub use gradient::{
    gradient_edges, gradient_operator, GradientField, GradientKind, DEFAULT_EDGE_FRACTION,
};
pub use log::{log_kernel, log_operator, LogParams, LogResponse};

use crate::imaging::GrayImage;

/// Real-valued raster used between filter stages.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Plane {
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn from_image(img: &GrayImage) -> Self {
        Plane {
            height: img.height(),
            width: img.width(),
            data: img.pixels().iter().map(|&p| p as f64).collect(),
        }
    }

    #[inline]
    pub fn clamped(&self, i: isize, j: isize) -> f64 {
        let i = i.clamp(0, self.height as isize - 1) as usize;
        let j = j.clamp(0, self.width as isize - 1) as usize;
        self.data[i * self.width + j]
    }

    /// Correlates with a 1-D kernel centred on its middle entry, along rows
    /// (`horizontal`) or columns.
    pub fn correlate_1d(&self, kernel: &[f64], horizontal: bool) -> Plane {
        let r = (kernel.len() / 2) as isize;
        let mut data = Vec::with_capacity(self.data.len());
        for i in 0..self.height as isize {
            for j in 0..self.width as isize {
                let mut acc = 0.0;
                for (k, w) in kernel.iter().enumerate() {
                    let d = k as isize - r;
                    acc += w * if horizontal {
                        self.clamped(i, j + d)
                    } else {
                        self.clamped(i + d, j)
                    };
                }
                data.push(acc);
            }
        }
        Plane {
            height: self.height,
            width: self.width,
            data,
        }
    }
}

/// Rounds `x` to a multiple of `2^-bits`.
pub(crate) fn quantize(x: f64, bits: i32) -> f64 {
    let scale = 2f64.powi(bits);
    (x * scale).round() / scale
}

/// Normalized 1-D Gaussian with radius `ceil(3σ)` and weights on a 2^-20 grid
/// summing to exactly 1.
pub(crate) fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|x| (-(x * x) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    let mut kernel: Vec<f64> = raw.iter().map(|w| quantize(w / total, 20)).collect();
    let centre = radius as usize;
    let others: f64 = kernel
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != centre)
        .map(|(_, w)| w)
        .sum();
    kernel[centre] = 1.0 - others;
    kernel
}

pub(crate) fn gaussian_blur(plane: &Plane, sigma: f64) -> Plane {
    let k = gaussian_kernel(sigma);
    plane.correlate_1d(&k, true).correlate_1d(&k, false)
}
