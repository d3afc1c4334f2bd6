use serde::{Deserialize, Serialize};

use super::{quantize, Plane};
use crate::error::{Error, Result};
use crate::grid::BinaryGrid;
use crate::imaging::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogParams {
    pub sigma: f64,
    /// A sign change counts as an edge only when the two responses differ by
    /// more than this fraction of the largest absolute response.
    pub contrast: f64,
}

impl Default for LogParams {
    fn default() -> Self {
        LogParams {
            sigma: 2.0,
            contrast: 0.1,
        }
    }
}

impl LogParams {
    pub fn new(sigma: f64, contrast: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Usage(format!("sigma must be positive, got {sigma}")));
        }
        if !(0.0..=1.0).contains(&contrast) {
            return Err(Error::Usage(format!(
                "contrast must lie in [0, 1], got {contrast}"
            )));
        }
        Ok(LogParams { sigma, contrast })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogResponse {
    pub height: usize,
    pub width: usize,
    pub response: Vec<f64>,
    pub edges: BinaryGrid,
}

/// Laplacian-of-Gaussian kernel of radius `ceil(3σ)`, row-major.
///
/// Entries are mean-subtracted, snapped to a 2^-24 grid, and the centre is
/// set so the kernel sums to exactly zero.
pub fn log_kernel(sigma: f64) -> Vec<Vec<f64>> {
    let radius = (3.0 * sigma).ceil() as isize;
    let s2 = sigma * sigma;
    let mut k: Vec<Vec<f64>> = (-radius..=radius)
        .map(|y| {
            (-radius..=radius)
                .map(|x| {
                    let r2 = (x * x + y * y) as f64;
                    (r2 - 2.0 * s2) / (s2 * s2) * (-r2 / (2.0 * s2)).exp()
                })
                .collect()
        })
        .collect();
    let n = ((2 * radius + 1) * (2 * radius + 1)) as f64;
    let mean = k.iter().flatten().sum::<f64>() / n;
    for v in k.iter_mut().flatten() {
        *v = quantize(*v - mean, 24);
    }
    let c = radius as usize;
    k[c][c] = 0.0;
    let rest: f64 = k.iter().flatten().sum();
    k[c][c] = -rest;
    k
}

pub fn log_operator(img: &GrayImage, params: LogParams) -> LogResponse {
    let plane = Plane::from_image(img);
    let kernel = log_kernel(params.sigma);
    let r = (kernel.len() / 2) as isize;
    let (h, w) = img.dims();

    let mut response = Vec::with_capacity(h * w);
    for i in 0..h as isize {
        for j in 0..w as isize {
            let mut acc = 0.0;
            for (a, row) in kernel.iter().enumerate() {
                for (b, &k) in row.iter().enumerate() {
                    acc += k * plane.clamped(i + a as isize - r, j + b as isize - r);
                }
            }
            response.push(acc);
        }
    }

    let peak = response.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = params.contrast * peak;
    let mut edges = BinaryGrid::zeros(h, w).expect("image dimensions are valid");
    let mut mark = |a: usize, b: usize| {
        let (ra, rb) = (response[a], response[b]);
        let opposite = (ra > 0.0 && rb < 0.0) || (ra < 0.0 && rb > 0.0);
        if opposite && (ra - rb).abs() > floor {
            // the sample nearer zero sits closer to the crossing
            let k = if rb.abs() < ra.abs() { b } else { a };
            edges.set(k / w, k % w, true).expect("index within image");
        }
    };
    for i in 0..h {
        for j in 0..w {
            let a = i * w + j;
            if j + 1 < w {
                mark(a, a + 1);
            }
            if i + 1 < h {
                mark(a, a + w);
            }
        }
    }

    LogResponse {
        height: h,
        width: w,
        response,
        edges,
    }
}
