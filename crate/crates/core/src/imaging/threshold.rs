use serde::{Deserialize, Serialize};

use super::GrayImage;
use crate::grid::BinaryGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdOrigin {
    Fixed,
    Otsu,
}

/// Intensities strictly above `value` become 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Threshold {
    pub value: u8,
    pub origin: ThresholdOrigin,
}

impl Threshold {
    pub fn fixed(value: u8) -> Self {
        Threshold {
            value,
            origin: ThresholdOrigin::Fixed,
        }
    }
}

/// Otsu's threshold over the 256-bin histogram.
///
/// Class 0 holds intensities `<= t`. The smallest `t` with maximal
/// between-class variance wins. An image with a single intensity returns that
/// intensity, so binarizing it yields all zeros.
pub fn otsu_threshold(img: &GrayImage) -> Threshold {
    let hist = img.histogram();
    let n = img.pixels().len() as i128;
    let total: i128 = hist
        .iter()
        .enumerate()
        .map(|(v, &c)| v as i128 * c as i128)
        .sum();

    // variance(t) ∝ (n·s0 − n0·total)² / (n0·n1); the numerator is exact.
    let mut best_t = 0u8;
    let mut best_var = 0.0f64;
    let (mut n0, mut s0) = (0i128, 0i128);
    for (t, &count) in hist.iter().enumerate().take(255) {
        n0 += count as i128;
        s0 += t as i128 * count as i128;
        let n1 = n - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let spread = (n * s0 - n0 * total) as f64;
        let var = spread * spread / (n0 as f64 * n1 as f64);
        if var > best_var {
            best_var = var;
            best_t = t as u8;
        }
    }

    if best_var == 0.0 {
        // single intensity level
        best_t = hist.iter().position(|&c| c > 0).unwrap_or(0) as u8;
    }
    Threshold {
        value: best_t,
        origin: ThresholdOrigin::Otsu,
    }
}

pub fn binarize_fixed(img: &GrayImage, t: Threshold) -> BinaryGrid {
    BinaryGrid::from_fn(img.height(), img.width(), |i, j| img.get(i, j) > t.value)
        .expect("image dimensions are valid")
}
