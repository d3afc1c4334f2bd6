use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::gradient::{gradient_of_plane, GradientField, GradientKind};
use super::{gaussian_blur, Plane};
use crate::error::{Error, Result};
use crate::grid::BinaryGrid;
use crate::imaging::GrayImage;

/// How the hysteresis thresholds are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdScale {
    /// Raw gradient magnitudes.
    Absolute,
    /// Fractions of the largest gradient magnitude in the image.
    FractionOfMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CannyParams {
    pub sigma: f64,
    pub low: f64,
    pub high: f64,
    pub scale: ThresholdScale,
}

impl Default for CannyParams {
    fn default() -> Self {
        CannyParams {
            sigma: 1.0,
            low: 0.1,
            high: 0.3,
            scale: ThresholdScale::FractionOfMax,
        }
    }
}

impl CannyParams {
    pub fn new(sigma: f64, low: f64, high: f64, scale: ThresholdScale) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Usage(format!("sigma must be positive, got {sigma}")));
        }
        if !(0.0 <= low && low <= high && high.is_finite()) {
            return Err(Error::Usage(format!(
                "need 0 <= low <= high, got low {low}, high {high}"
            )));
        }
        Ok(CannyParams {
            sigma,
            low,
            high,
            scale,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CannyResult {
    pub edges: BinaryGrid,
    /// Pixels surviving non-maximum suppression.
    pub ridge: BinaryGrid,
    pub gradient: GradientField,
    /// Hysteresis thresholds in magnitude units.
    pub low: f64,
    pub high: f64,
}

pub fn canny(img: &GrayImage, params: CannyParams) -> BinaryGrid {
    canny_detailed(img, params).edges
}

pub fn canny_detailed(img: &GrayImage, params: CannyParams) -> CannyResult {
    let smoothed = gaussian_blur(&Plane::from_image(img), params.sigma);
    let gradient = gradient_of_plane(&smoothed, GradientKind::Sobel);
    let ridge = non_maximum_suppression(&gradient);
    let (low, high) = match params.scale {
        ThresholdScale::Absolute => (params.low, params.high),
        ThresholdScale::FractionOfMax => {
            let max = gradient.max_magnitude();
            (params.low * max, params.high * max)
        }
    };
    let edges = hysteresis(&gradient, &ridge, low, high);
    CannyResult {
        edges,
        ridge,
        gradient,
        low,
        high,
    }
}

/// Keeps pixels that are maximal along the gradient direction, quantized to
/// 0°, 45°, 90° or 135°. On a plateau the pixel further along the gradient
/// wins, so equal neighbors never both survive.
fn non_maximum_suppression(g: &GradientField) -> BinaryGrid {
    let (h, w) = (g.height as isize, g.width as isize);
    let mag = |i: isize, j: isize| -> f64 {
        if i < 0 || j < 0 || i >= h || j >= w {
            0.0
        } else {
            g.magnitude[(i * w + j) as usize]
        }
    };
    BinaryGrid::from_fn(g.height, g.width, |i, j| {
        let k = g.index(i, j);
        let m = g.magnitude[k];
        if m == 0.0 {
            return false;
        }
        // (di, dj) points along the gradient; gy grows downward.
        let (di, dj) = direction(g.gx[k], g.gy[k]);
        let (i, j) = (i as isize, j as isize);
        m >= mag(i - di, j - dj) && m > mag(i + di, j + dj)
    })
    .expect("field dimensions are valid")
}

fn direction(gx: f64, gy: f64) -> (isize, isize) {
    let mut angle = gy.atan2(gx).to_degrees();
    if angle < 0.0 {
        angle += 180.0;
    }
    if !(22.5..157.5).contains(&angle) {
        (0, 1)
    } else if angle < 67.5 {
        (1, 1)
    } else if angle < 112.5 {
        (1, 0)
    } else {
        (1, -1)
    }
}

/// Ridge pixels at or above `high` seed the output; ridge pixels at or above
/// `low` join when 8-connected to a seed.
fn hysteresis(g: &GradientField, ridge: &BinaryGrid, low: f64, high: f64) -> BinaryGrid {
    let (h, w) = (g.height, g.width);
    let mut edges = BinaryGrid::zeros(h, w).expect("field dimensions are valid");
    let mut queue = VecDeque::new();
    for (i, j) in ridge.ones() {
        if g.magnitude[g.index(i, j)] >= high {
            edges.set(i, j, true).expect("in range");
            queue.push_back((i, j));
        }
    }
    while let Some((i, j)) = queue.pop_front() {
        for ni in i.saturating_sub(1)..=(i + 1).min(h - 1) {
            for nj in j.saturating_sub(1)..=(j + 1).min(w - 1) {
                if !edges.at(ni, nj) && ridge.at(ni, nj) && g.magnitude[g.index(ni, nj)] >= low {
                    edges.set(ni, nj, true).expect("in range");
                    queue.push_back((ni, nj));
                }
            }
        }
    }
    edges
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_is_empty() {
        let img = GrayImage::filled(16, 16, 140).unwrap();
        let r = canny_detailed(&img, CannyParams::default());
        assert!(r.edges.is_empty());
        assert!(r.ridge.is_empty());
    }

    #[test]
    fn vertical_step_single_width() {
        let img = GrayImage::from_fn(32, 32, |_, j| if j < 16 { 0 } else { 255 }).unwrap();
        let p = CannyParams::new(1.0, 10.0, 30.0, ThresholdScale::Absolute).unwrap();
        let e = canny(&img, p);
        for i in 0..32 {
            let cols: Vec<usize> = (0..32).filter(|&j| e.at(i, j)).collect();
            assert_eq!(cols, vec![16], "row {i}");
        }
    }

    #[test]
    fn square_gives_closed_contour() {
        let img = GrayImage::from_fn(64, 64, |i, j| {
            if (16..48).contains(&i) && (16..48).contains(&j) {
                255
            } else {
                0
            }
        })
        .unwrap();
        let e = canny(&img, CannyParams::default());
        let on_boundary = |i: usize, j: usize| {
            (16..48).contains(&i)
                && (16..48).contains(&j)
                && (i == 16 || i == 47 || j == 16 || j == 47)
        };
        let near_boundary = |i: usize, j: usize| {
            (i.saturating_sub(1)..=i + 1)
                .any(|a| (j.saturating_sub(1)..=j + 1).any(|b| on_boundary(a, b)))
        };
        for (i, j) in e.ones() {
            assert!(near_boundary(i, j), "stray edge at ({i}, {j})");
        }
        // every boundary pixel is covered and the contour is one 8-connected loop
        for i in 16..48 {
            for j in 16..48 {
                if on_boundary(i, j) {
                    let covered = (i - 1..=i + 1).any(|a| (j - 1..=j + 1).any(|b| e.at(a, b)));
                    assert!(covered, "gap near ({i}, {j})");
                }
            }
        }
        let start = e.ones().next().unwrap();
        let mut seen = BinaryGrid::zeros(64, 64).unwrap();
        let mut stack = vec![start];
        seen.set(start.0, start.1, true).unwrap();
        while let Some((i, j)) = stack.pop() {
            for a in i - 1..=i + 1 {
                for b in j - 1..=j + 1 {
                    if e.at(a, b) && !seen.at(a, b) {
                        seen.set(a, b, true).unwrap();
                        stack.push((a, b));
                    }
                }
            }
        }
        assert_eq!(seen, e);
        for (i, j) in e.ones() {
            let n = (i - 1..=i + 1)
                .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
                .filter(|&(a, b)| (a, b) != (i, j) && e.at(a, b))
                .count();
            assert!(n >= 2, "contour end at ({i}, {j})");
        }
    }

    #[test]
    fn direction_bins() {
        assert_eq!(direction(1.0, 0.0), (0, 1));
        assert_eq!(direction(-1.0, 0.0), (0, 1));
        assert_eq!(direction(1.0, 1.0), (1, 1));
        assert_eq!(direction(0.0, -3.0), (1, 0));
        assert_eq!(direction(-1.0, 1.0), (1, -1));
    }

    #[test]
    fn edges_lie_on_ridge_above_low() {
        let img = GrayImage::from_fn(40, 40, |i, j| {
            let (di, dj) = (i as f64 - 20.0, j as f64 - 18.0);
            if di * di + dj * dj < 120.0 {
                220
            } else {
                ((i * 7 + j * 3) % 40) as u8
            }
        })
        .unwrap();
        let r = canny_detailed(&img, CannyParams::default());
        assert!(!r.edges.is_empty());
        for (i, j) in r.edges.ones() {
            assert!(r.ridge.at(i, j));
            assert!(r.gradient.magnitude[r.gradient.index(i, j)] >= r.low);
        }
    }

    #[test]
    fn params_validated() {
        assert!(CannyParams::new(0.0, 0.1, 0.3, ThresholdScale::FractionOfMax).is_err());
        assert!(CannyParams::new(1.0, 0.4, 0.3, ThresholdScale::FractionOfMax).is_err());
        assert!(CannyParams::new(1.0, -0.1, 0.3, ThresholdScale::FractionOfMax).is_err());
    }
}
