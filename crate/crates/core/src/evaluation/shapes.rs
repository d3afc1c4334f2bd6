//! Two-level test scenes with exactly known object boundaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::BinaryGrid;
use crate::imaging::GrayImage;

pub const FOREGROUND: u8 = 255;
pub const BACKGROUND: u8 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    FilledRectangle {
        top: usize,
        left: usize,
        height: usize,
        width: usize,
    },
    /// Pixels with `(i - ci)² + (j - cj)² <= radius²`.
    FilledDisk {
        center_i: usize,
        center_j: usize,
        radius: usize,
    },
    /// Alternating `cell`×`cell` squares, foreground where the block parity is odd.
    Checkerboard { cell: usize },
}

impl Shape {
    fn contains(&self, i: usize, j: usize) -> bool {
        match *self {
            Shape::FilledRectangle {
                top,
                left,
                height,
                width,
            } => (top..top + height).contains(&i) && (left..left + width).contains(&j),
            Shape::FilledDisk {
                center_i,
                center_j,
                radius,
            } => {
                let (di, dj) = (i.abs_diff(center_i), j.abs_diff(center_j));
                di * di + dj * dj <= radius * radius
            }
            Shape::Checkerboard { cell } => (i / cell + j / cell) % 2 == 1,
        }
    }

    fn check_fits(&self, height: usize, width: usize) -> Result<()> {
        let fits = match *self {
            Shape::FilledRectangle {
                top,
                left,
                height: h,
                width: w,
            } => h > 0 && w > 0 && top + h <= height && left + w <= width,
            Shape::FilledDisk {
                center_i,
                center_j,
                radius,
            } => {
                center_i >= radius
                    && center_j >= radius
                    && center_i + radius < height
                    && center_j + radius < width
            }
            Shape::Checkerboard { cell } => cell > 0,
        };
        if fits {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "{self:?} does not fit a {height}x{width} canvas"
            )))
        }
    }
}

/// Renders `shape` on a `height`×`width` canvas and returns the image with its
/// boundary map: foreground pixels with a 4-neighbor in the background, where
/// cells beyond the canvas count as background.
pub fn synthetic_shapes(
    shape: Shape,
    height: usize,
    width: usize,
) -> Result<(GrayImage, BinaryGrid)> {
    if height == 0 || width == 0 {
        return Err(Error::Dimension(format!(
            "canvas must be non-empty, got {height}x{width}"
        )));
    }
    shape.check_fits(height, width)?;
    let object = BinaryGrid::from_fn(height, width, |i, j| shape.contains(i, j))?;
    let image = GrayImage::from_fn(height, width, |i, j| {
        if object.at(i, j) {
            FOREGROUND
        } else {
            BACKGROUND
        }
    })?;
    let boundary = object_boundary(&object);
    Ok((image, boundary))
}

/// Foreground cells that are 4-adjacent to background or to the lattice edge.
pub fn object_boundary(object: &BinaryGrid) -> BinaryGrid {
    use crate::grid::BoundaryCondition::Null;
    BinaryGrid::from_fn(object.height(), object.width(), |i, j| {
        let (i, j) = (i as isize, j as isize);
        object.get(i, j, Null)
            && [(-1, 0), (1, 0), (0, -1), (0, 1)]
                .iter()
                .any(|&(di, dj)| !object.get(i + di, j + dj, Null))
    })
    .expect("dimensions come from an existing grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_perimeter() {
        let shape = Shape::FilledRectangle {
            top: 4,
            left: 4,
            height: 8,
            width: 8,
        };
        let (img, boundary) = synthetic_shapes(shape, 16, 16).unwrap();
        assert_eq!(boundary.popcount(), 4 * 8 - 4);
        assert_eq!(
            img.pixels().iter().filter(|&&p| p == FOREGROUND).count(),
            64
        );
        for (i, j) in boundary.ones() {
            assert!(i == 4 || i == 11 || j == 4 || j == 11);
        }
    }

    #[test]
    fn point_disk() {
        let shape = Shape::FilledDisk {
            center_i: 3,
            center_j: 5,
            radius: 0,
        };
        let (img, boundary) = synthetic_shapes(shape, 8, 8).unwrap();
        assert_eq!(boundary.ones().collect::<Vec<_>>(), vec![(3, 5)]);
        assert_eq!(img.get(3, 5), FOREGROUND);
    }

    #[test]
    fn unit_checkerboard_every_object_pixel_is_boundary() {
        let (img, boundary) = synthetic_shapes(Shape::Checkerboard { cell: 1 }, 6, 7).unwrap();
        let object: Vec<_> = (0..6)
            .flat_map(|i| (0..7).map(move |j| (i, j)))
            .filter(|&(i, j)| img.get(i, j) == FOREGROUND)
            .collect();
        assert_eq!(boundary.ones().collect::<Vec<_>>(), object);
        assert_eq!(boundary.popcount(), 21);
    }

    #[test]
    fn must_fit_canvas() {
        let big = Shape::FilledRectangle {
            top: 10,
            left: 0,
            height: 8,
            width: 8,
        };
        assert!(matches!(
            synthetic_shapes(big, 16, 16),
            Err(Error::Dimension(_))
        ));
        let disk = Shape::FilledDisk {
            center_i: 2,
            center_j: 8,
            radius: 3,
        };
        assert!(matches!(
            synthetic_shapes(disk, 16, 16),
            Err(Error::Dimension(_))
        ));
        assert!(synthetic_shapes(Shape::Checkerboard { cell: 0 }, 4, 4).is_err());
    }
}
