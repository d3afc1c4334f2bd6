//! Bit-packed binary lattice.
//!
//! Rows are stored top to bottom (`i` grows downward), columns left to right
//! (`j` grows rightward). Each row occupies `words_per_row` `u64` words with
//! column `j` at bit `j % 64` of word `j / 64` (LSB first). Bits at or beyond
//! `width` in the last word of a row are always zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) const WORD_BITS: usize = 64;

/// Upper bound on the number of cells in one grid.
pub const MAX_CELLS: usize = 1 << 32;

/// How reads outside the lattice are resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// Out-of-lattice cells read as 0.
    #[default]
    Null,
    /// The lattice wraps toroidally.
    Periodic,
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Null => "null",
            BoundaryCondition::Periodic => "periodic",
        })
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "null" => Ok(BoundaryCondition::Null),
            "periodic" => Ok(BoundaryCondition::Periodic),
            other => Err(Error::Parse(format!(
                "unknown boundary {other:?}, expected null or periodic"
            ))),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryGrid {
    height: usize,
    width: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BinaryGrid {
    pub fn new(height: usize, width: usize, fill: bool) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::Dimension(format!(
                "grid dimensions must be positive, got {height}x{width}"
            )));
        }
        match height.checked_mul(width) {
            Some(cells) if cells <= MAX_CELLS => {}
            _ => {
                return Err(Error::Dimension(format!(
                    "{height}x{width} grid exceeds {MAX_CELLS} cells"
                )))
            }
        }
        let words_per_row = width.div_ceil(WORD_BITS);
        let mut grid = BinaryGrid {
            height,
            width,
            words_per_row,
            words: vec![0; height * words_per_row],
        };
        if fill {
            grid.words.fill(u64::MAX);
            grid.clear_padding();
        }
        Ok(grid)
    }

    pub fn zeros(height: usize, width: usize) -> Result<Self> {
        Self::new(height, width, false)
    }

    /// Builds a grid by evaluating `f(i, j)` for every cell.
    pub fn from_fn(
        height: usize,
        width: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut grid = Self::zeros(height, width)?;
        for i in 0..height {
            let row = grid.row_mut(i);
            for j in 0..width {
                if f(i, j) {
                    row[j / WORD_BITS] |= 1 << (j % WORD_BITS);
                }
            }
        }
        Ok(grid)
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
    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    /// Raw packed storage, row-major.
    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        let start = i * self.words_per_row;
        &self.words[start..start + self.words_per_row]
    }

    #[inline]
    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [u64] {
        let start = i * self.words_per_row;
        &mut self.words[start..start + self.words_per_row]
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    /// Mask of valid bits in the last word of each row.
    #[inline]
    pub(crate) fn last_word_mask(&self) -> u64 {
        last_word_mask(self.width)
    }

    pub(crate) fn clear_padding(&mut self) {
        let mask = self.last_word_mask();
        let wpr = self.words_per_row;
        for row in self.words.chunks_exact_mut(wpr) {
            row[wpr - 1] &= mask;
        }
    }

    /// True when every padding bit is zero.
    pub fn is_canonical(&self) -> bool {
        let mask = self.last_word_mask();
        self.words
            .chunks_exact(self.words_per_row)
            .all(|row| row[self.words_per_row - 1] & !mask == 0)
    }

    /// Reads cell `(i, j)`; coordinates outside the lattice resolve through `bc`.
    #[inline]
    pub fn get(&self, i: isize, j: isize, bc: BoundaryCondition) -> bool {
        let (h, w) = (self.height as isize, self.width as isize);
        let (i, j) = if (0..h).contains(&i) && (0..w).contains(&j) {
            (i as usize, j as usize)
        } else {
            match bc {
                BoundaryCondition::Null => return false,
                BoundaryCondition::Periodic => (i.rem_euclid(h) as usize, j.rem_euclid(w) as usize),
            }
        };
        self.get_unchecked_bounds(i, j)
    }

    #[inline]
    fn get_unchecked_bounds(&self, i: usize, j: usize) -> bool {
        let word = self.words[i * self.words_per_row + j / WORD_BITS];
        (word >> (j % WORD_BITS)) & 1 == 1
    }

    /// In-range read; panics when `(i, j)` is outside the lattice.
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> bool {
        assert!(
            i < self.height && j < self.width,
            "cell ({i}, {j}) out of range"
        );
        self.get_unchecked_bounds(i, j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) -> Result<()> {
        if i >= self.height || j >= self.width {
            return Err(Error::Index {
                i,
                j,
                height: self.height,
                width: self.width,
            });
        }
        let word = &mut self.words[i * self.words_per_row + j / WORD_BITS];
        let bit = 1u64 << (j % WORD_BITS);
        if value {
            *word |= bit;
        } else {
            *word &= !bit;
        }
        Ok(())
    }

    pub fn xor(&self, other: &BinaryGrid) -> Result<BinaryGrid> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BinaryGrid) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::Dimension(format!(
                "cannot combine {}x{} with {}x{}",
                self.height, self.width, other.height, other.width
            )));
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Coordinates of all 1-cells in raster order.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.words
            .chunks_exact(self.words_per_row)
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter().enumerate().flat_map(move |(k, &word)| {
                    let mut bits = word;
                    std::iter::from_fn(move || {
                        if bits == 0 {
                            return None;
                        }
                        let b = bits.trailing_zeros() as usize;
                        bits &= bits - 1;
                        Some((i, k * WORD_BITS + b))
                    })
                })
            })
    }

    /// Swaps rows and columns.
    pub fn transpose(&self) -> BinaryGrid {
        let mut out =
            BinaryGrid::zeros(self.width, self.height).expect("dimensions already validated");
        for (i, j) in self.ones() {
            out.row_mut(j)[i / WORD_BITS] |= 1 << (i % WORD_BITS);
        }
        out
    }
}

#[inline]
pub(crate) fn last_word_mask(width: usize) -> u64 {
    match width % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl std::fmt::Debug for BinaryGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinaryGrid {}x{}", self.height, self.width)?;
        if self.height * self.width <= 64 * 64 {
            for i in 0..self.height {
                let line: String = (0..self.width)
                    .map(|j| {
                        if self.get_unchecked_bounds(i, j) {
                            '#'
                        } else {
                            '.'
                        }
                    })
                    .collect();
                writeln!(f, "{line}")?;
            }
        }
        Ok(())
    }
}
