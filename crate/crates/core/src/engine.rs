//! Synchronous evolution under a linear rule.
//!
//! `step_naive` evaluates every cell independently from the boundary-aware
//! accessor and serves as the reference. `step_packed` produces the same
//! generation by XOR-accumulating one shifted copy of a source row per rule
//! term directly into the packed output words: with LSB-first packing, reading
//! the neighbor at `j + dj` is a logical right shift of the row by `dj` bits
//! (left shift for negative `dj`). Null boundaries shift in zeros and drop
//! rows that fall off the lattice; periodic boundaries rotate within the row
//! width and wrap the row index.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{last_word_mask, BinaryGrid, BoundaryCondition, WORD_BITS};
use crate::rules::{LinearRule, NeighborOffset};

/// Words of output work below which rows are not split across threads.
const PAR_GRAIN_WORDS: usize = 1 << 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepConfig {
    pub rule: LinearRule,
    pub boundary: BoundaryCondition,
    iterations: u32,
}

impl StepConfig {
    pub fn new(rule: LinearRule, boundary: BoundaryCondition, iterations: u32) -> Result<Self> {
        if iterations == 0 {
            return Err(Error::Usage("iterations must be at least 1".into()));
        }
        Ok(StepConfig {
            rule,
            boundary,
            iterations,
        })
    }

    /// One step under a null boundary.
    pub fn single(rule: LinearRule) -> Self {
        StepConfig {
            rule,
            boundary: BoundaryCondition::Null,
            iterations: 1,
        }
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }
}

/// Per-cell reference evaluator.
pub fn step_naive(g: &BinaryGrid, rule: LinearRule, bc: BoundaryCondition) -> BinaryGrid {
    let offsets: Vec<NeighborOffset> = rule.offsets().collect();
    BinaryGrid::from_fn(g.height(), g.width(), |i, j| {
        offsets.iter().fold(false, |acc, o| {
            acc ^ g.get(i as isize + o.di as isize, j as isize + o.dj as isize, bc)
        })
    })
    .expect("dimensions come from an existing grid")
}

/// Word-parallel evaluator; bit-identical to [`step_naive`].
pub fn step_packed(g: &BinaryGrid, rule: LinearRule, bc: BoundaryCondition) -> BinaryGrid {
    let (height, width) = g.dims();
    let wpr = g.words_per_row();
    let mask = last_word_mask(width);
    let offsets: Vec<NeighborOffset> = rule.offsets().collect();
    let mut out = BinaryGrid::zeros(height, width).expect("dimensions come from an existing grid");
    if offsets.is_empty() {
        return out;
    }

    let fill_row = |(i, row): (usize, &mut [u64])| {
        for o in &offsets {
            let src_i = i as isize + o.di as isize;
            let src = match bc {
                BoundaryCondition::Null if src_i < 0 || src_i >= height as isize => continue,
                BoundaryCondition::Null => g.row(src_i as usize),
                BoundaryCondition::Periodic => g.row(src_i.rem_euclid(height as isize) as usize),
            };
            xor_shifted_row(row, src, o.dj as isize, width, bc);
        }
        row[wpr - 1] &= mask;
    };

    let min_rows = (PAR_GRAIN_WORDS / (wpr * offsets.len())).max(1);
    if height <= min_rows {
        out.words_mut()
            .chunks_exact_mut(wpr)
            .enumerate()
            .for_each(fill_row);
    } else {
        out.words_mut()
            .par_chunks_exact_mut(wpr)
            .enumerate()
            .with_min_len(min_rows)
            .for_each(fill_row);
    }
    out
}

/// Applies `cfg.iterations()` successive packed steps.
pub fn run(g: &BinaryGrid, cfg: &StepConfig) -> BinaryGrid {
    let mut state = step_packed(g, cfg.rule, cfg.boundary);
    for _ in 1..cfg.iterations {
        state = step_packed(&state, cfg.rule, cfg.boundary);
    }
    state
}

/// `out[j] ^= src[j + dj]` for every column `j` of a `width`-bit row.
/// Padding bits of `out` may be dirtied; callers mask afterwards.
fn xor_shifted_row(out: &mut [u64], src: &[u64], dj: isize, width: usize, bc: BoundaryCondition) {
    match bc {
        BoundaryCondition::Null => match dj {
            0 => xor_into(out, src),
            d if d > 0 => xor_shr(out, src, d as usize),
            d => xor_shl(out, src, d.unsigned_abs()),
        },
        BoundaryCondition::Periodic => {
            let s = dj.rem_euclid(width as isize) as usize;
            if s == 0 {
                xor_into(out, src);
            } else {
                // The two halves of the rotation land on disjoint columns.
                xor_shr(out, src, s);
                xor_shl(out, src, width - s);
            }
        }
    }
}

#[inline]
fn xor_into(out: &mut [u64], src: &[u64]) {
    for (o, s) in out.iter_mut().zip(src) {
        *o ^= s;
    }
}

/// `out[j] ^= src[j + s]`; bits beyond the source read as zero.
#[inline]
fn xor_shr(out: &mut [u64], src: &[u64], s: usize) {
    let n = src.len();
    let (q, r) = (s / WORD_BITS, s % WORD_BITS);
    if q >= n {
        return;
    }
    if r == 0 {
        for k in 0..n - q {
            out[k] ^= src[k + q];
        }
        return;
    }
    for k in 0..n - q {
        let lo = src[k + q] >> r;
        let hi = if k + q + 1 < n {
            src[k + q + 1] << (WORD_BITS - r)
        } else {
            0
        };
        out[k] ^= lo | hi;
    }
}

/// `out[j] ^= src[j - s]`; bits before column 0 read as zero.
#[inline]
fn xor_shl(out: &mut [u64], src: &[u64], s: usize) {
    let n = src.len();
    let (q, r) = (s / WORD_BITS, s % WORD_BITS);
    if q >= n {
        return;
    }
    if r == 0 {
        for k in q..n {
            out[k] ^= src[k - q];
        }
        return;
    }
    out[q] ^= src[0] << r;
    for k in q + 1..n {
        out[k] ^= (src[k - q] << r) | (src[k - q - 1] >> (WORD_BITS - r));
    }
}
