use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::BinaryGrid;

/// Tolerance-matched agreement between a predicted and a reference edge map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeComparison {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub tolerance: usize,
}

impl EdgeComparison {
    /// Derives the ratios from raw counts. Empty denominators give precision
    /// and recall of 1; the F-measure is 0 whenever precision + recall is 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tolerance: usize) -> Self {
        let ratio = |num: usize, den: usize| {
            if den == 0 {
                1.0
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f_measure = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        EdgeComparison {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision,
            recall,
            f_measure,
            tolerance,
        }
    }
}

fn check_dims(a: &BinaryGrid, b: &BinaryGrid) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::Dimension(format!(
            "edge maps differ in size: {}x{} vs {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        )));
    }
    Ok(())
}

/// Greedy one-to-one matching within Chebyshev `tolerance`.
///
/// Candidate (predicted, reference) pairs are claimed in order of distance,
/// then by the smaller and larger raster index of the two pixels. The order
/// does not depend on which map is called predicted, so swapping the
/// arguments swaps precision and recall exactly.
pub fn compare(
    predicted: &BinaryGrid,
    reference: &BinaryGrid,
    tolerance: usize,
) -> Result<EdgeComparison> {
    check_dims(predicted, reference)?;
    let tp = if tolerance == 0 {
        predicted
            .ones()
            .filter(|&(i, j)| reference.at(i, j))
            .count()
    } else {
        greedy_matches(predicted, reference, tolerance)
    };
    let fp = predicted.popcount() - tp;
    let fn_ = reference.popcount() - tp;
    Ok(EdgeComparison::from_counts(tp, fp, fn_, tolerance))
}

fn greedy_matches(predicted: &BinaryGrid, reference: &BinaryGrid, tolerance: usize) -> usize {
    let (h, w) = predicted.dims();
    // (distance, lower index, higher index, predicted index, reference index)
    let mut pairs = Vec::new();
    for (i, j) in predicted.ones() {
        let p = i * w + j;
        for ri in i.saturating_sub(tolerance)..=(i + tolerance).min(h - 1) {
            for rj in j.saturating_sub(tolerance)..=(j + tolerance).min(w - 1) {
                if reference.at(ri, rj) {
                    let r = ri * w + rj;
                    let d = i.abs_diff(ri).max(j.abs_diff(rj));
                    pairs.push((d, p.min(r), p.max(r), p, r));
                }
            }
        }
    }
    pairs.sort_unstable();

    let mut used_p = vec![false; h * w];
    let mut used_r = vec![false; h * w];
    let mut tp = 0;
    for (_, _, _, p, r) in pairs {
        if !used_p[p] && !used_r[r] {
            used_p[p] = true;
            used_r[r] = true;
            tp += 1;
        }
    }
    tp
}

/// Fraction of predicted pixels, at least `margin` cells from every grid
/// border, that have some reference pixel within Chebyshev `tolerance`.
/// Reference pixels may be shared; an empty selection scores 1.
pub fn localization_precision(
    predicted: &BinaryGrid,
    reference: &BinaryGrid,
    tolerance: usize,
    margin: usize,
) -> Result<f64> {
    check_dims(predicted, reference)?;
    let (h, w) = predicted.dims();
    let interior =
        |i: usize, j: usize| i >= margin && j >= margin && i + margin < h && j + margin < w;
    let (mut hit, mut total) = (0usize, 0usize);
    for (i, j) in predicted.ones().filter(|&(i, j)| interior(i, j)) {
        total += 1;
        let near = (i.saturating_sub(tolerance)..=(i + tolerance).min(h - 1)).any(|ri| {
            (j.saturating_sub(tolerance)..=(j + tolerance).min(w - 1))
                .any(|rj| reference.at(ri, rj))
        });
        hit += near as usize;
    }
    Ok(if total == 0 {
        1.0
    } else {
        hit as f64 / total as f64
    })
}
