//! Voxel overlap between a manual reference mask and an automated test mask.

use crate::error::{Error, Result};
use crate::grid::{check_grid_compat, Mask};

/// Voxel tallies for one (reference, test) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapMetrics {
    pub dice: f64,
    pub jaccard: f64,
    pub precision: f64,
    pub recall: f64,
    pub volume_similarity: f64,
    /// The test mask is empty, so precision was 0/0 and is reported as 0.
    pub precision_undefined: bool,
    /// The reference mask is empty, so recall was 0/0 and is reported as 0.
    pub recall_undefined: bool,
}

pub fn confusion_counts(reference: &Mask, test: &Mask) -> Result<ConfusionCounts> {
    check_grid_compat(reference, test)?;
    let mut c = ConfusionCounts::default();
    for (&r, &t) in reference.occupancy().iter().zip(test.occupancy()) {
        match (r, t) {
            (true, true) => c.tp += 1,
            (false, true) => c.fp += 1,
            (true, false) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

pub fn overlap_metrics(c: &ConfusionCounts) -> Result<OverlapMetrics> {
    let (tp, fp, fn_) = (c.tp as f64, c.fp as f64, c.fn_ as f64);
    if c.tp + c.fp + c.fn_ == 0 {
        return Err(Error::BothEmpty);
    }
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let dice_den = 2.0 * tp + fp + fn_;
    Ok(OverlapMetrics {
        dice: 2.0 * tp / dice_den,
        jaccard: tp / (tp + fp + fn_),
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fn_),
        volume_similarity: 1.0 - (fp - fn_).abs() / dice_den,
        precision_undefined: c.tp + c.fp == 0,
        recall_undefined: c.tp + c.fn_ == 0,
    })
}

/// Convenience: counts then metrics.
pub fn compare_masks(reference: &Mask, test: &Mask) -> Result<OverlapMetrics> {
    overlap_metrics(&confusion_counts(reference, test)?)
}
