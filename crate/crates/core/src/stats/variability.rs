use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Mask;
use crate::overlap::compare_masks;
use crate::phantom::volume_mm3;

/// One delineation of a structure by one rater in one session.
#[derive(Debug, Clone)]
pub struct Delineation {
    pub rater: String,
    pub session: String,
    pub mask: Mask,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grouping {
    /// Same rater, different sessions.
    IntraRater,
    /// Different raters.
    InterRater,
}

impl Grouping {
    pub fn name(self) -> &'static str {
        match self {
            Grouping::IntraRater => "intra_rater",
            Grouping::InterRater => "inter_rater",
        }
    }

    fn qualifies(self, a: &Delineation, b: &Delineation) -> bool {
        match self {
            Grouping::IntraRater => a.rater == b.rater && a.session != b.session,
            Grouping::InterRater => a.rater != b.rater,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariabilityReport {
    pub grouping: Grouping,
    pub mean_pairwise_dice: f64,
    /// Sample coefficient of variation of the volumes of every delineation
    /// that takes part in at least one qualifying pair, in percent.
    pub volume_cv_percent: f64,
    pub n_pairs: usize,
}

pub fn rater_variability(delineations: &[Delineation], grouping: Grouping) -> Result<VariabilityReport> {
    let mut used = alloc::vec![false; delineations.len()];
    let mut dice_sum = 0.0;
    let mut n_pairs = 0;
    for i in 0..delineations.len() {
        for j in i + 1..delineations.len() {
            if !grouping.qualifies(&delineations[i], &delineations[j]) {
                continue;
            }
            dice_sum += compare_masks(&delineations[i].mask, &delineations[j].mask)?.dice;
            n_pairs += 1;
            used[i] = true;
            used[j] = true;
        }
    }
    if n_pairs == 0 {
        return Err(Error::TooFewDelineations);
    }
    let volumes: Vec<f64> =
        delineations.iter().zip(&used).filter(|(_, &u)| u).map(|(d, _)| volume_mm3(&d.mask)).collect();
    let n = volumes.len() as f64;
    let mean = volumes.iter().sum::<f64>() / n;
    let var = volumes.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    let cv = if mean > 0.0 { 100.0 * libm::sqrt(var) / mean } else { 0.0 };
    Ok(VariabilityReport { grouping, mean_pairwise_dice: dice_sum / n_pairs as f64, volume_cv_percent: cv, n_pairs })
}
