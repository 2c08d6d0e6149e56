//! One (reference, test) evaluation: overlap, surface distances, volumes.

use segeval_core::overlap::{compare_masks, OverlapMetrics};
use segeval_core::phantom::volume_mm3;
use segeval_core::stats::{Metric, MetricRecord};
use segeval_core::surface::{compare_surfaces, DistanceSummary};
use segeval_core::{Error, Mask};

#[derive(Debug, Clone, PartialEq)]
pub struct PairEvaluation {
    pub overlap: OverlapMetrics,
    /// `None` when one of the masks is empty.
    pub distances: Option<DistanceSummary>,
    pub reference_volume_mm3: f64,
    pub test_volume_mm3: f64,
    pub warnings: Vec<String>,
}

pub fn evaluate_pair(reference: &Mask, test: &Mask) -> Result<PairEvaluation, Error> {
    let overlap = compare_masks(reference, test)?;
    let mut warnings = Vec::new();
    if overlap.precision_undefined {
        warnings.push("test mask is empty: precision is 0/0, reported as 0".to_string());
    }
    if overlap.recall_undefined {
        warnings.push("reference mask is empty: recall is 0/0, reported as 0".to_string());
    }
    let distances = match compare_surfaces(reference, test) {
        Ok(d) => Some(d),
        Err(Error::EmptyMask) => {
            warnings.push("a mask is empty: surface distances omitted".to_string());
            None
        }
        Err(e) => return Err(e),
    };
    Ok(PairEvaluation {
        overlap,
        distances,
        reference_volume_mm3: volume_mm3(reference),
        test_volume_mm3: volume_mm3(test),
        warnings,
    })
}

impl PairEvaluation {
    /// Metric values for the test mask, in [`Metric::ALL`] order.
    pub fn metric_values(&self) -> Vec<(Metric, f64)> {
        let o = &self.overlap;
        let mut out = vec![
            (Metric::Dice, o.dice),
            (Metric::Jaccard, o.jaccard),
            (Metric::Precision, o.precision),
            (Metric::Recall, o.recall),
            (Metric::VolumeSimilarity, o.volume_similarity),
        ];
        if let Some(d) = &self.distances {
            out.extend([
                (Metric::Hausdorff, d.hausdorff_mm),
                (Metric::Hd95, d.hd95_mm),
                (Metric::MeanSd, d.mean_sd_mm),
                (Metric::Rms, d.rms_mm),
            ]);
        }
        out.push((Metric::VolumeMm3, self.test_volume_mm3));
        out
    }

    pub fn records(&self, case_id: &str, method: &str) -> Vec<MetricRecord> {
        self.metric_values()
            .into_iter()
            .map(|(metric, value)| MetricRecord {
                case_id: case_id.to_string(),
                method: method.to_string(),
                metric,
                value,
            })
            .collect()
    }
}
