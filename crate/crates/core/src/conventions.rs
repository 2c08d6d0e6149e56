//! Metric and test conventions, emitted verbatim into report metadata so
//! every number in a report can be reproduced.

pub const REFERENCE: &str = "the first mask of every pair is the manual reference; the second is the method under test";
pub const PRECISION: &str = "precision = TP/(TP+FP), recall = TP/(TP+FN), with the manual mask as reference; 0/0 is reported as 0 with a warning";
pub const BOTH_EMPTY: &str = "a pair in which both masks are empty is an error, not dice = 1";
pub const BOUNDARY: &str = "boundary voxels are mask voxels with at least one of their 6 face neighbours outside the mask; the grid border counts as background";
pub const SURFACE_DISTANCE: &str = "distances are Euclidean, in mm, between boundary voxel centres of the two masks (surface to surface), computed with an exact separable distance transform";
pub const HAUSDORFF: &str = "hausdorff = maximum over both directed surface distance sets";
pub const PERCENTILE: &str = "hd95 = nearest-rank 95th percentile of the pooled bidirectional distances (1-based index ceil(0.95 n), no interpolation)";
pub const RMS: &str =
    "mean_sd and rms are taken over the pooled bidirectional distance set, not the maximum of the two directed values";
pub const PAIRED_T: &str = "paired_t: two-sided paired Student t test on x - y with sample sd (n - 1), p from the regularized incomplete beta function";
pub const WILCOXON: &str = "wilcoxon: two-sided signed-rank test on x - y; zero differences dropped; midranks for ties; exact enumeration of sign patterns when n_effective <= 20 (wilcoxon_exact), otherwise normal approximation with tie-corrected variance and 0.5 continuity correction (wilcoxon_normal)";
pub const PERCENT_DIFFERENCE: &str = "percent_diff = 100 (mean_a - mean_b) / mean_b, baseline is method b";
pub const NOISE_PRNG: &str = "phantom noise: ChaCha8 seeded with seed_from_u64(seed); voxels visited x-fastest, one u64 per voxel, top 53 bits / 2^53 < rate flips the voxel";

/// All conventions as (key, text) pairs in a fixed order.
pub const ALL: &[(&str, &str)] = &[
    ("reference", REFERENCE),
    ("precision", PRECISION),
    ("both_empty", BOTH_EMPTY),
    ("boundary", BOUNDARY),
    ("surface_distance", SURFACE_DISTANCE),
    ("hausdorff", HAUSDORFF),
    ("percentile", PERCENTILE),
    ("rms", RMS),
    ("paired_t", PAIRED_T),
    ("wilcoxon", WILCOXON),
    ("percent_difference", PERCENT_DIFFERENCE),
    ("noise_prng", NOISE_PRNG),
];
