use thiserror::Error;

use crate::grid::{Dims, Spacing};

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grid mismatch: {a:?} vs {b:?} voxels")]
    GridMismatch { a: Dims, b: Dims },
    #[error("spacing mismatch: {a:?} vs {b:?} mm")]
    SpacingMismatch { a: Spacing, b: Spacing },
    #[error("invalid dimensions {0:?}: every extent must be at least 1")]
    InvalidDims(Dims),
    #[error("invalid spacing {0:?}: every component must be finite and positive")]
    InvalidSpacing(Spacing),
    #[error("voxel data has {actual} elements, grid needs {expected}")]
    DataLength { expected: usize, actual: usize },
    #[error("exact-label selection requires integer voxel data")]
    SelectorTypeMismatch,
    #[error("index or center lies outside the grid")]
    OutOfBounds,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("mask is empty")]
    EmptyMask,
    #[error("surface set is empty")]
    EmptySurface,
    #[error("both segmentations are empty")]
    BothEmpty,
    #[error("distance list is empty")]
    EmptyDistances,
    #[error("paired samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("at least two paired cases are required, got {0}")]
    TooFewCases(usize),
    #[error("paired differences have zero variance")]
    DegenerateVariance,
    #[error("all paired differences are zero")]
    AllZeroDifferences,
    #[error("percent difference against a zero baseline")]
    ZeroBaseline,
    #[error("no case is present for both methods")]
    NoPairedCases,
    #[error("at least two delineations are required in the selected grouping")]
    TooFewDelineations,
}
