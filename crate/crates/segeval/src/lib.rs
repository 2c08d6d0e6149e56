//! File formats, cohort manifests, reports and the command line for
//! `segeval-core`.

pub mod cli;
pub mod eval;
pub mod manifest;
pub mod nifti;
pub mod report;

pub use nifti::{decode_nifti, encode_nifti, read_nifti, write_nifti, NiftiError};
