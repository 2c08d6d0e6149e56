//! Volumetric segmentation evaluation without the standard library.
//!
//! Everything here works on in-memory [`Volume`]s and [`Mask`]s: voxel
//! overlap counts, exact anisotropic Euclidean distance transforms and the
//! surface-distance metrics built on them, synthetic phantoms, and the paired
//! statistics used to compare two segmentation methods over a cohort. File
//! formats and the command line live in the `segeval` crate.
//!
//! Geometry is always voxel index × spacing (mm). Voxels are stored x-fastest.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod conventions;
mod error;
mod grid;
pub mod overlap;
pub mod phantom;
mod rng;
pub mod stats;
pub mod surface;

pub use error::{Error, Result};
pub use grid::{check_grid_compat, extract_mask, Dims, Grid, LabelSelector, Mask, Spacing, Volume, VoxelData};
