use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Voxel counts along x, y, z.
pub type Dims = [usize; 3];
/// Voxel size along x, y, z in millimeters.
pub type Spacing = [f64; 3];

/// Relative tolerance used when comparing spacings of two grids.
pub const SPACING_REL_TOL: f64 = 1e-5;

/// Voxel geometry shared by volumes and masks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dims: Dims,
    spacing: Spacing,
}

impl Grid {
    pub fn new(dims: Dims, spacing: Spacing) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidDims(dims));
        }
        if dims.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n)).is_none() {
            return Err(Error::InvalidDims(dims));
        }
        if spacing.iter().any(|s| !s.is_finite() || *s <= 0.0) {
            return Err(Error::InvalidSpacing(spacing));
        }
        Ok(Self { dims, spacing })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    /// Total voxel count.
    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn voxel_volume(&self) -> f64 {
        self.spacing[0] * self.spacing[1] * self.spacing[2]
    }

    #[inline]
    pub fn index(&self, [x, y, z]: [usize; 3]) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let x = idx % self.dims[0];
        let rest = idx / self.dims[0];
        [x, rest % self.dims[1], rest / self.dims[1]]
    }

    #[inline]
    pub fn contains(&self, p: [i64; 3]) -> bool {
        (0..3).all(|a| p[a] >= 0 && (p[a] as u64) < self.dims[a] as u64)
    }

    pub fn with_spacing(&self, spacing: Spacing) -> Result<Self> {
        Self::new(self.dims, spacing)
    }
}

/// Typed voxel payload, x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub enum VoxelData {
    U8(Vec<u8>),
    I16(Vec<i16>),
    I32(Vec<i32>),
    F32(Vec<f32>),
}

impl VoxelData {
    pub fn len(&self) -> usize {
        match self {
            VoxelData::U8(v) => v.len(),
            VoxelData::I16(v) => v.len(),
            VoxelData::I32(v) => v.len(),
            VoxelData::F32(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_integer(&self) -> bool {
        !matches!(self, VoxelData::F32(_))
    }
}

/// Dense scalar voxel grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume {
    grid: Grid,
    data: VoxelData,
}

impl Volume {
    pub fn new(grid: Grid, data: VoxelData) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::DataLength { expected: grid.len(), actual: data.len() });
        }
        Ok(Self { grid, data })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &VoxelData {
        &self.data
    }

    pub fn into_data(self) -> VoxelData {
        self.data
    }
}

/// Binary occupancy grid; one delineation of one structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    grid: Grid,
    occupancy: Vec<bool>,
}

impl Mask {
    pub fn empty(grid: Grid) -> Self {
        Self { grid, occupancy: vec![false; grid.len()] }
    }

    pub fn from_occupancy(grid: Grid, occupancy: Vec<bool>) -> Result<Self> {
        if occupancy.len() != grid.len() {
            return Err(Error::DataLength { expected: grid.len(), actual: occupancy.len() });
        }
        Ok(Self { grid, occupancy })
    }

    /// Builds a mask from a predicate over voxel indices.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([usize; 3]) -> bool) -> Self {
        let [nx, ny, nz] = grid.dims();
        let mut occupancy = Vec::with_capacity(grid.len());
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    occupancy.push(f([x, y, z]));
                }
            }
        }
        Self { grid, occupancy }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dims(&self) -> Dims {
        self.grid.dims()
    }

    pub fn spacing(&self) -> Spacing {
        self.grid.spacing()
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    pub fn get(&self, p: [usize; 3]) -> bool {
        self.occupancy[self.grid.index(p)]
    }

    pub fn set(&mut self, p: [usize; 3], value: bool) {
        let i = self.grid.index(p);
        self.occupancy[i] = value;
    }

    /// Returns the voxel at a signed index, treating everything outside the
    /// grid as background.
    #[inline]
    pub fn get_signed(&self, p: [i64; 3]) -> bool {
        self.grid.contains(p) && self.get([p[0] as usize, p[1] as usize, p[2] as usize])
    }

    pub fn count(&self) -> usize {
        self.occupancy.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.occupancy.iter().any(|&b| b)
    }

    /// Indices of all set voxels, in storage order.
    pub fn voxels(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        self.occupancy.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| self.grid.coords(i))
    }

    /// Same occupancy, new spacing.
    pub fn with_spacing(&self, spacing: Spacing) -> Result<Self> {
        Ok(Self { grid: self.grid.with_spacing(spacing)?, occupancy: self.occupancy.clone() })
    }

    /// 0/1 unsigned 8-bit volume with the same geometry.
    pub fn to_volume(&self) -> Volume {
        let data = self.occupancy.iter().map(|&b| b as u8).collect();
        Volume { grid: self.grid, data: VoxelData::U8(data) }
    }
}

/// Which voxels of a label volume form a mask.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LabelSelector {
    /// `data == value`; integer data only.
    ExactLabel(i64),
    /// `data >= min`.
    Threshold(f64),
}

pub fn extract_mask(v: &Volume, sel: LabelSelector) -> Result<Mask> {
    let occupancy: Vec<bool> = match (sel, v.data()) {
        (LabelSelector::ExactLabel(_), VoxelData::F32(_)) => return Err(Error::SelectorTypeMismatch),
        (LabelSelector::ExactLabel(l), VoxelData::U8(d)) => d.iter().map(|&x| i64::from(x) == l).collect(),
        (LabelSelector::ExactLabel(l), VoxelData::I16(d)) => d.iter().map(|&x| i64::from(x) == l).collect(),
        (LabelSelector::ExactLabel(l), VoxelData::I32(d)) => d.iter().map(|&x| i64::from(x) == l).collect(),
        (LabelSelector::Threshold(t), VoxelData::U8(d)) => d.iter().map(|&x| f64::from(x) >= t).collect(),
        (LabelSelector::Threshold(t), VoxelData::I16(d)) => d.iter().map(|&x| f64::from(x) >= t).collect(),
        (LabelSelector::Threshold(t), VoxelData::I32(d)) => d.iter().map(|&x| f64::from(x) >= t).collect(),
        (LabelSelector::Threshold(t), VoxelData::F32(d)) => d.iter().map(|&x| f64::from(x) >= t).collect(),
    };
    Ok(Mask { grid: *v.grid(), occupancy })
}

/// Succeeds iff both masks share dims and their spacings agree per axis
/// within [`SPACING_REL_TOL`].
pub fn check_grid_compat(a: &Mask, b: &Mask) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::GridMismatch { a: a.dims(), b: b.dims() });
    }
    let (sa, sb) = (a.spacing(), b.spacing());
    for axis in 0..3 {
        let scale = libm::fmax(sa[axis].abs(), sb[axis].abs());
        if (sa[axis] - sb[axis]).abs() > SPACING_REL_TOL * scale {
            return Err(Error::SpacingMismatch { a: sa, b: sb });
        }
    }
    Ok(())
}
