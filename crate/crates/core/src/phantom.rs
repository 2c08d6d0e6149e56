//! Synthetic masks with analytically known properties.
//!
//! These stand in for real delineations in tests and in the `phantom` CLI:
//! boxes and ellipsoids as references, and translation, ball dilation and
//! seeded voxel flips to fabricate the output of an imperfect method.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{Dims, Grid, Mask, Spacing};
use crate::rng::Uniform;
use crate::surface::is_boundary_voxel;

/// Integer offsets within a Euclidean ball, radius in isotropic index units.
#[derive(Debug, Clone, PartialEq)]
pub struct BallKernel {
    radius_vox: f64,
    offsets: Vec<[i64; 3]>,
}

impl BallKernel {
    pub fn new(radius_vox: f64) -> Result<Self> {
        if !radius_vox.is_finite() || radius_vox < 0.0 {
            return Err(Error::InvalidArgument("ball radius must be finite and non-negative"));
        }
        let reach = libm::floor(radius_vox) as i64;
        let r2 = radius_vox * radius_vox;
        let mut offsets = Vec::new();
        for k in -reach..=reach {
            for j in -reach..=reach {
                for i in -reach..=reach {
                    if ((i * i + j * j + k * k) as f64) <= r2 {
                        offsets.push([i, j, k]);
                    }
                }
            }
        }
        Ok(Self { radius_vox, offsets })
    }

    pub fn radius_vox(&self) -> f64 {
        self.radius_vox
    }

    pub fn offsets(&self) -> &[[i64; 3]] {
        &self.offsets
    }
}

/// Closed index box `lo..=hi`.
pub fn gen_box(dims: Dims, spacing: Spacing, lo: [usize; 3], hi: [usize; 3]) -> Result<Mask> {
    let grid = Grid::new(dims, spacing)?;
    if (0..3).any(|a| lo[a] > hi[a] || hi[a] >= dims[a]) {
        return Err(Error::OutOfBounds);
    }
    Ok(Mask::from_fn(grid, |p| (0..3).all(|a| lo[a] <= p[a] && p[a] <= hi[a])))
}

/// Axis-aligned ellipsoid; `center` is in (fractional) voxel indices and must
/// lie within `[0, n - 1]` on every axis, `radii_mm` are semi-axes in mm.
pub fn gen_ellipsoid(dims: Dims, spacing: Spacing, center: [f64; 3], radii_mm: [f64; 3]) -> Result<Mask> {
    let grid = Grid::new(dims, spacing)?;
    if radii_mm.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(Error::InvalidArgument("ellipsoid radii must be finite and positive"));
    }
    if (0..3).any(|a| !center[a].is_finite() || center[a] < 0.0 || center[a] > (dims[a] - 1) as f64) {
        return Err(Error::OutOfBounds);
    }
    Ok(Mask::from_fn(grid, |p| {
        let mut acc = 0.0;
        for a in 0..3 {
            let t = (p[a] as f64 - center[a]) * spacing[a] / radii_mm[a];
            acc += t * t;
        }
        acc <= 1.0
    }))
}

/// Shifts every voxel by `offset`; voxels leaving the grid are dropped.
pub fn translate(m: &Mask, offset: [i64; 3]) -> Mask {
    let mut out = Mask::empty(*m.grid());
    for p in m.voxels() {
        let q = [p[0] as i64 + offset[0], p[1] as i64 + offset[1], p[2] as i64 + offset[2]];
        if m.grid().contains(q) {
            out.set([q[0] as usize, q[1] as usize, q[2] as usize], true);
        }
    }
    out
}

/// Minkowski sum with [`BallKernel`]`(r_vox)`, clipped at the grid.
pub fn dilate_ball(m: &Mask, r_vox: f64) -> Result<Mask> {
    let kernel = BallKernel::new(r_vox)?;
    let grid = *m.grid();
    let mut out = m.clone();
    // The voxel of `m` nearest to any added voxel always has a background
    // face neighbour, so stamping from those voxels alone is exact.
    for p in m.voxels() {
        if !is_boundary_voxel(m, p) {
            continue;
        }
        for o in kernel.offsets() {
            let q = [p[0] as i64 + o[0], p[1] as i64 + o[1], p[2] as i64 + o[2]];
            if grid.contains(q) {
                out.set([q[0] as usize, q[1] as usize, q[2] as usize], true);
            }
        }
    }
    Ok(out)
}

/// Inverts each voxel independently with probability `rate`.
///
/// Deterministic for a given `(mask, rate, seed)`; see
/// [`conventions::NOISE_PRNG`](crate::conventions::NOISE_PRNG) for the exact
/// generator and draw order.
pub fn flip_noise(m: &Mask, rate: f64, seed: u64) -> Result<Mask> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidArgument("flip rate must lie in [0, 1]"));
    }
    let mut rng = Uniform::new(seed);
    let occupancy = m.occupancy().iter().map(|&b| b ^ (rng.next_f64() < rate)).collect();
    Mask::from_occupancy(*m.grid(), occupancy)
}

/// Mask volume in mm³.
pub fn volume_mm3(m: &Mask) -> f64 {
    m.count() as f64 * m.grid().voxel_volume()
}

/// Left/right volumetric asymmetry in percent, `200 (L - R) / (L + R)`.
pub fn asymmetry_index(vol_left: f64, vol_right: f64) -> Result<f64> {
    let total = vol_left + vol_right;
    if total <= 0.0 {
        return Err(Error::BothEmpty);
    }
    Ok(200.0 * (vol_left - vol_right) / total)
}
