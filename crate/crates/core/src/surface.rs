//! Boundary extraction, exact Euclidean distance transforms and the surface
//! distance metrics (Hausdorff, HD95, mean and RMS surface distance) in mm.
//!
//! The distance transform is the separable lower-envelope-of-parabolas
//! construction: one 1D pass per axis over squared distances, each pass using
//! that axis's squared spacing as the parabola weight. Squared distances are
//! accumulated in `f64` and the square root is taken once at the end, so on
//! integer-aligned grids the squared distances are exact.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{check_grid_compat, Dims, Grid, Mask, Spacing};

const NEIGHBOURS_6: [[i64; 3]; 6] = [[-1, 0, 0], [1, 0, 0], [0, -1, 0], [0, 1, 0], [0, 0, -1], [0, 0, 1]];

/// Boundary voxels of one mask.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSet {
    grid: Grid,
    voxels: Vec<[usize; 3]>,
}

impl SurfaceSet {
    /// Builds a site set directly; every voxel must lie inside `grid`.
    pub fn from_voxels(grid: Grid, voxels: Vec<[usize; 3]>) -> Result<Self> {
        let dims = grid.dims();
        if voxels.iter().any(|p| (0..3).any(|a| p[a] >= dims[a])) {
            return Err(Error::OutOfBounds);
        }
        Ok(Self { grid, voxels })
    }

    pub fn voxels(&self) -> &[[usize; 3]] {
        &self.voxels
    }

    pub fn spacing(&self) -> Spacing {
        self.grid.spacing()
    }

    pub fn len(&self) -> usize {
        self.voxels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voxels.is_empty()
    }
}

/// Per-voxel Euclidean distance (mm) to the nearest site.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    grid: Grid,
    values: Vec<f64>,
}

impl DistanceField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, p: [usize; 3]) -> f64 {
        self.values[self.grid.index(p)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSummary {
    pub hausdorff_mm: f64,
    pub hd95_mm: f64,
    pub mean_sd_mm: f64,
    pub rms_mm: f64,
    pub n_ref_surface: usize,
    pub n_test_surface: usize,
}

/// True if `p` is set and has a face neighbour outside the mask or the grid.
#[inline]
pub fn is_boundary_voxel(m: &Mask, p: [usize; 3]) -> bool {
    if !m.get(p) {
        return false;
    }
    let p = [p[0] as i64, p[1] as i64, p[2] as i64];
    NEIGHBOURS_6.iter().any(|o| !m.get_signed([p[0] + o[0], p[1] + o[1], p[2] + o[2]]))
}

pub fn boundary(m: &Mask) -> Result<SurfaceSet> {
    let voxels: Vec<_> = m.voxels().filter(|&p| is_boundary_voxel(m, p)).collect();
    if voxels.is_empty() {
        return Err(Error::EmptyMask);
    }
    Ok(SurfaceSet { grid: *m.grid(), voxels })
}

/// Exact distance transform of `s` over the full grid `dims` × `spacing`.
pub fn edt(s: &SurfaceSet, dims: Dims, spacing: Spacing) -> Result<DistanceField> {
    let grid = Grid::new(dims, spacing)?;
    if s.is_empty() {
        return Err(Error::EmptySurface);
    }
    if s.voxels.iter().any(|p| (0..3).any(|a| p[a] >= dims[a])) {
        return Err(Error::OutOfBounds);
    }
    let mut values = squared_edt_in_box(&s.voxels, [0; 3], dims, spacing);
    for v in values.iter_mut() {
        *v = libm::sqrt(*v);
    }
    Ok(DistanceField { grid, values })
}

/// Squared distances to `sites` over the sub-box starting at `origin` with
/// extent `ext`. Exact as long as the box contains every site and every
/// voxel later queried: each separable pass only needs the lines that carry
/// sites.
fn squared_edt_in_box(sites: &[[usize; 3]], origin: [usize; 3], ext: Dims, spacing: Spacing) -> Vec<f64> {
    let [nx, ny, nz] = ext;
    let mut f = vec![f64::INFINITY; nx * ny * nz];
    for p in sites {
        let (x, y, z) = (p[0] - origin[0], p[1] - origin[1], p[2] - origin[2]);
        f[x + nx * (y + ny * z)] = 0.0;
    }

    let longest = nx.max(ny).max(nz);
    let mut env = Envelope::with_capacity(longest);
    let mut line = vec![0.0; longest];

    let strides = [1, nx, nx * ny];
    for axis in 0..3 {
        let n = ext[axis];
        if n == 1 {
            continue;
        }
        let w = spacing[axis] * spacing[axis];
        let stride = strides[axis];
        let (oa, ob) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for b in 0..ext[ob] {
            for a in 0..ext[oa] {
                let start = a * strides[oa] + b * strides[ob];
                for (i, slot) in line[..n].iter_mut().enumerate() {
                    *slot = f[start + i * stride];
                }
                if env.transform(&mut line[..n], w) {
                    for (i, &v) in line[..n].iter().enumerate() {
                        f[start + i * stride] = v;
                    }
                }
            }
        }
    }
    f
}

/// Scratch space for the 1D lower envelope of parabolas
/// `f(q) + w (p - q)^2`.
struct Envelope {
    vertices: Vec<usize>,
    heights: Vec<f64>,
    bounds: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Self { vertices: Vec::with_capacity(n), heights: Vec::with_capacity(n), bounds: Vec::with_capacity(n + 1) }
    }

    /// Replaces `line` with its weighted squared distance transform. Returns
    /// false (leaving `line` untouched) if the line holds no finite value.
    fn transform(&mut self, line: &mut [f64], w: f64) -> bool {
        self.vertices.clear();
        self.heights.clear();
        self.bounds.clear();
        let key = |q: usize, fq: f64| fq + w * (q * q) as f64;

        for (q, &fq) in line.iter().enumerate() {
            if fq == f64::INFINITY {
                continue;
            }
            loop {
                let (Some(&v), Some(&fv), Some(&zv)) = (self.vertices.last(), self.heights.last(), self.bounds.last())
                else {
                    self.vertices.push(q);
                    self.heights.push(fq);
                    self.bounds.push(f64::NEG_INFINITY);
                    break;
                };
                let s = (key(q, fq) - key(v, fv)) / (2.0 * w * (q - v) as f64);
                if s <= zv {
                    self.vertices.pop();
                    self.heights.pop();
                    self.bounds.pop();
                    continue;
                }
                self.vertices.push(q);
                self.heights.push(fq);
                self.bounds.push(s);
                break;
            }
        }
        if self.vertices.is_empty() {
            return false;
        }
        self.bounds.push(f64::INFINITY);

        let mut j = 0;
        for (p, out) in line.iter_mut().enumerate() {
            while self.bounds[j + 1] < p as f64 {
                j += 1;
            }
            let d = p as f64 - self.vertices[j] as f64;
            *out = self.heights[j] + w * d * d;
        }
        true
    }
}

/// Directed surface distances in mm: each boundary voxel of `reference` to
/// the nearest boundary voxel of `test`, and the reverse.
pub fn surface_distances(reference: &Mask, test: &Mask) -> Result<(Vec<f64>, Vec<f64>)> {
    check_grid_compat(reference, test)?;
    let sr = boundary(reference)?;
    let st = boundary(test)?;
    let spacing = reference.spacing();

    let mut lo = [usize::MAX; 3];
    let mut hi = [0usize; 3];
    for p in sr.voxels.iter().chain(&st.voxels) {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let ext = [hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1];
    let sample = |field: &[f64], at: &[[usize; 3]]| -> Vec<f64> {
        at.iter()
            .map(|p| {
                let (x, y, z) = (p[0] - lo[0], p[1] - lo[1], p[2] - lo[2]);
                libm::sqrt(field[x + ext[0] * (y + ext[1] * z)])
            })
            .collect()
    };

    let to_test = squared_edt_in_box(&st.voxels, lo, ext, spacing);
    let d_ref_test = sample(&to_test, &sr.voxels);
    drop(to_test);
    let to_ref = squared_edt_in_box(&sr.voxels, lo, ext, spacing);
    let d_test_ref = sample(&to_ref, &st.voxels);
    Ok((d_ref_test, d_test_ref))
}

pub fn distance_metrics(d_ref_test: &[f64], d_test_ref: &[f64]) -> Result<DistanceSummary> {
    if d_ref_test.is_empty() || d_test_ref.is_empty() {
        return Err(Error::EmptyDistances);
    }
    let mut pooled: Vec<f64> = d_ref_test.iter().chain(d_test_ref).copied().collect();
    pooled.sort_unstable_by(f64::total_cmp);
    let n = pooled.len();
    let hausdorff = pooled[n - 1];
    let rank = (95 * n).div_ceil(100);
    let hd95 = pooled[rank - 1];
    let mean = pooled.iter().sum::<f64>() / n as f64;
    let rms = libm::sqrt(pooled.iter().map(|d| d * d).sum::<f64>() / n as f64);
    // Rounding can break mean <= rms <= max by an ulp.
    let mean = mean.min(hausdorff);
    let rms = rms.max(mean).min(hausdorff);
    Ok(DistanceSummary {
        hausdorff_mm: hausdorff,
        hd95_mm: hd95,
        mean_sd_mm: mean,
        rms_mm: rms,
        n_ref_surface: d_ref_test.len(),
        n_test_surface: d_test_ref.len(),
    })
}

/// Convenience: [`surface_distances`] then [`distance_metrics`].
pub fn compare_surfaces(reference: &Mask, test: &Mask) -> Result<DistanceSummary> {
    let (a, b) = surface_distances(reference, test)?;
    distance_metrics(&a, &b)
}
