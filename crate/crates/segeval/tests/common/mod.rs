//! Fixtures shared by the integration test targets.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use segeval_core::phantom::gen_ellipsoid;
use segeval_core::{Grid, Mask, Spacing, Volume, VoxelData};

pub fn random_volume(rng: &mut ChaCha8Rng) -> Volume {
    let dims = [rng.random_range(1..12), rng.random_range(1..12), rng.random_range(1..12)];
    let spacing = [rng.random_range(0.3..3.0), rng.random_range(0.3..3.0), rng.random_range(0.3..3.0)];
    // round-trip through f32 so the header can hold the spacing exactly
    let spacing = spacing.map(|s: f64| s as f32 as f64);
    let grid = Grid::new(dims, spacing).unwrap();
    let n = grid.len();
    let data = match rng.random_range(0..4) {
        0 => VoxelData::U8((0..n).map(|_| rng.random()).collect()),
        1 => VoxelData::I16((0..n).map(|_| rng.random()).collect()),
        2 => VoxelData::I32((0..n).map(|_| rng.random()).collect()),
        _ => VoxelData::F32((0..n).map(|_| rng.random_range(-1e6f32..1e6)).collect()),
    };
    Volume::new(grid, data).unwrap()
}

pub fn payload_bits(v: &Volume) -> Vec<u8> {
    match v.data() {
        VoxelData::U8(d) => d.clone(),
        VoxelData::I16(d) => d.iter().flat_map(|x| x.to_le_bytes()).collect(),
        VoxelData::I32(d) => d.iter().flat_map(|x| x.to_le_bytes()).collect(),
        VoxelData::F32(d) => d.iter().flat_map(|x| x.to_bits().to_le_bytes()).collect(),
    }
}

/// Rewrites a little-endian single-file image as its big-endian twin.
pub fn to_big_endian(le: &[u8]) -> Vec<u8> {
    let mut out = le.to_vec();
    let mut swap = |at: usize, width: usize, count: usize| {
        for i in 0..count {
            out[at + i * width..at + (i + 1) * width].reverse();
        }
    };
    swap(0, 4, 1); // sizeof_hdr
    swap(40, 2, 8); // dim
    swap(56, 4, 3); // intent_p1..p3
    swap(68, 2, 4); // intent_code, datatype, bitpix, slice_start
    swap(76, 4, 11); // pixdim, vox_offset, scl_slope, scl_inter
    swap(120, 2, 1); // slice_end
    swap(124, 4, 6); // cal_max .. glmin
    swap(252, 2, 2); // qform_code, sform_code
    swap(256, 4, 18); // quaternion, offsets, srow
    let datatype = i16::from_le_bytes([le[70], le[71]]);
    let width = match datatype {
        2 => 1,
        4 => 2,
        8 | 16 => 4,
        other => panic!("datatype {other}"),
    };
    let count = (le.len() - 352) / width;
    swap(352, width, count);
    out
}

/// Either salt noise or a union of a few ellipsoids, never empty.
pub fn random_mask(rng: &mut ChaCha8Rng, dims: [usize; 3], spacing: Spacing) -> Mask {
    let grid = Grid::new(dims, spacing).unwrap();
    let mut m = if rng.random_bool(0.4) {
        let density = rng.random_range(0.002..0.5);
        Mask::from_fn(grid, |_| rng.random_bool(density))
    } else {
        let mut m = Mask::empty(grid);
        for _ in 0..rng.random_range(1..=4) {
            let center = dims.map(|n| rng.random_range(0.0..n as f64 - 1.0 + 1e-9));
            let radii = [0; 3].map(|_| rng.random_range(0.5..dims[0] as f64 / 2.5));
            let e = gen_ellipsoid(dims, spacing, center, radii).unwrap();
            for p in e.voxels() {
                m.set(p, true);
            }
        }
        m
    };
    if m.is_empty() {
        m.set(dims.map(|n| rng.random_range(0..n)), true);
    }
    m
}

pub fn squared_mm(p: [usize; 3], q: [usize; 3], s: Spacing) -> f64 {
    (0..3).map(|k| ((p[k] as f64 - q[k] as f64) * s[k]).powi(2)).sum()
}

/// Symmetric Hausdorff distance by comparing every pair of surface voxels.
pub fn pairwise_hausdorff(a: &[[usize; 3]], b: &[[usize; 3]], s: Spacing) -> f64 {
    let directed = |from: &[[usize; 3]], to: &[[usize; 3]]| {
        from.iter().map(|&p| to.iter().map(|&q| squared_mm(p, q, s)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a)).sqrt()
}
