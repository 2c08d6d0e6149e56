//! Single-file NIfTI-1 (`.nii`, `.nii.gz`) reading and writing.
//!
//! Only the fields needed for voxel geometry and payload decoding are
//! interpreted. Orientation (qform/sform) is ignored: geometry is voxel index
//! × `pixdim[1..=3]`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use segeval_core::{Grid, Volume, VoxelData};
use thiserror::Error;

pub const HEADER_SIZE: usize = 348;
/// Header plus the four-byte extension flag.
pub const SINGLE_FILE_OFFSET: usize = 352;
pub const MAGIC_SINGLE: &[u8; 4] = b"n+1\0";
pub const MAGIC_PAIR: &[u8; 4] = b"ni1\0";

const DT_UINT8: i16 = 2;
const DT_INT16: i16 = 4;
const DT_INT32: i16 = 8;
const DT_FLOAT32: i16 = 16;

// Header field offsets.
const OFF_SIZEOF_HDR: usize = 0;
const OFF_DIM: usize = 40;
const OFF_DATATYPE: usize = 70;
const OFF_BITPIX: usize = 72;
const OFF_PIXDIM: usize = 76;
const OFF_VOX_OFFSET: usize = 108;
const OFF_SCL_SLOPE: usize = 112;
const OFF_SCL_INTER: usize = 116;
const OFF_XYZT_UNITS: usize = 123;
const OFF_MAGIC: usize = 344;

#[derive(Debug, Error)]
pub enum NiftiError {
    #[error("bad magic {0:?}: not a NIfTI-1 file")]
    BadMagic([u8; 4]),
    #[error("header/image pairs (magic \"ni1\") are not supported; use a single .nii file")]
    SplitFile,
    #[error("sizeof_hdr is {0}, expected 348")]
    HeaderSizeMismatch(i32),
    #[error("unsupported datatype code {0} (supported: uint8, int16, int32, float32)")]
    UnsupportedDatatype(i16),
    #[error("bitpix {bitpix} does not match datatype {datatype}")]
    BitpixMismatch { datatype: i16, bitpix: i16 },
    #[error("cannot infer byte order: dim[0] is not in 1..=7 in either order")]
    UnknownByteOrder,
    #[error("invalid dimensions: {0}")]
    BadDimensions(String),
    #[error("invalid voxel spacing {0:?}")]
    BadSpacing([f32; 3]),
    #[error("file truncated: need {needed} bytes, have {have}")]
    TruncatedData { needed: usize, have: usize },
    #[error("integer label data has scl_slope {slope} / scl_inter {inter}; rescaled labels are rejected")]
    RescaledLabels { slope: f32, inter: f32 },
    #[error("invalid vox_offset {0}")]
    BadVoxOffset(f32),
    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, NiftiError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ByteOrder {
    Little,
    Big,
}

struct Fields<'a> {
    bytes: &'a [u8],
    order: ByteOrder,
}

impl Fields<'_> {
    fn take<const N: usize>(&self, off: usize) -> [u8; N] {
        let mut b: [u8; N] = self.bytes[off..off + N].try_into().expect("in-bounds header field");
        if self.order == ByteOrder::Big {
            b.reverse();
        }
        b
    }

    fn i16(&self, off: usize) -> i16 {
        i16::from_le_bytes(self.take(off))
    }

    fn i32(&self, off: usize) -> i32 {
        i32::from_le_bytes(self.take(off))
    }

    fn f32(&self, off: usize) -> f32 {
        f32::from_le_bytes(self.take(off))
    }
}

pub fn read_nifti(path: impl AsRef<Path>) -> Result<Volume> {
    let raw = fs::read(path)?;
    decode_nifti(&raw)
}

/// Decodes an in-memory `.nii` image, gunzipping first if the bytes start
/// with the gzip signature.
pub fn decode_nifti(raw: &[u8]) -> Result<Volume> {
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw).read_to_end(&mut out)?;
        decode_plain(&out)
    } else {
        decode_plain(raw)
    }
}

fn decode_plain(bytes: &[u8]) -> Result<Volume> {
    if bytes.len() < HEADER_SIZE {
        return Err(NiftiError::TruncatedData { needed: HEADER_SIZE, have: bytes.len() });
    }
    let dim0_le = i16::from_le_bytes([bytes[OFF_DIM], bytes[OFF_DIM + 1]]);
    let dim0_be = i16::from_be_bytes([bytes[OFF_DIM], bytes[OFF_DIM + 1]]);
    let order = if (1..=7).contains(&dim0_le) {
        ByteOrder::Little
    } else if (1..=7).contains(&dim0_be) {
        ByteOrder::Big
    } else {
        return Err(NiftiError::UnknownByteOrder);
    };
    let h = Fields { bytes, order };

    let sizeof_hdr = h.i32(OFF_SIZEOF_HDR);
    if sizeof_hdr != HEADER_SIZE as i32 {
        return Err(NiftiError::HeaderSizeMismatch(sizeof_hdr));
    }
    let magic: [u8; 4] = bytes[OFF_MAGIC..OFF_MAGIC + 4].try_into().expect("4 bytes");
    if &magic == MAGIC_PAIR {
        return Err(NiftiError::SplitFile);
    }
    if &magic != MAGIC_SINGLE {
        return Err(NiftiError::BadMagic(magic));
    }

    let datatype = h.i16(OFF_DATATYPE);
    let elem = match datatype {
        DT_UINT8 => 1,
        DT_INT16 => 2,
        DT_INT32 | DT_FLOAT32 => 4,
        other => return Err(NiftiError::UnsupportedDatatype(other)),
    };
    let bitpix = h.i16(OFF_BITPIX);
    if bitpix as usize != elem * 8 {
        return Err(NiftiError::BitpixMismatch { datatype, bitpix });
    }

    let ndim = h.i16(OFF_DIM) as usize;
    let dim: Vec<i16> = (1..=7).map(|i| h.i16(OFF_DIM + 2 * i)).collect();
    let mut dims = [1usize; 3];
    for (axis, &n) in dim.iter().enumerate().take(ndim) {
        if n < 1 {
            return Err(NiftiError::BadDimensions(format!("dim[{}] = {n}", axis + 1)));
        }
        if axis < 3 {
            dims[axis] = n as usize;
        } else if n != 1 {
            return Err(NiftiError::BadDimensions(format!("dim[{}] = {n}: only 3-D volumes are supported", axis + 1)));
        }
    }
    let pix = [h.f32(OFF_PIXDIM + 4), h.f32(OFF_PIXDIM + 8), h.f32(OFF_PIXDIM + 12)];
    // Axes beyond dim[0] carry no spacing information.
    let mut spacing = [1.0f64; 3];
    for axis in 0..ndim.min(3) {
        spacing[axis] = f64::from(pix[axis]);
    }
    let grid = Grid::new(dims, spacing).map_err(|_| NiftiError::BadSpacing(pix))?;

    let vox_offset = h.f32(OFF_VOX_OFFSET);
    if !vox_offset.is_finite() || vox_offset < SINGLE_FILE_OFFSET as f32 {
        return Err(NiftiError::BadVoxOffset(vox_offset));
    }
    let start = vox_offset as usize;
    let needed = start + grid.len() * elem;
    if bytes.len() < needed {
        return Err(NiftiError::TruncatedData { needed, have: bytes.len() });
    }
    let payload = &bytes[start..needed];

    let slope = h.f32(OFF_SCL_SLOPE);
    let inter = h.f32(OFF_SCL_INTER);
    let scaled = !(slope == 0.0 || slope == 1.0) || inter != 0.0;
    if scaled && datatype != DT_FLOAT32 {
        return Err(NiftiError::RescaledLabels { slope, inter });
    }

    let data = match datatype {
        DT_UINT8 => VoxelData::U8(payload.to_vec()),
        DT_INT16 => VoxelData::I16(decode_elems(payload, order, i16::from_le_bytes)),
        DT_INT32 => VoxelData::I32(decode_elems(payload, order, i32::from_le_bytes)),
        _ => {
            let mut v = decode_elems(payload, order, f32::from_le_bytes);
            if scaled {
                let slope = if slope == 0.0 { 1.0 } else { slope };
                v.iter_mut().for_each(|x| *x = *x * slope + inter);
            }
            VoxelData::F32(v)
        }
    };
    Ok(Volume::new(grid, data).expect("payload length matches grid"))
}

fn decode_elems<T, const N: usize>(payload: &[u8], order: ByteOrder, from_le: fn([u8; N]) -> T) -> Vec<T> {
    payload
        .chunks_exact(N)
        .map(|c| {
            let mut b: [u8; N] = c.try_into().expect("exact chunk");
            if order == ByteOrder::Big {
                b.reverse();
            }
            from_le(b)
        })
        .collect()
}

/// Encodes `v` as a little-endian single-file NIfTI-1 image (no gzip).
pub fn encode_nifti(v: &Volume) -> Vec<u8> {
    let grid = v.grid();
    let (datatype, bitpix) = match v.data() {
        VoxelData::U8(_) => (DT_UINT8, 8i16),
        VoxelData::I16(_) => (DT_INT16, 16),
        VoxelData::I32(_) => (DT_INT32, 32),
        VoxelData::F32(_) => (DT_FLOAT32, 32),
    };
    let mut h = vec![0u8; SINGLE_FILE_OFFSET];
    let mut put = |off: usize, b: &[u8]| h[off..off + b.len()].copy_from_slice(b);
    put(OFF_SIZEOF_HDR, &(HEADER_SIZE as i32).to_le_bytes());
    let dims = grid.dims();
    let dim: [i16; 8] = [3, dims[0] as i16, dims[1] as i16, dims[2] as i16, 1, 1, 1, 1];
    for (i, d) in dim.iter().enumerate() {
        put(OFF_DIM + 2 * i, &d.to_le_bytes());
    }
    put(OFF_DATATYPE, &datatype.to_le_bytes());
    put(OFF_BITPIX, &bitpix.to_le_bytes());
    let s = grid.spacing();
    let pixdim: [f32; 8] = [1.0, s[0] as f32, s[1] as f32, s[2] as f32, 0.0, 0.0, 0.0, 0.0];
    for (i, p) in pixdim.iter().enumerate() {
        put(OFF_PIXDIM + 4 * i, &p.to_le_bytes());
    }
    put(OFF_VOX_OFFSET, &(SINGLE_FILE_OFFSET as f32).to_le_bytes());
    put(OFF_SCL_SLOPE, &1.0f32.to_le_bytes());
    put(OFF_SCL_INTER, &0.0f32.to_le_bytes());
    // NIFTI_UNITS_MM
    put(OFF_XYZT_UNITS, &[2]);
    put(OFF_MAGIC, MAGIC_SINGLE);

    match v.data() {
        VoxelData::U8(d) => h.extend_from_slice(d),
        VoxelData::I16(d) => d.iter().for_each(|x| h.extend_from_slice(&x.to_le_bytes())),
        VoxelData::I32(d) => d.iter().for_each(|x| h.extend_from_slice(&x.to_le_bytes())),
        VoxelData::F32(d) => d.iter().for_each(|x| h.extend_from_slice(&x.to_le_bytes())),
    }
    h
}

/// Writes `v` to `path`; a `.gz` suffix produces a gzip-wrapped file.
pub fn write_nifti(v: &Volume, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_nifti(v);
    let gz = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gz"));
    let mut file = fs::File::create(path)?;
    if gz {
        let mut enc = GzEncoder::new(file, Compression::default());
        enc.write_all(&bytes)?;
        enc.finish()?;
    } else {
        file.write_all(&bytes)?;
    }
    Ok(())
}
