//! Parameter blob: `b"AGCP"`, `u32` version, `u64` F, H, C, then `w0` and
//! `w1` as row-major little-endian `f64`. All integers little-endian.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::GcnParams;

pub const PARAMS_MAGIC: [u8; 4] = *b"AGCP";
pub const PARAMS_VERSION: u32 = 1;

// upper bound on any single dimension read back from a blob
const MAX_DIM: u64 = 1 << 28;

pub fn write_params<W: Write>(out: &mut W, params: &GcnParams) -> std::io::Result<()> {
    out.write_all(&PARAMS_MAGIC)?;
    out.write_all(&PARAMS_VERSION.to_le_bytes())?;
    for dim in [
        params.num_features(),
        params.hidden_dim(),
        params.num_classes(),
    ] {
        out.write_all(&(dim as u64).to_le_bytes())?;
    }
    for v in params.w0.as_slice().iter().chain(params.w1.as_slice()) {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub(crate) fn read_exact<const N: usize, R: Read>(input: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    input
        .read_exact(&mut buf)
        .map_err(|e| Error::Checkpoint(format!("truncated blob: {e}")))?;
    Ok(buf)
}

pub(crate) fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(read_exact::<8, _>(input)?))
}

pub(crate) fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    Ok(f64::from_le_bytes(read_exact::<8, _>(input)?))
}

fn read_matrix<R: Read>(input: &mut R, rows: usize, cols: usize) -> Result<Matrix> {
    let data = (0..rows * cols)
        .map(|_| read_f64(input))
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_vec(rows, cols, data)
}

pub fn read_params<R: Read>(input: &mut R) -> Result<GcnParams> {
    let magic = read_exact::<4, _>(input)?;
    if magic != PARAMS_MAGIC {
        return Err(Error::Checkpoint(format!("bad parameter magic {magic:?}")));
    }
    let version = u32::from_le_bytes(read_exact::<4, _>(input)?);
    if version != PARAMS_VERSION {
        return Err(Error::Checkpoint(format!(
            "unsupported parameter version {version}"
        )));
    }
    let mut dims = [0usize; 3];
    for d in &mut dims {
        let v = read_u64(input)?;
        if v > MAX_DIM {
            return Err(Error::Checkpoint(format!("dimension {v} too large")));
        }
        *d = v as usize;
    }
    let [f, h, c] = dims;
    let w0 = read_matrix(input, f, h)?;
    let w1 = read_matrix(input, h, c)?;
    let params = GcnParams::new(w0, w1)?;
    if !params.is_finite() {
        return Err(Error::Checkpoint("non-finite weights".into()));
    }
    Ok(params)
}
