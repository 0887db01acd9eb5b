//! `SHL1` binary container for grid functions.
//!
//! Layout (little endian): magic `SHL1`, `L: f64`, `N: u64`, `band_lo: f64`,
//! `band_hi: f64` (NaN when absent), then `N` pairs `(re: f64, im: f64)`.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Band, Grid, GridFunction};

pub const MAGIC: &[u8; 4] = b"SHL1";

pub fn write_shl1<W: Write>(mut out: W, f: &GridFunction) -> Result<()> {
    let grid = f.grid();
    out.write_all(MAGIC)?;
    out.write_all(&grid.length().to_le_bytes())?;
    out.write_all(&(grid.samples() as u64).to_le_bytes())?;
    let (lo, hi) = f.band().map_or((f64::NAN, f64::NAN), |b| (b.lo, b.hi));
    out.write_all(&lo.to_le_bytes())?;
    out.write_all(&hi.to_le_bytes())?;
    let mut buf = Vec::with_capacity(16 * f.values().len());
    for v in f.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    out.write_all(&buf)?;
    Ok(())
}

fn read_f64<R: Read>(input: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b).map_err(truncated)?;
    Ok(f64::from_le_bytes(b))
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Format("file truncated".into())
    } else {
        e.into()
    }
}

pub fn read_shl1<R: Read>(mut input: R) -> Result<GridFunction> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("magic mismatch: {:?}", magic)));
    }
    let length = read_f64(&mut input)?;
    let mut nb = [0u8; 8];
    input.read_exact(&mut nb).map_err(truncated)?;
    let samples = u64::from_le_bytes(nb);
    let grid = Grid::new(length, samples)?;
    let lo = read_f64(&mut input)?;
    let hi = read_f64(&mut input)?;
    let band = match (lo.is_nan(), hi.is_nan()) {
        (true, true) => None,
        (false, false) => Some(Band::new(lo, hi)),
        _ => return Err(Error::Format("band has exactly one NaN endpoint".into())),
    };
    let mut raw = vec![0u8; 16 * grid.samples()];
    input.read_exact(&mut raw).map_err(truncated)?;
    let values = raw
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    Ok(GridFunction::new(grid, values)?.with_band(band))
}
