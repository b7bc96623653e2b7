//! Binary checkpoints: magic `RBSIM1`, `nx` and `nz` as `u64`, time as `f64`,
//! then the `u, v, w, T` coefficient arrays as interleaved `(re, im)` pairs,
//! all little-endian.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use super::SimState;
use crate::error::{Error, Result};
use crate::field::{Grid, Spectral};

const MAGIC: &[u8; 6] = b"RBSIM1";

pub fn encode(state: &SimState) -> Vec<u8> {
    let g = state.s.grid;
    let mut out = Vec::with_capacity(30 + 64 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.nx as u64).to_le_bytes());
    out.extend_from_slice(&(g.nz as u64).to_le_bytes());
    out.extend_from_slice(&state.t.to_le_bytes());
    for c in &state.s.c {
        for z in c {
            out.extend_from_slice(&z.re.to_le_bytes());
            out.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    out
}

fn take<const N: usize>(bytes: &[u8], pos: &mut usize) -> Result<[u8; N]> {
    let end = *pos + N;
    let s = bytes
        .get(*pos..end)
        .ok_or_else(|| Error::Checkpoint(format!("truncated at byte {}", *pos)))?;
    *pos = end;
    Ok(s.try_into().expect("slice length"))
}

/// Decodes a checkpoint; `alpha1` fixes the horizontal period, which is not stored.
pub fn decode(bytes: &[u8], alpha1: f64) -> Result<SimState> {
    let mut pos = 0;
    if &take::<6>(bytes, &mut pos)? != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let nx = u64::from_le_bytes(take(bytes, &mut pos)?) as usize;
    let nz = u64::from_le_bytes(take(bytes, &mut pos)?) as usize;
    let t = f64::from_le_bytes(take(bytes, &mut pos)?);
    let grid = Grid::new(nx, nz, alpha1).map_err(|e| Error::Checkpoint(e.to_string()))?;
    let expect = pos + 64 * grid.len();
    if bytes.len() != expect {
        return Err(Error::Checkpoint(format!(
            "expected {expect} bytes for a {nx} x {nz} grid, found {}",
            bytes.len()
        )));
    }
    let mut s = Spectral::zeros(grid);
    for c in s.c.iter_mut() {
        for z in c.iter_mut() {
            let re = f64::from_le_bytes(take(bytes, &mut pos)?);
            let im = f64::from_le_bytes(take(bytes, &mut pos)?);
            *z = Complex64::new(re, im);
        }
    }
    Ok(SimState { s, t })
}

pub fn write_checkpoint(path: impl AsRef<Path>, state: &SimState) -> Result<()> {
    fs::write(path.as_ref(), encode(state))
        .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.as_ref().display())))
}

pub fn read_checkpoint(path: impl AsRef<Path>, alpha1: f64) -> Result<SimState> {
    let bytes = fs::read(path.as_ref())
        .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.as_ref().display())))?;
    decode(&bytes, alpha1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn round_trip() {
        let g = Grid::new(8, 4, 0.7).unwrap();
        let s = Spectral::random(g, &mut StdRng::seed_from_u64(3), 2, 2);
        let st = SimState { s, t: 1.25 };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.bin");
        write_checkpoint(&p, &st).unwrap();
        let back = read_checkpoint(&p, 0.7).unwrap();
        assert_eq!(back, st);
        let bytes = encode(&st);
        assert!(matches!(decode(&bytes[..bytes.len() - 1], 0.7), Err(Error::Checkpoint(_))));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(decode(&bad, 0.7), Err(Error::Checkpoint(_))));
    }
}
