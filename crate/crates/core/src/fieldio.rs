//! Binary field files: a fixed header followed by raw interleaved
//! little-endian f64 re/im pairs of the physical samples. Round-trips are
//! bit-exact.

use crate::error::CoreError;
use crate::grid::{Grid, GridField, C64};
use std::io::{Read, Write};

const MAGIC: &[u8; 4] = b"HLF1";
/// Layout tag 1: physical samples, row-major, interleaved f64 re/im, LE.
const LAYOUT_F64_INTERLEAVED: u8 = 1;

pub fn write_field<W: Write>(w: &mut W, field: &GridField) -> Result<(), CoreError> {
    let grid = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&[grid.dim(), LAYOUT_F64_INTERLEAVED])?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.len().to_le_bytes())?;
    for c in field.phys() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_field<R: Read>(r: &mut R) -> Result<GridField, CoreError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CoreError::MalformedReport(format!("bad field magic {magic:?}")));
    }
    let mut head = [0u8; 2];
    r.read_exact(&mut head)?;
    let (dim, layout) = (head[0], head[1]);
    if layout != LAYOUT_F64_INTERLEAVED {
        return Err(CoreError::MalformedReport(format!("unknown layout tag {layout}")));
    }
    let mut nb = [0u8; 4];
    r.read_exact(&mut nb)?;
    let n = u32::from_le_bytes(nb) as usize;
    let mut lb = [0u8; 8];
    r.read_exact(&mut lb)?;
    let len = f64::from_le_bytes(lb);
    let grid = Grid::new(dim, n, len)?;
    let mut samples = Vec::with_capacity(grid.points());
    let mut buf = [0u8; 16];
    for _ in 0..grid.points() {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..16].try_into().unwrap());
        samples.push(C64::new(re, im));
    }
    GridField::from_physical(grid, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn roundtrip_bit_exact() {
        let grid = Grid::d1(32, 7.5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let samples: Vec<C64> = (0..grid.points())
            .map(|_| C64::new(rng.gen::<f64>(), rng.gen::<f64>()))
            .collect();
        let f = GridField::from_physical(grid, samples.clone()).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let g = read_field(&mut buf.as_slice()).unwrap();
        assert_eq!(g.phys(), samples.as_slice());
        let mut buf2 = Vec::new();
        write_field(&mut buf2, &g).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn rejects_bad_magic() {
        let data = b"NOPE.....".to_vec();
        assert!(read_field(&mut data.as_slice()).is_err());
    }
}
