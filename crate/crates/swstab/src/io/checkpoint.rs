//! Binary checkpoints of a field state.
//!
//! Layout, all little-endian: 8-byte magic, seven u64 header words
//! (version, d, n, n_x, m_modes, n_xi, endianness tag), f64 time, then the
//! re/im pairs of U, psi_hat and Pi_hat.

use std::io::{Read, Write};
use std::path::Path;

use crate::dynamics::FieldState;
use crate::error::{Error, Result};
use crate::C64;

const MAGIC: &[u8; 8] = b"SWSTCHK1";
const VERSION: u64 = 1;
const ENDIAN_TAG: u64 = 0x0102_0304_0506_0708;

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_c64s(out: &mut Vec<u8>, data: &[C64]) {
    for z in data {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
}

/// Serializes a state for spatial dimension `d` and form-function exponent `n`.
pub fn encode_checkpoint(state: &FieldState, n: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(
        8 + 8 * 8 + 16 * (state.u.len() + state.phi_hat.len() + state.pi_hat.len()),
    );
    out.extend_from_slice(MAGIC);
    for v in [
        VERSION,
        state.d as u64,
        n as u64,
        state.n_x as u64,
        state.m_modes as u64,
        state.n_xi as u64,
        ENDIAN_TAG,
    ] {
        put_u64(&mut out, v);
    }
    out.extend_from_slice(&state.t.to_le_bytes());
    put_c64s(&mut out, &state.u);
    put_c64s(&mut out, &state.phi_hat);
    put_c64s(&mut out, &state.pi_hat);
    out
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take8(&mut self) -> Result<[u8; 8]> {
        let end = self.pos + 8;
        let b = self
            .data
            .get(self.pos..end)
            .ok_or_else(|| Error::Checkpoint(format!("truncated at byte {}", self.pos)))?;
        self.pos = end;
        Ok(b.try_into().unwrap())
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take8()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take8()?))
    }

    fn c64s(&mut self, len: usize) -> Result<Vec<C64>> {
        (0..len)
            .map(|_| Ok(C64::new(self.f64()?, self.f64()?)))
            .collect()
    }
}

/// Inverse of [`encode_checkpoint`]; returns the state and the exponent n.
pub fn decode_checkpoint(data: &[u8]) -> Result<(FieldState, usize)> {
    if data.len() < 8 || &data[..8] != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let mut c = Cursor { data, pos: 8 };
    let version = c.u64()?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let d = c.u64()? as usize;
    let n = c.u64()? as usize;
    let n_x = c.u64()? as usize;
    let m_modes = c.u64()? as usize;
    let n_xi = c.u64()? as usize;
    if c.u64()? != ENDIAN_TAG {
        return Err(Error::Checkpoint("endianness tag mismatch".into()));
    }
    if !(1..=2).contains(&d) || !n_x.is_power_of_two() || m_modes > n_x || n_xi > 1 << 24 {
        return Err(Error::Checkpoint("implausible header".into()));
    }
    let mut st = FieldState::zeros(d, n_x, m_modes, n_xi);
    st.t = c.f64()?;
    st.u = c.c64s(st.u.len())?;
    st.phi_hat = c.c64s(st.phi_hat.len())?;
    st.pi_hat = c.c64s(st.pi_hat.len())?;
    if c.pos != data.len() {
        return Err(Error::Checkpoint(format!(
            "{} trailing bytes",
            data.len() - c.pos
        )));
    }
    Ok((st, n))
}

pub fn write_checkpoint(path: &Path, state: &FieldState, n: usize) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode_checkpoint(state, n))
        .map_err(|e| Error::io(path, e))
}

pub fn read_checkpoint(path: &Path) -> Result<(FieldState, usize)> {
    let mut buf = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&buf)
}
