//! Elias omega code for positive integers: the self-delimiting integer
//! format used by every header field and Case-(0) record. Fields that may
//! be zero are stored as `omega(value + 1)`; that convention lives at the
//! call sites.

use crate::bits::{BitReader, BitString};
use crate::error::{Error, Result};

fn bit_len(n: u64) -> u32 {
    64 - n.leading_zeros()
}

/// Append the omega codeword for `n` (n >= 1) to `out`.
pub fn omega_encode_into(out: &mut BitString, n: u64) -> Result<()> {
    if n < 1 {
        return Err(Error::OmegaZero);
    }
    let mut groups = Vec::new();
    let mut v = n;
    while v > 1 {
        groups.push(v);
        v = u64::from(bit_len(v)) - 1;
    }
    for &g in groups.iter().rev() {
        out.push_bits(g, bit_len(g));
    }
    out.push_bit(0);
    Ok(())
}

pub fn omega_encode(n: u64) -> Result<BitString> {
    let mut out = BitString::new();
    omega_encode_into(&mut out, n)?;
    Ok(out)
}

/// Codeword length in bits without materializing it.
pub fn omega_len(n: u64) -> Result<usize> {
    if n < 1 {
        return Err(Error::OmegaZero);
    }
    let mut len = 1usize;
    let mut v = n;
    while v > 1 {
        len += bit_len(v) as usize;
        v = u64::from(bit_len(v)) - 1;
    }
    Ok(len)
}

/// Decode one omega codeword starting at the reader's position.
pub fn omega_decode(reader: &mut BitReader<'_>) -> Result<u64> {
    let mut n: u64 = 1;
    loop {
        match reader.read_bit()? {
            0 => return Ok(n),
            _ => {
                if n >= 63 {
                    return Err(Error::CorruptContainer(
                        "omega codeword exceeds 64-bit range".into(),
                    ));
                }
                let mut value: u64 = 1;
                for _ in 0..n {
                    value = (value << 1) | u64::from(reader.read_bit()?);
                }
                n = value;
            }
        }
    }
}

/// Right-hand side of the length bound
/// `|omega(n)| <= log2 n + 2 log2(log2 n) + 7`, valid for n >= 2.
pub fn omega_len_bound(n: u64) -> f64 {
    assert!(n >= 2);
    let l = (n as f64).log2();
    l + 2.0 * l.log2() + 7.0
}
