//! Shared pieces of the compressed container format. Every container opens
//! with a magic byte and a mode byte; the codec-specific header follows as
//! a bit stream, is zero-padded to a byte boundary, and the arithmetic
//! payload (possibly empty) runs to the end of the container.

use crate::bits::BitReader;
use crate::error::{Error, Result};

pub const MAGIC: u8 = 0xDC;
pub const MODE_STATIC: u8 = 0x00;
pub const MODE_DYNAMIC: u8 = 0x01;

/// Fixed width in bits of one symbol of an alphabet of size `j`
/// (zero when the alphabet has a single symbol).
pub fn symbol_width(j: u16) -> u32 {
    if j <= 1 {
        0
    } else {
        16 - (j - 1).leading_zeros()
    }
}

/// Read and check the magic byte, returning the mode byte.
pub fn read_prelude(reader: &mut BitReader<'_>) -> Result<u8> {
    let magic = reader.read_bits(8)? as u8;
    if magic != MAGIC {
        return Err(Error::CorruptContainer(format!("bad magic byte 0x{magic:02X}")));
    }
    Ok(reader.read_bits(8)? as u8)
}
