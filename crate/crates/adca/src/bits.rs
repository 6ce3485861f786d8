//! Bit-exact buffers shared by the integer code, the arithmetic coder and
//! the container formats. Bits are most-significant-first within each byte;
//! the final byte is zero-padded.

use crate::error::{Error, Result};

/// Growable bit buffer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitString {
    bytes: Vec<u8>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of bits written so far.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push_bit(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit != 0 {
            let byte = self.len / 8;
            self.bytes[byte] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Push the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for i in (0..width).rev() {
            self.push_bit(((value >> i) & 1) as u8);
        }
    }

    pub fn get(&self, index: usize) -> Option<u8> {
        if index >= self.len {
            return None;
        }
        Some((self.bytes[index / 8] >> (7 - index % 8)) & 1)
    }

    /// Zero-pad to the next byte boundary.
    pub fn pad_to_byte(&mut self) {
        while self.len % 8 != 0 {
            self.push_bit(0);
        }
    }

    pub fn extend_from(&mut self, other: &BitString) {
        for i in 0..other.len {
            self.push_bit(other.get(i).unwrap());
        }
    }

    /// Underlying bytes, final byte zero-padded.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

/// Cursor over a byte slice with a bit-precise length.
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    len: usize,
    pos: usize,
    overread: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, len: data.len() * 8, pos: 0, overread: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.len.saturating_sub(self.pos)
    }

    pub fn read_bit(&mut self) -> Result<u8> {
        if self.pos >= self.len {
            return Err(Error::TruncatedStream);
        }
        let bit = (self.data[self.pos / 8] >> (7 - self.pos % 8)) & 1;
        self.pos += 1;
        Ok(bit)
    }

    /// Read a bit, yielding 0 past the end of the stream. The number of
    /// virtual zero bits handed out is tracked in `overread`; the
    /// arithmetic decoder bounds it to detect truncated payloads.
    pub fn read_bit_or_zero(&mut self) -> u8 {
        if self.pos >= self.len {
            self.pos += 1;
            self.overread += 1;
            0
        } else {
            let bit = (self.data[self.pos / 8] >> (7 - self.pos % 8)) & 1;
            self.pos += 1;
            bit
        }
    }

    pub fn overread(&self) -> usize {
        self.overread
    }

    /// Read `width` bits MSB-first into the low bits of a u64.
    pub fn read_bits(&mut self, width: u32) -> Result<u64> {
        debug_assert!(width <= 64);
        let mut value = 0u64;
        for _ in 0..width {
            value = (value << 1) | u64::from(self.read_bit()?);
        }
        Ok(value)
    }

    /// Skip forward to the next byte boundary.
    pub fn align_to_byte(&mut self) {
        self.pos = (self.pos + 7) / 8 * 8;
    }

    /// Remaining bytes from the current (byte-aligned) position.
    pub fn rest_bytes(&self) -> Result<&'a [u8]> {
        if self.pos % 8 != 0 {
            return Err(Error::CorruptContainer("unaligned payload".into()));
        }
        let byte = self.pos / 8;
        if byte > self.data.len() {
            return Err(Error::TruncatedStream);
        }
        Ok(&self.data[byte..])
    }
}
