//! Adaptive arithmetic coder over per-context frequency counters. 32-bit
//! interval registers with pending-bit carry handling; cumulative intervals
//! use exact integer counts in canonical symbol order, and each coded
//! symbol's counter is incremented by one after coding on both sides.

use crate::bits::{BitReader, BitString};
use crate::error::{Error, Result};
use crate::Symbol;

const PRECISION: u32 = 32;
const WHOLE: u64 = 1 << PRECISION;
const HALF: u64 = WHOLE / 2;
const QUARTER: u64 = WHOLE / 4;
const THREE_QUARTERS: u64 = 3 * QUARTER;
/// Totals must stay below a quarter of the interval so that every nonzero
/// count keeps a nonzero slice after integer rounding.
const MAX_TOTAL: u64 = 1 << (PRECISION - 2);

/// Per-context symbol counters. Admissible symbols start at count 1, all
/// others at 0 and can never be coded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: Vec<u64>,
    total: u64,
}

impl FrequencyTable {
    /// A table over `alphabet` symbols with count 1 on each admissible one.
    pub fn new<I: IntoIterator<Item = Symbol>>(alphabet: u16, admissible: I) -> Self {
        let mut counts = vec![0u64; usize::from(alphabet)];
        let mut total = 0;
        for s in admissible {
            let slot = &mut counts[usize::from(s)];
            if *slot == 0 {
                *slot = 1;
                total += 1;
            }
        }
        FrequencyTable { counts, total }
    }

    /// Late admission of a symbol (a new edge in a live context): its
    /// counter starts at 1.
    pub fn admit(&mut self, s: Symbol) {
        let slot = &mut self.counts[usize::from(s)];
        debug_assert_eq!(*slot, 0, "symbol admitted twice");
        if *slot == 0 {
            *slot = 1;
            self.total += 1;
        }
    }

    pub fn count(&self, s: Symbol) -> u64 {
        self.counts[usize::from(s)]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn increment(&mut self, s: Symbol) {
        self.counts[usize::from(s)] += 1;
        self.total += 1;
    }

    /// Cumulative range `[low, high)` of `s` in canonical symbol order.
    fn range_of(&self, s: Symbol) -> (u64, u64) {
        let mut low = 0;
        for c in 0..usize::from(s) {
            low += self.counts[c];
        }
        (low, low + self.counts[usize::from(s)])
    }

    fn symbol_at(&self, target: u64) -> Symbol {
        let mut cum = 0;
        for (c, &n) in self.counts.iter().enumerate() {
            cum += n;
            if target < cum {
                return c as Symbol;
            }
        }
        unreachable!("target below total")
    }
}

/// Streaming encoder. One per payload; strictly sequential.
#[derive(Debug)]
pub struct Encoder {
    low: u64,
    high: u64,
    pending: u64,
    out: BitString,
    symbols_coded: u64,
}

impl Default for Encoder {
    fn default() -> Self {
        Self::new()
    }
}

impl Encoder {
    pub fn new() -> Self {
        Encoder { low: 0, high: WHOLE - 1, pending: 0, out: BitString::new(), symbols_coded: 0 }
    }

    pub fn symbols_coded(&self) -> u64 {
        self.symbols_coded
    }

    /// Bits emitted so far (pending bits not included).
    pub fn bits_emitted(&self) -> usize {
        self.out.len()
    }

    /// Code `symbol` under `table`, then bump its counter.
    pub fn encode(&mut self, table: &mut FrequencyTable, symbol: Symbol) -> Result<()> {
        let total = table.total();
        if total == 0 || table.count(symbol) == 0 {
            return Err(Error::ZeroFrequency);
        }
        if total >= MAX_TOTAL {
            return Err(Error::CounterOverflow);
        }
        let (cum_low, cum_high) = table.range_of(symbol);
        let range = self.high - self.low + 1;
        self.high = self.low + range * cum_high / total - 1;
        self.low += range * cum_low / total;
        self.renormalize();
        table.increment(symbol);
        self.symbols_coded += 1;
        Ok(())
    }

    fn renormalize(&mut self) {
        loop {
            if self.high < HALF {
                self.emit(0);
            } else if self.low >= HALF {
                self.emit(1);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            debug_assert!(self.low <= self.high && self.high < WHOLE);
        }
    }

    fn emit(&mut self, bit: u8) {
        self.out.push_bit(bit);
        for _ in 0..self.pending {
            self.out.push_bit(1 - bit);
        }
        self.pending = 0;
    }

    /// Terminate the stream so the decoder can disambiguate every coded
    /// symbol, and return the payload bits.
    pub fn finish(mut self) -> BitString {
        self.pending += 1;
        if self.low < QUARTER {
            self.emit(0);
        } else {
            self.emit(1);
        }
        self.out
    }
}

/// Streaming decoder over a payload produced by [`Encoder`]. The caller
/// must drive it with tables in the exact state the encoder used.
#[derive(Debug)]
pub struct Decoder<'a> {
    reader: BitReader<'a>,
    low: u64,
    high: u64,
    value: u64,
}

impl<'a> Decoder<'a> {
    pub fn new(payload: &'a [u8]) -> Self {
        let mut reader = BitReader::new(payload);
        let mut value = 0;
        for _ in 0..PRECISION {
            value = (value << 1) | u64::from(reader.read_bit_or_zero());
        }
        Decoder { reader, low: 0, high: WHOLE - 1, value }
    }

    /// Decode one symbol under `table`, then bump its counter (mirroring
    /// the encoder's update).
    pub fn decode(&mut self, table: &mut FrequencyTable) -> Result<Symbol> {
        let total = table.total();
        if total == 0 {
            return Err(Error::ZeroFrequency);
        }
        if total >= MAX_TOTAL {
            return Err(Error::CounterOverflow);
        }
        let range = self.high - self.low + 1;
        let target = ((self.value - self.low + 1) * total - 1) / range;
        let symbol = table.symbol_at(target);
        let (cum_low, cum_high) = table.range_of(symbol);
        self.high = self.low + range * cum_high / total - 1;
        self.low += range * cum_low / total;
        self.renormalize()?;
        table.increment(symbol);
        Ok(symbol)
    }

    fn renormalize(&mut self) -> Result<()> {
        loop {
            if self.high < HALF {
                // nothing
            } else if self.low >= HALF {
                self.value -= HALF;
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.value -= QUARTER;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
            self.value = (self.value << 1) | u64::from(self.reader.read_bit_or_zero());
            // An intact payload never needs more than the register width in
            // virtual zero bits; anything beyond that is truncation.
            if self.reader.overread() > PRECISION as usize {
                return Err(Error::TruncatedStream);
            }
        }
        Ok(())
    }
}
