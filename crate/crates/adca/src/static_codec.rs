//! Static codec: the antidictionary is known to both sides and shipped in
//! the header. The pruned automaton predicts each symbol from the current
//! state; single-edge states cost nothing, branching states are
//! arithmetic-coded under per-state adaptive counters.
//!
//! Container layout (bit-exact): magic 0xDC, mode 0x00, omega(J),
//! omega(n+1), omega(|A|), then each forbidden word as omega(len) followed
//! by len fixed-width symbols, zero-padding to a byte boundary, then the
//! arithmetic payload. The payload is empty when no symbol was coded.

use crate::antidictionary::{Antidictionary, Word};
use crate::arith::{Decoder, Encoder, FrequencyTable};
use crate::automaton::{Automaton, StateId};
use crate::bits::{BitReader, BitString};
use crate::container::{read_prelude, symbol_width, MAGIC, MODE_STATIC};
use crate::error::{Error, Result};
use crate::omega::{omega_decode, omega_encode_into};
use crate::Symbol;

fn per_state_tables(g: &Automaton) -> Vec<Option<FrequencyTable>> {
    (0..g.num_states())
        .map(|s| {
            let edges = g.edge_symbols(s);
            (edges.len() >= 2).then(|| FrequencyTable::new(g.alphabet_size(), edges))
        })
        .collect()
}

/// Incremental encoder; use [`encode_static`] for the one-shot form.
pub struct StaticEncoder {
    automaton: Automaton,
    tables: Vec<Option<FrequencyTable>>,
    state: StateId,
    coder: Encoder,
    position: usize,
}

impl StaticEncoder {
    pub fn new(antidictionary: &Antidictionary) -> Result<Self> {
        let automaton = Automaton::build_g(&Automaton::build_f(antidictionary)?)?;
        let tables = per_state_tables(&automaton);
        Ok(StaticEncoder {
            state: automaton.initial(),
            tables,
            automaton,
            coder: Encoder::new(),
            position: 0,
        })
    }

    pub fn current_state(&self) -> StateId {
        self.state
    }

    /// Counter snapshot of every branching state, for lockstep tests.
    pub fn table_counts(&self) -> Vec<Vec<u64>> {
        snapshot_tables(&self.tables, self.automaton.alphabet_size())
    }

    pub fn symbols_coded(&self) -> u64 {
        self.coder.symbols_coded()
    }

    /// Consume one symbol of the input.
    pub fn push(&mut self, symbol: Symbol) -> Result<()> {
        let next = self
            .automaton
            .step(self.state, symbol)
            .ok_or(Error::ForbiddenInput { position: self.position })?;
        if let Some(table) = self.tables[self.state].as_mut() {
            self.coder.encode(table, symbol)?;
        }
        self.state = next;
        self.position += 1;
        Ok(())
    }

    fn finish(self) -> BitString {
        if self.coder.symbols_coded() == 0 {
            BitString::new()
        } else {
            self.coder.finish()
        }
    }
}

fn snapshot_tables(tables: &[Option<FrequencyTable>], alphabet: u16) -> Vec<Vec<u64>> {
    tables
        .iter()
        .map(|t| match t {
            Some(t) => (0..alphabet).map(|c| t.count(c)).collect(),
            None => Vec::new(),
        })
        .collect()
}

fn write_header(out: &mut BitString, a: &Antidictionary, n: usize) -> Result<()> {
    out.push_bits(u64::from(MAGIC), 8);
    out.push_bits(u64::from(MODE_STATIC), 8);
    omega_encode_into(out, u64::from(a.alphabet_size()))?;
    omega_encode_into(out, n as u64 + 1)?;
    omega_encode_into(out, a.len() as u64)?;
    let width = symbol_width(a.alphabet_size());
    for w in a.words() {
        omega_encode_into(out, w.len() as u64)?;
        for &s in w.symbols() {
            out.push_bits(u64::from(s), width);
        }
    }
    out.pad_to_byte();
    Ok(())
}

/// Compress `x`, which must avoid every word of `a`.
pub fn encode_static(x: &Word, a: &Antidictionary) -> Result<Vec<u8>> {
    let mut encoder = StaticEncoder::new(a)?;
    x.check_alphabet(a.alphabet_size())?;
    let mut container = BitString::new();
    write_header(&mut container, a, x.len())?;
    for &s in x.symbols() {
        encoder.push(s)?;
    }
    let payload = encoder.finish();
    container.extend_from(&payload);
    container.pad_to_byte();
    Ok(container.into_bytes())
}

struct ParsedHeader {
    antidictionary: Antidictionary,
    n: usize,
}

fn read_header(reader: &mut BitReader<'_>) -> Result<ParsedHeader> {
    let mode = read_prelude(reader)?;
    if mode != MODE_STATIC {
        return Err(Error::CorruptContainer(format!("unexpected mode byte 0x{mode:02X}")));
    }
    let alphabet = omega_decode(reader)?;
    if alphabet < 1 || alphabet > u64::from(u16::MAX) {
        return Err(Error::CorruptContainer(format!("alphabet size {alphabet} out of range")));
    }
    let alphabet = alphabet as u16;
    let n_plus_1 = omega_decode(reader)?;
    let n = usize::try_from(n_plus_1 - 1)
        .map_err(|_| Error::CorruptContainer("length overflows".into()))?;
    let word_count = omega_decode(reader)?;
    let width = symbol_width(alphabet);
    let mut words = Vec::new();
    for _ in 0..word_count {
        let len = omega_decode(reader)?;
        let mut symbols = Vec::with_capacity(len as usize);
        for _ in 0..len {
            symbols.push(reader.read_bits(width)? as Symbol);
        }
        words.push(Word::new(symbols));
    }
    let antidictionary = Antidictionary::new(alphabet, words)
        .map_err(|e| Error::CorruptContainer(format!("header antidictionary: {e}")))?;
    reader.align_to_byte();
    Ok(ParsedHeader { antidictionary, n })
}

/// Incremental decoder; use [`decode_static`] for the one-shot form.
pub struct StaticDecoder<'a> {
    automaton: Automaton,
    tables: Vec<Option<FrequencyTable>>,
    state: StateId,
    decoder: Option<Decoder<'a>>,
    payload: &'a [u8],
    produced: usize,
    n: usize,
}

impl<'a> StaticDecoder<'a> {
    pub fn new(container: &'a [u8]) -> Result<Self> {
        let mut reader = BitReader::new(container);
        let header = read_header(&mut reader)?;
        let payload = reader.rest_bytes()?;
        let automaton = Automaton::build_g(&Automaton::build_f(&header.antidictionary)?)?;
        let tables = per_state_tables(&automaton);
        Ok(StaticDecoder {
            state: automaton.initial(),
            tables,
            automaton,
            decoder: None,
            payload,
            produced: 0,
            n: header.n,
        })
    }

    /// Total output length recorded in the header.
    pub fn expected_len(&self) -> usize {
        self.n
    }

    pub fn current_state(&self) -> StateId {
        self.state
    }

    pub fn table_counts(&self) -> Vec<Vec<u64>> {
        snapshot_tables(&self.tables, self.automaton.alphabet_size())
    }

    pub fn is_done(&self) -> bool {
        self.produced == self.n
    }

    /// Decode the next symbol; `None` once the recorded length is reached.
    pub fn next_symbol(&mut self) -> Result<Option<Symbol>> {
        if self.produced == self.n {
            return Ok(None);
        }
        let edges = self.automaton.edge_symbols(self.state);
        let symbol = match self.tables[self.state].as_mut() {
            None if edges.is_empty() => {
                return Err(Error::CorruptContainer(
                    "recorded length continues past a dead-end context".into(),
                ))
            }
            None => edges[0],
            Some(table) => {
                let decoder =
                    self.decoder.get_or_insert_with(|| Decoder::new(self.payload));
                decoder.decode(table)?
            }
        };
        self.state = self
            .automaton
            .step(self.state, symbol)
            .ok_or_else(|| Error::CorruptContainer("decoded a forbidden transition".into()))?;
        self.produced += 1;
        Ok(Some(symbol))
    }
}

/// Decompress a static container.
pub fn decode_static(container: &[u8]) -> Result<Word> {
    let mut decoder = StaticDecoder::new(container)?;
    let mut out = Vec::with_capacity(decoder.expected_len());
    while let Some(s) = decoder.next_symbol()? {
        out.push(s);
    }
    Ok(Word::new(out))
}

/// Measured size of the container in bits, split into the three parts the
/// code-length accounting uses. Parts sum exactly to `total_bits`; the
/// header padding is attributed to the antidictionary list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StaticCodeLength {
    pub n: usize,
    pub total_bits: u64,
    /// Magic, mode, alphabet, word count and the word list, plus padding.
    pub antidictionary_bits: u64,
    /// The omega(n+1) field.
    pub length_field_bits: u64,
    /// Payload section including its byte padding.
    pub payload_bits: u64,
}

impl StaticCodeLength {
    pub fn bits_per_symbol(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.total_bits as f64 / self.n as f64
    }
}

/// Encode and measure. The breakdown is taken from the actual container.
pub fn static_code_length(x: &Word, a: &Antidictionary) -> Result<StaticCodeLength> {
    let container = encode_static(x, a)?;
    let mut header_probe = BitString::new();
    write_header(&mut header_probe, a, x.len())?;
    let header_bits = header_probe.len() as u64;
    let length_field_bits = crate::omega::omega_len(x.len() as u64 + 1)? as u64;
    let total_bits = container.len() as u64 * 8;
    Ok(StaticCodeLength {
        n: x.len(),
        total_bits,
        antidictionary_bits: header_bits - length_field_bits,
        length_field_bits,
        payload_bits: total_bits - header_bits,
    })
}
