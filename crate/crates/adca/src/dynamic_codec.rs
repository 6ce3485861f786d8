//! Dynamic codec: neither side knows the antidictionary, only the maximum
//! forbidden-word length m. Both sides grow a depth-bounded suffix trie
//! with bound d = m - 1 and predict each symbol at the modified active
//! point beta. A symbol absent from beta's edges is a novel extension,
//! Case-(0): its rank among the candidate symbols is recorded together
//! with the gap since the previous novel extension. A single present edge
//! is forced, Case-(1), and costs nothing. A branching context arithmetic-
//! codes the symbol under beta's counters, Case-(2).
//!
//! Container layout (bit-exact): magic 0xDC, mode 0x01, omega(J), omega(m),
//! omega(n+1), omega(n0+1), then n0 records of omega(gap+1) followed by the
//! rank minus one in fixed symbol width, zero-padding to a byte boundary,
//! then the arithmetic payload (empty when nothing was coded). Gaps count
//! the symbols strictly between consecutive Case-(0) positions.

use crate::antidictionary::Word;
use crate::arith::{Decoder, Encoder};
use crate::bits::{BitReader, BitString};
use crate::container::{read_prelude, symbol_width, MAGIC, MODE_DYNAMIC};
use crate::error::{Error, Result};
use crate::omega::{omega_decode, omega_encode_into, omega_len};
use crate::suffix_tree::DepthBoundedTree;
use crate::Symbol;

/// One Case-(0) event: `gap` symbols since the previous event (or since the
/// start), then the novel symbol's 1-based rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Case0Record {
    pub gap: u64,
    pub rank: u16,
}

/// Incremental encoder; use [`encode_dynamic`] for the one-shot form.
pub struct DynamicEncoder {
    tree: DepthBoundedTree,
    coder: Encoder,
    records: Vec<Case0Record>,
    mfw_len: usize,
    position: u64,
    last_case0: Option<u64>,
}

impl DynamicEncoder {
    pub fn new(alphabet: u16, mfw_len: usize) -> Self {
        assert!(mfw_len >= 1, "the forbidden-word length bound must be at least 1");
        DynamicEncoder {
            tree: DepthBoundedTree::new(alphabet, mfw_len - 1),
            coder: Encoder::new(),
            records: Vec::new(),
            mfw_len,
            position: 0,
            last_case0: None,
        }
    }

    pub fn tree(&self) -> &DepthBoundedTree {
        &self.tree
    }

    /// The forbidden-word length bound m this encoder was created with.
    pub fn mfw_len(&self) -> usize {
        self.mfw_len
    }

    pub fn records(&self) -> &[Case0Record] {
        &self.records
    }

    pub fn symbols_coded(&self) -> u64 {
        self.coder.symbols_coded()
    }

    /// Consume one symbol of the input.
    pub fn push(&mut self, symbol: Symbol) -> Result<()> {
        let beta = self.tree.beta();
        if self.tree.child(beta, symbol).is_none() {
            // Case-(0): novel extension at beta
            let ranks = self.tree.rank_list(beta);
            let rank = ranks
                .iter()
                .position(|&c| c == symbol)
                .map(|i| i as u16 + 1)
                .ok_or(Error::SymbolOutOfRange {
                    symbol: u32::from(symbol),
                    alphabet: self.tree.alphabet_size(),
                })?;
            let gap = match self.last_case0 {
                Some(prev) => self.position - prev - 1,
                None => self.position,
            };
            self.records.push(Case0Record { gap, rank });
            self.last_case0 = Some(self.position);
        } else if self.tree.out_degree(beta) >= 2 {
            // Case-(2): branching context
            let table = self.tree.counter_table_mut(beta).expect("branching nodes have tables");
            self.coder.encode(table, symbol)?;
        }
        // Case-(1) emits nothing. All cases extend the tree.
        self.tree.extend(symbol)?;
        self.position += 1;
        Ok(())
    }

    fn finish(self) -> (Vec<Case0Record>, BitString, DepthBoundedTree) {
        let payload = if self.coder.symbols_coded() == 0 {
            BitString::new()
        } else {
            self.coder.finish()
        };
        (self.records, payload, self.tree)
    }
}

fn write_header(
    out: &mut BitString,
    alphabet: u16,
    mfw_len: usize,
    n: usize,
    records: &[Case0Record],
) -> Result<()> {
    out.push_bits(u64::from(MAGIC), 8);
    out.push_bits(u64::from(MODE_DYNAMIC), 8);
    omega_encode_into(out, u64::from(alphabet))?;
    omega_encode_into(out, mfw_len as u64)?;
    omega_encode_into(out, n as u64 + 1)?;
    omega_encode_into(out, records.len() as u64 + 1)?;
    let width = symbol_width(alphabet);
    for r in records {
        omega_encode_into(out, r.gap + 1)?;
        out.push_bits(u64::from(r.rank - 1), width);
    }
    out.pad_to_byte();
    Ok(())
}

/// Compress `x` knowing only the alphabet and the forbidden-word length
/// bound `mfw_len` (m); the tree depth bound is m - 1.
pub fn encode_dynamic(x: &Word, alphabet: u16, mfw_len: usize) -> Result<Vec<u8>> {
    let mut encoder = DynamicEncoder::new(alphabet, mfw_len);
    for &s in x.symbols() {
        encoder.push(s)?;
    }
    let (records, payload, _) = encoder.finish();
    let mut container = BitString::new();
    write_header(&mut container, alphabet, mfw_len, x.len(), &records)?;
    container.extend_from(&payload);
    container.pad_to_byte();
    Ok(container.into_bytes())
}

struct ParsedHeader {
    alphabet: u16,
    mfw_len: usize,
    n: usize,
    /// Case-(0) events as (absolute position, rank), strictly increasing.
    events: Vec<(u64, u16)>,
}

fn read_header(reader: &mut BitReader<'_>) -> Result<ParsedHeader> {
    let mode = read_prelude(reader)?;
    if mode != MODE_DYNAMIC {
        return Err(Error::CorruptContainer(format!("unexpected mode byte 0x{mode:02X}")));
    }
    let alphabet = omega_decode(reader)?;
    if alphabet < 1 || alphabet > u64::from(u16::MAX) {
        return Err(Error::CorruptContainer(format!("alphabet size {alphabet} out of range")));
    }
    let alphabet = alphabet as u16;
    let mfw_len = omega_decode(reader)? as usize;
    if mfw_len < 1 {
        return Err(Error::CorruptContainer("forbidden-word length bound must be >= 1".into()));
    }
    let n = usize::try_from(omega_decode(reader)? - 1)
        .map_err(|_| Error::CorruptContainer("length overflows".into()))?;
    let record_count = (omega_decode(reader)? - 1) as usize;
    let width = symbol_width(alphabet);
    let mut events = Vec::with_capacity(record_count);
    let mut position: i128 = -1;
    for _ in 0..record_count {
        let gap = omega_decode(reader)? - 1;
        let rank = reader.read_bits(width)? as u16 + 1;
        if rank > alphabet {
            return Err(Error::CorruptContainer(format!("rank {rank} exceeds the alphabet")));
        }
        position += 1 + i128::from(gap);
        if position >= n as i128 {
            return Err(Error::CorruptContainer(format!(
                "record at position {position} points past the input length {n}"
            )));
        }
        events.push((position as u64, rank));
    }
    reader.align_to_byte();
    Ok(ParsedHeader { alphabet, mfw_len, n, events })
}

/// Incremental decoder; use [`decode_dynamic`] for the one-shot form.
pub struct DynamicDecoder<'a> {
    tree: DepthBoundedTree,
    decoder: Option<Decoder<'a>>,
    payload: &'a [u8],
    /// Remaining Case-(0) events as (absolute position, rank).
    events: Vec<(u64, u16)>,
    next_event: usize,
    produced: usize,
    n: usize,
}

impl<'a> DynamicDecoder<'a> {
    pub fn new(container: &'a [u8]) -> Result<Self> {
        let mut reader = BitReader::new(container);
        let header = read_header(&mut reader)?;
        let payload = reader.rest_bytes()?;
        Ok(DynamicDecoder {
            tree: DepthBoundedTree::new(header.alphabet, header.mfw_len - 1),
            decoder: None,
            payload,
            events: header.events,
            next_event: 0,
            produced: 0,
            n: header.n,
        })
    }

    pub fn expected_len(&self) -> usize {
        self.n
    }

    pub fn tree(&self) -> &DepthBoundedTree {
        &self.tree
    }

    pub fn is_done(&self) -> bool {
        self.produced == self.n
    }

    /// Decode the next symbol; `None` once the recorded length is reached.
    pub fn next_symbol(&mut self) -> Result<Option<Symbol>> {
        if self.produced == self.n {
            return Ok(None);
        }
        let beta = self.tree.beta();
        let at_event = self
            .events
            .get(self.next_event)
            .is_some_and(|&(pos, _)| pos == self.produced as u64);
        let symbol = if at_event {
            let (_, rank) = self.events[self.next_event];
            let ranks = self.tree.rank_list(beta);
            let idx = usize::from(rank) - 1;
            if idx >= ranks.len() {
                return Err(Error::RankOutOfRange { rank, available: ranks.len() });
            }
            self.next_event += 1;
            ranks[idx]
        } else {
            match self.tree.out_degree(beta) {
                0 => {
                    return Err(Error::CorruptContainer(
                        "no prediction available and no novel-extension record".into(),
                    ))
                }
                1 => self.tree.labels(beta)[0],
                _ => {
                    let table =
                        self.tree.counter_table_mut(beta).expect("branching nodes have tables");
                    let decoder =
                        self.decoder.get_or_insert_with(|| Decoder::new(self.payload));
                    decoder.decode(table)?
                }
            }
        };
        self.tree.extend(symbol)?;
        self.produced += 1;
        Ok(Some(symbol))
    }
}

/// Decompress a dynamic container.
pub fn decode_dynamic(container: &[u8]) -> Result<Word> {
    let mut decoder = DynamicDecoder::new(container)?;
    let mut out = Vec::with_capacity(decoder.expected_len());
    while let Some(s) = decoder.next_symbol()? {
        out.push(s);
    }
    Ok(Word::new(out))
}

/// Measured size of the container, split into the novel-extension cost C0
/// (header plus records) and the arithmetic cost C2 (payload). Parts sum
/// exactly to `total_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DynamicCodeLength {
    pub n: usize,
    pub total_bits: u64,
    /// Magic, mode and the four omega fields, plus the final padding.
    pub header_bits: u64,
    /// The Case-(0) records.
    pub record_bits: u64,
    /// The omega(n+1) field (also counted inside `header_bits`).
    pub length_field_bits: u64,
    /// Payload section including its byte padding.
    pub payload_bits: u64,
    pub case0_count: u64,
    pub shallow_beta_steps: u64,
}

impl DynamicCodeLength {
    pub fn bits_per_symbol(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.total_bits as f64 / self.n as f64
    }

    /// Everything but the arithmetic payload.
    pub fn c0_bits(&self) -> u64 {
        self.header_bits + self.record_bits
    }

    pub fn c2_bits(&self) -> u64 {
        self.payload_bits
    }
}

/// Encode and measure. The breakdown is taken from the actual container.
pub fn dynamic_code_length(x: &Word, alphabet: u16, mfw_len: usize) -> Result<DynamicCodeLength> {
    let mut encoder = DynamicEncoder::new(alphabet, mfw_len);
    for &s in x.symbols() {
        encoder.push(s)?;
    }
    let (records, payload, tree) = encoder.finish();
    let mut container = BitString::new();
    write_header(&mut container, alphabet, mfw_len, x.len(), &records)?;
    let header_and_records = container.len() as u64; // pre-padding
    container.pad_to_byte();
    let padded_header = container.len() as u64;
    container.extend_from(&payload);
    container.pad_to_byte();
    let total_bits = container.len() as u64;

    let width = u64::from(symbol_width(alphabet));
    let mut record_bits = 0u64;
    for r in &records {
        record_bits += omega_len(r.gap + 1)? as u64 + width;
    }
    let header_bits = header_and_records - record_bits + (padded_header - header_and_records);
    Ok(DynamicCodeLength {
        n: x.len(),
        total_bits,
        header_bits,
        record_bits,
        length_field_bits: omega_len(x.len() as u64 + 1)? as u64,
        payload_bits: total_bits - padded_header,
        case0_count: records.len() as u64,
        shallow_beta_steps: tree.shallow_beta_steps(),
    })
}
