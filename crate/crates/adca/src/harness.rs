//! Experiment driver: samples sources, runs either codec over increasing
//! lengths, collects per-run metrics, checks the structural bounds and
//! writes plottable CSV. Runs are deterministic: trial t uses seed
//! `base_seed + t`, and one trial's samples at different lengths share a
//! stream so longer runs extend shorter ones.

use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use crate::dynamic_codec::dynamic_code_length;
use crate::error::{Error, Result};
use crate::markov::SourceModel;
use crate::omega::{omega_len, omega_len_bound};
use crate::static_codec::static_code_length;
use crate::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodecMode {
    Static,
    Dynamic,
}

impl fmt::Display for CodecMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodecMode::Static => "static",
            CodecMode::Dynamic => "dynamic",
        })
    }
}

/// One compression run and the observables the experiments track.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub mode: CodecMode,
    pub n: usize,
    pub seed: u64,
    pub alphabet_size: u16,
    /// Static: the longest forbidden word; dynamic: the length bound m.
    pub mfw_param: usize,
    pub total_bits: u64,
    /// Everything except records and payload (includes the length field).
    pub header_bits: u64,
    /// Case-(0) records; zero for static runs.
    pub record_bits: u64,
    pub payload_bits: u64,
    /// The omega-coded length field, also counted inside `header_bits`.
    pub length_field_bits: u64,
    pub bits_per_symbol: f64,
    pub case0_count: u64,
    pub shallow_beta_steps: u64,
    /// Source entropy rate in bits per symbol.
    pub entropy_rate: f64,
    /// Automaton-state visit counts along the sampled string.
    pub visit_counts: Vec<u64>,
    /// Traversal counts per (state, symbol), sorted.
    pub edge_counts: Vec<(usize, Symbol, u64)>,
}

impl MetricsRecord {
    /// Bits spent outside the arithmetic payload.
    pub fn c0_bits(&self) -> u64 {
        self.header_bits + self.record_bits
    }
}

/// Run `trials` independent samples of each length through one codec.
/// Static runs receive the model's antidictionary; dynamic runs receive
/// only its maximum word length.
pub fn run_convergence(
    model: &SourceModel,
    mode: CodecMode,
    lengths: &[usize],
    trials: usize,
    base_seed: u64,
) -> Result<Vec<MetricsRecord>> {
    assert!(trials >= 1);
    assert!(lengths.windows(2).all(|w| w[0] <= w[1]), "lengths must be ascending");
    let info = model.stationary()?;
    let a = model.antidictionary();
    let mut records = Vec::with_capacity(lengths.len() * trials);
    for &n in lengths {
        for trial in 0..trials {
            let seed = base_seed + trial as u64;
            let x = model.sample(n, seed);
            let (visit_counts, edge_counts) = walk_statistics(model, &x);
            let record = match mode {
                CodecMode::Static => {
                    let len = static_code_length(&x, a)?;
                    MetricsRecord {
                        mode,
                        n,
                        seed,
                        alphabet_size: model.alphabet_size(),
                        mfw_param: a.max_len(),
                        total_bits: len.total_bits,
                        header_bits: len.antidictionary_bits + len.length_field_bits,
                        record_bits: 0,
                        payload_bits: len.payload_bits,
                        length_field_bits: len.length_field_bits,
                        bits_per_symbol: len.bits_per_symbol(),
                        case0_count: 0,
                        shallow_beta_steps: 0,
                        entropy_rate: info.entropy,
                        visit_counts,
                        edge_counts,
                    }
                }
                CodecMode::Dynamic => {
                    let m = a.max_len();
                    let len = dynamic_code_length(&x, model.alphabet_size(), m)?;
                    MetricsRecord {
                        mode,
                        n,
                        seed,
                        alphabet_size: model.alphabet_size(),
                        mfw_param: m,
                        total_bits: len.total_bits,
                        header_bits: len.header_bits,
                        record_bits: len.record_bits,
                        payload_bits: len.payload_bits,
                        length_field_bits: len.length_field_bits,
                        bits_per_symbol: len.bits_per_symbol(),
                        case0_count: len.case0_count,
                        shallow_beta_steps: len.shallow_beta_steps,
                        entropy_rate: info.entropy,
                        visit_counts,
                        edge_counts,
                    }
                }
            };
            records.push(record);
        }
    }
    Ok(records)
}

fn walk_statistics(model: &SourceModel, x: &crate::Word) -> (Vec<u64>, Vec<(usize, Symbol, u64)>) {
    let g = model.automaton();
    let mut visits = vec![0u64; g.num_states()];
    let mut edges: std::collections::BTreeMap<(usize, Symbol), u64> = Default::default();
    let mut state = g.initial();
    for &s in x.symbols() {
        visits[state] += 1;
        *edges.entry((state, s)).or_insert(0) += 1;
        state = g.step(state, s).expect("samples avoid forbidden words");
    }
    (visits, edges.into_iter().map(|((a, b), c)| (a, b, c)).collect())
}

/// Median of the per-symbol code lengths of the records matching a length.
pub fn median_bits_per_symbol(records: &[MetricsRecord], n: usize) -> Option<f64> {
    let mut values: Vec<f64> =
        records.iter().filter(|r| r.n == n).map(|r| r.bits_per_symbol).collect();
    if values.is_empty() {
        return None;
    }
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some(values[values.len() / 2])
}

/// Structural-bound violations found in a batch of records.
#[derive(Debug, Clone, Default)]
pub struct BoundReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl BoundReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Number of distinct words of length at most `depth` over `alphabet`
/// symbols; saturates instead of overflowing.
pub fn words_up_to(alphabet: u16, depth: usize) -> u128 {
    let j = u128::from(alphabet);
    if j == 1 {
        return depth as u128 + 1;
    }
    let mut total: u128 = 0;
    let mut power: u128 = 1;
    for _ in 0..=depth {
        total = total.saturating_add(power);
        power = power.saturating_mul(j);
    }
    total
}

/// Check every record against the structural bounds: the Case-(0) count
/// against the word-count bound for depth d+1, the shallow-beta count
/// against the bound for depths below d, and the omega length field against
/// its analytic bound.
pub fn check_bounds(records: &[MetricsRecord]) -> BoundReport {
    let mut report = BoundReport::default();
    for (i, r) in records.iter().enumerate() {
        report.checked += 1;
        if r.n >= 1 {
            let field = omega_len(r.n as u64 + 1).expect("n + 1 >= 2") as f64;
            let bound = omega_len_bound(r.n as u64 + 1);
            if field > bound {
                report.violations.push(format!(
                    "record {i}: omega length field {field} exceeds bound {bound:.2}"
                ));
            }
        }
        if r.mode != CodecMode::Dynamic {
            continue;
        }
        let d = r.mfw_param - 1;
        let n0_bound = if r.alphabet_size == 1 {
            d as u128 + 1
        } else {
            words_up_to(r.alphabet_size, d + 1)
        };
        if u128::from(r.case0_count) > n0_bound {
            report.violations.push(format!(
                "record {i}: {} novel extensions exceed the bound {n0_bound}",
                r.case0_count
            ));
        }
        let shallow_bound =
            if r.alphabet_size == 1 { d as u128 } else { words_up_to(r.alphabet_size, d) };
        if u128::from(r.shallow_beta_steps) > shallow_bound {
            report.violations.push(format!(
                "record {i}: {} shallow-beta steps exceed the bound {shallow_bound}",
                r.shallow_beta_steps
            ));
        }
    }
    report
}

const CSV_HEADER: &str = "mode,n,seed,alphabet_size,mfw_param,total_bits,header_bits,record_bits,payload_bits,length_field_bits,bits_per_symbol,case0_count,shallow_beta_steps,entropy_rate,visit_counts,edge_counts";

/// Write records as CSV. `visit_counts` is `;`-joined per state index;
/// `edge_counts` is `;`-joined `state:symbol:count`.
pub fn write_csv<W: Write>(records: &[MetricsRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let visits =
            r.visit_counts.iter().map(u64::to_string).collect::<Vec<_>>().join(";");
        let edges = r
            .edge_counts
            .iter()
            .map(|(s, c, n)| format!("{s}:{c}:{n}"))
            .collect::<Vec<_>>()
            .join(";");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.mode,
            r.n,
            r.seed,
            r.alphabet_size,
            r.mfw_param,
            r.total_bits,
            r.header_bits,
            r.record_bits,
            r.payload_bits,
            r.length_field_bits,
            r.bits_per_symbol,
            r.case0_count,
            r.shallow_beta_steps,
            r.entropy_rate,
            visits,
            edges
        )?;
    }
    Ok(())
}

pub fn emit_csv(records: &[MetricsRecord], path: &Path) -> io::Result<()> {
    let mut file = std::fs::File::create(path)?;
    write_csv(records, &mut file)?;
    file.flush()
}

/// Parse CSV produced by [`write_csv`] back into records.
pub fn parse_csv(text: &str) -> Result<Vec<MetricsRecord>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse {
        line: 0,
        message: "empty CSV".into(),
    })?;
    if header != CSV_HEADER {
        return Err(Error::Parse { line: 1, message: "unexpected CSV header".into() });
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let lineno = idx + 2;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 16 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 16 fields, found {}", fields.len()),
            });
        }
        let parse_err = |what: &str| Error::Parse {
            line: lineno,
            message: format!("invalid {what}"),
        };
        let mode = match fields[0] {
            "static" => CodecMode::Static,
            "dynamic" => CodecMode::Dynamic,
            _ => return Err(parse_err("mode")),
        };
        let visit_counts = if fields[14].is_empty() {
            Vec::new()
        } else {
            fields[14]
                .split(';')
                .map(|t| t.parse().map_err(|_| parse_err("visit count")))
                .collect::<Result<Vec<u64>>>()?
        };
        let edge_counts = if fields[15].is_empty() {
            Vec::new()
        } else {
            fields[15]
                .split(';')
                .map(|t| {
                    let parts: Vec<&str> = t.split(':').collect();
                    if parts.len() != 3 {
                        return Err(parse_err("edge count"));
                    }
                    Ok((
                        parts[0].parse().map_err(|_| parse_err("edge state"))?,
                        parts[1].parse().map_err(|_| parse_err("edge symbol"))?,
                        parts[2].parse().map_err(|_| parse_err("edge count"))?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        };
        records.push(MetricsRecord {
            mode,
            n: fields[1].parse().map_err(|_| parse_err("n"))?,
            seed: fields[2].parse().map_err(|_| parse_err("seed"))?,
            alphabet_size: fields[3].parse().map_err(|_| parse_err("alphabet size"))?,
            mfw_param: fields[4].parse().map_err(|_| parse_err("mfw param"))?,
            total_bits: fields[5].parse().map_err(|_| parse_err("total bits"))?,
            header_bits: fields[6].parse().map_err(|_| parse_err("header bits"))?,
            record_bits: fields[7].parse().map_err(|_| parse_err("record bits"))?,
            payload_bits: fields[8].parse().map_err(|_| parse_err("payload bits"))?,
            length_field_bits: fields[9].parse().map_err(|_| parse_err("length field"))?,
            bits_per_symbol: fields[10].parse().map_err(|_| parse_err("bits per symbol"))?,
            case0_count: fields[11].parse().map_err(|_| parse_err("case0 count"))?,
            shallow_beta_steps: fields[12].parse().map_err(|_| parse_err("shallow steps"))?,
            entropy_rate: fields[13].parse().map_err(|_| parse_err("entropy rate"))?,
            visit_counts,
            edge_counts,
        });
    }
    Ok(records)
}
