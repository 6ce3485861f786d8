use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use adca::antidictionary::{compute_mfws, Antidictionary};
use adca::automaton::Automaton;
use adca::container::{MODE_DYNAMIC, MODE_STATIC};
use adca::dynamic_codec::{decode_dynamic, encode_dynamic};
use adca::harness::{self, CodecMode};
use adca::markov::SourceModel;
use adca::static_codec::{decode_static, encode_static};
use adca::{Symbol, Word};

#[derive(Parser)]
#[command(name = "adca", version, about = "Antidictionary compression and source experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a file.
    Compress(CompressArgs),
    /// Decompress a container produced by `compress`.
    Decompress {
        input: PathBuf,
        output: PathBuf,
    },
    /// Print the minimal forbidden words of a file.
    Mfw {
        /// Longest forbidden word to extract.
        #[arg(long, default_value_t = 16)]
        max_len: usize,
        /// Treat the file as a bit stream instead of bytes.
        #[arg(long)]
        binary: bool,
        input: PathBuf,
    },
    /// Dump the automata built from an antidictionary file.
    Automaton {
        #[arg(long)]
        antidictionary: PathBuf,
    },
    /// Sample a string from a source spec and write raw symbols.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the stationary distribution and entropy rate of a source spec.
    Entropy {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Convergence experiment: sample, compress, check bounds, write CSV.
    Converge(ConvergeArgs),
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    /// Longest forbidden word the static mode extracts from the input.
    #[arg(long, default_value_t = 16)]
    max_mfw_len: usize,
    /// Forbidden-word length bound m for the dynamic mode.
    #[arg(long, default_value_t = 16)]
    mfw_len: usize,
    /// Treat the file as a bit stream instead of bytes.
    #[arg(long)]
    binary: bool,
    input: PathBuf,
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Static,
    Dynamic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConvergeMode {
    Static,
    Dynamic,
    Both,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    mode: ConvergeMode,
    /// Comma-separated ascending lengths.
    #[arg(long, value_delimiter = ',', default_value = "1024,4096,16384,65536,262144,1048576")]
    lengths: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: PathBuf,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Compress(args) => compress(args),
        Command::Decompress { input, output } => decompress(input, output),
        Command::Mfw { max_len, binary, input } => mfw(max_len, binary, input),
        Command::Automaton { antidictionary } => automaton(antidictionary),
        Command::Simulate { spec, n, seed, out } => simulate(spec, n, seed, out),
        Command::Entropy { spec } => entropy(spec),
        Command::Converge(args) => converge(args),
    }
}

fn bytes_to_word(bytes: &[u8], binary: bool) -> Word {
    if binary {
        let mut symbols = Vec::with_capacity(bytes.len() * 8);
        for &b in bytes {
            for i in (0..8).rev() {
                symbols.push(u16::from((b >> i) & 1));
            }
        }
        Word::new(symbols)
    } else {
        Word::new(bytes.iter().map(|&b| u16::from(b)).collect())
    }
}

fn word_to_bytes(word: &Word, alphabet: u16) -> Result<Vec<u8>> {
    match alphabet {
        2 => {
            // bit symbols, MSB first, as produced by --binary
            if word.len() % 8 != 0 {
                bail!("bit-symbol container holds {} bits, not a whole number of bytes", word.len());
            }
            Ok(word
                .symbols()
                .chunks(8)
                .map(|bits| bits.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
                .collect())
        }
        j if j <= 256 => Ok(word.symbols().iter().map(|&s| s as u8).collect()),
        j => bail!("container alphabet {j} does not map back to bytes"),
    }
}

fn compress(args: CompressArgs) -> Result<ExitCode> {
    let data = fs::read(&args.input).with_context(|| format!("reading {:?}", args.input))?;
    let word = bytes_to_word(&data, args.binary);
    let alphabet: u16 = if args.binary { 2 } else { 256 };
    let container = match args.mode {
        Mode::Static => {
            let a = compute_mfws(&word, alphabet, args.max_mfw_len)
                .context("extracting the antidictionary (try a larger --max-mfw-len)")?;
            encode_static(&word, &a)?
        }
        Mode::Dynamic => encode_dynamic(&word, alphabet, args.mfw_len)?,
    };
    fs::write(&args.output, &container).with_context(|| format!("writing {:?}", args.output))?;
    eprintln!(
        "{} -> {} bytes ({:.3} bits/symbol over {} symbols)",
        data.len(),
        container.len(),
        if word.is_empty() { 0.0 } else { container.len() as f64 * 8.0 / word.len() as f64 },
        word.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn decompress(input: PathBuf, output: PathBuf) -> Result<ExitCode> {
    let container = fs::read(&input).with_context(|| format!("reading {input:?}"))?;
    if container.len() < 2 {
        bail!("container too short");
    }
    let (word, alphabet) = match container[1] {
        MODE_STATIC => {
            let word = decode_static(&container)?;
            let mut reader = adca::bits::BitReader::new(&container);
            adca::container::read_prelude(&mut reader)?;
            let alphabet = adca::omega::omega_decode(&mut reader)? as u16;
            (word, alphabet)
        }
        MODE_DYNAMIC => {
            let word = decode_dynamic(&container)?;
            let mut reader = adca::bits::BitReader::new(&container);
            adca::container::read_prelude(&mut reader)?;
            let alphabet = adca::omega::omega_decode(&mut reader)? as u16;
            (word, alphabet)
        }
        mode => bail!("unknown mode byte 0x{mode:02X}"),
    };
    let bytes = word_to_bytes(&word, alphabet)?;
    fs::write(&output, &bytes).with_context(|| format!("writing {output:?}"))?;
    eprintln!("{} -> {} bytes", container.len(), bytes.len());
    Ok(ExitCode::SUCCESS)
}

fn mfw(max_len: usize, binary: bool, input: PathBuf) -> Result<ExitCode> {
    if max_len < 1 {
        bail!("--max-len must be at least 1");
    }
    let data = fs::read(&input).with_context(|| format!("reading {input:?}"))?;
    let word = bytes_to_word(&data, binary);
    let alphabet: u16 = if binary { 2 } else { 256 };
    let a = compute_mfws(&word, alphabet, max_len)?;
    print!("{}", a.to_text());
    Ok(ExitCode::SUCCESS)
}

fn automaton(path: PathBuf) -> Result<ExitCode> {
    let text = fs::read_to_string(&path).with_context(|| format!("reading {path:?}"))?;
    let a = Antidictionary::parse(&text)?;
    let f = Automaton::build_f(&a)?;
    let g = Automaton::build_g(&f)?;
    println!("# F(A)");
    print!("{}", f.dump());
    println!("# G(A)");
    print!("{}", g.dump());
    Ok(ExitCode::SUCCESS)
}

fn simulate(spec: PathBuf, n: usize, seed: u64, out: PathBuf) -> Result<ExitCode> {
    let model = load_spec(&spec)?;
    if model.alphabet_size() > 256 {
        bail!("raw output supports alphabets up to 256 symbols");
    }
    let x = model.sample(n, seed);
    let bytes: Vec<u8> = x.symbols().iter().map(|&s| s as u8).collect();
    fs::write(&out, &bytes).with_context(|| format!("writing {out:?}"))?;
    eprintln!("wrote {} symbols", n);
    Ok(ExitCode::SUCCESS)
}

fn entropy(spec: PathBuf) -> Result<ExitCode> {
    let model = load_spec(&spec)?;
    let info = model.stationary()?;
    let g = model.automaton();
    println!("entropy {} bits/symbol", info.entropy);
    for (i, mu) in info.mu.iter().enumerate() {
        let edges = g
            .edge_symbols(i)
            .into_iter()
            .map(|c: Symbol| format!("{c}:{}", model.probability(i, c)))
            .collect::<Vec<_>>()
            .join(" ");
        println!("state {i} locus {} mu {mu} edges {edges}", g.locus(i).dotted());
    }
    Ok(ExitCode::SUCCESS)
}

fn converge(args: ConvergeArgs) -> Result<ExitCode> {
    if args.lengths.is_empty() || args.lengths.windows(2).any(|w| w[0] > w[1]) {
        bail!("--lengths must be non-empty and ascending");
    }
    let model = load_spec(&args.spec)?;
    let mut records = Vec::new();
    let modes: &[CodecMode] = match args.mode {
        ConvergeMode::Static => &[CodecMode::Static],
        ConvergeMode::Dynamic => &[CodecMode::Dynamic],
        ConvergeMode::Both => &[CodecMode::Static, CodecMode::Dynamic],
    };
    for &mode in modes {
        records.extend(harness::run_convergence(
            &model,
            mode,
            &args.lengths,
            args.trials,
            args.seed,
        )?);
    }
    harness::emit_csv(&records, &args.csv)?;
    let info = model.stationary()?;
    for &mode in modes {
        for &n in &args.lengths {
            let subset: Vec<_> =
                records.iter().filter(|r| r.mode == mode).cloned().collect();
            if let Some(median) = harness::median_bits_per_symbol(&subset, n) {
                println!("{mode} n={n} median {median:.5} bits/symbol (H {:.5})", info.entropy);
            }
        }
    }
    let report = harness::check_bounds(&records);
    if !report.is_clean() {
        for v in &report.violations {
            eprintln!("bound violation: {v}");
        }
        return Ok(ExitCode::FAILURE);
    }
    println!("bounds ok over {} records", report.checked);
    Ok(ExitCode::SUCCESS)
}

fn load_spec(path: &PathBuf) -> Result<SourceModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {path:?}"))?;
    Ok(SourceModel::parse_spec(&text)?)
}
