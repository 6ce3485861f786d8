//! Acceptance suite. Each test covers one release criterion and prints a
//! single PASS/FAIL line (run with `--nocapture` to see them). Tolerances
//! are pinned here, not configurable.

use adca::antidictionary::{compute_mfw_words, Antidictionary, Word};
use adca::arith;
use adca::automaton::Automaton;
use adca::dynamic_codec::{decode_dynamic, dynamic_code_length, encode_dynamic, DynamicDecoder, DynamicEncoder};
use adca::harness::{check_bounds, median_bits_per_symbol, run_convergence, write_csv, CodecMode};
use adca::markov::SourceModel;
use adca::models;
use adca::omega::{omega_len, omega_len_bound};
use adca::static_codec::{decode_static, encode_static, StaticDecoder, StaticEncoder};
use adca::Symbol;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: u32, name: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("criterion {criterion} PASS: {name}");
    } else {
        println!("criterion {criterion} FAIL: {name} ({} problems)", failures.len());
        for f in failures.iter().take(10) {
            println!("  - {f}");
        }
        panic!("criterion {criterion} failed");
    }
}

fn binary_words_up_to(max_len: usize) -> impl Iterator<Item = Word> {
    (0..=max_len).flat_map(|len| {
        (0..(1u32 << len))
            .map(move |bits| Word::new((0..len).map(|i| ((bits >> i) & 1) as Symbol).collect()))
    })
}

// 1. Round-trip correctness: exhaustive short binary strings through both
//    codecs, plus randomized trials over alphabets up to four symbols.
#[test]
fn criterion_1_round_trip() {
    let mut failures = Vec::new();

    let sets = [
        Antidictionary::new(2, [Word::from([1u16, 1])]).unwrap(),
        Antidictionary::new(2, [Word::from([1u16, 1]), Word::from([0u16, 0, 0])]).unwrap(),
        Antidictionary::new(
            2,
            [Word::from([1u16, 1]), Word::from([0u16, 0, 0]), Word::from([1u16, 0, 1, 0, 1])],
        )
        .unwrap(),
    ];
    for x in binary_words_up_to(14) {
        for a in &sets {
            if a.forbids(&x) {
                continue;
            }
            match encode_static(&x, a).and_then(|c| decode_static(&c)) {
                Ok(back) if back == x => {}
                other => failures.push(format!("static {x}: {other:?}")),
            }
        }
        for m in 1..=3usize {
            match encode_dynamic(&x, 2, m).and_then(|c| decode_dynamic(&c)) {
                Ok(back) if back == x => {}
                other => failures.push(format!("dynamic m={m} {x}: {other:?}")),
            }
        }
        if failures.len() > 20 {
            break;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xAC01);
    for _ in 0..10_000 {
        let j = rng.random_range(2..=4u16);
        let model = models::random_model(j, 5, &mut rng);
        let n = rng.random_range(0..=300usize);
        let x = model.sample_with(n, &mut rng);
        match encode_static(&x, model.antidictionary()).and_then(|c| decode_static(&c)) {
            Ok(back) if back == x => {}
            other => failures.push(format!("static random ({j}, {n}): {other:?}")),
        }
        if failures.len() > 20 {
            break;
        }
    }
    for _ in 0..10_000 {
        let j = rng.random_range(1..=4u16);
        let m = rng.random_range(1..=5usize);
        let n = rng.random_range(0..=300usize);
        let x = Word::new((0..n).map(|_| rng.random_range(0..j)).collect());
        match encode_dynamic(&x, j, m).and_then(|c| decode_dynamic(&c)) {
            Ok(back) if back == x => {}
            other => failures.push(format!("dynamic random ({j}, {m}, {n}): {other:?}")),
        }
        if failures.len() > 20 {
            break;
        }
    }

    report(1, "static and dynamic round trips, exhaustive and randomized", &failures);
}

// 2. Minimal-forbidden-word extraction matches a direct definition-based
//    oracle for every string up to length 12 over alphabets up to three.
//
// The oracle indexes every word of length <= 5 densely (little-endian base-J
// digits per position), marks the substrings of x, then tests the raw
// definition per candidate: absent, drop-first present, drop-last present.
struct DenseOracle {
    alphabet: usize,
    max_len: usize,
    /// offsets[len] = number of words shorter than len
    offsets: Vec<usize>,
    present: Vec<bool>,
    is_mfw: Vec<bool>,
}

impl DenseOracle {
    fn new(alphabet: u16, max_len: usize) -> Self {
        let alphabet = usize::from(alphabet);
        let mut offsets = vec![0usize];
        let mut power = 1usize;
        for _ in 0..=max_len {
            offsets.push(offsets.last().unwrap() + power);
            power *= alphabet;
        }
        let total = *offsets.last().unwrap();
        DenseOracle { alphabet, max_len, offsets, present: vec![false; total], is_mfw: vec![false; total] }
    }

    fn index(&self, word: &[Symbol]) -> usize {
        let mut value = 0usize;
        for (i, &s) in word.iter().enumerate() {
            value += usize::from(s) * self.alphabet.pow(i as u32);
        }
        self.offsets[word.len()] + value
    }

    /// Recompute verdicts for `x`; returns MFW counts per length 0..=max_len.
    fn run(&mut self, x: &[Symbol]) -> Vec<usize> {
        self.present.fill(false);
        self.is_mfw.fill(false);
        self.present[0] = true; // the empty word
        for start in 0..x.len() {
            let end = (start + self.max_len).min(x.len());
            for stop in start + 1..=end {
                let idx = self.index(&x[start..stop]);
                self.present[idx] = true;
            }
        }
        let mut counts = vec![0usize; self.max_len + 1];
        for len in 1..=self.max_len {
            let count = self.offsets[len + 1] - self.offsets[len];
            let tail_power = self.alphabet.pow(len as u32 - 1);
            for value in 0..count {
                let idx = self.offsets[len] + value;
                if self.present[idx] {
                    continue;
                }
                // drop the first symbol (position 0): divide by J
                let drop_first = self.offsets[len - 1] + value / self.alphabet;
                // drop the last symbol (highest position): mod J^(len-1)
                let drop_last = self.offsets[len - 1] + value % tail_power;
                if self.present[drop_first] && self.present[drop_last] {
                    self.is_mfw[idx] = true;
                    counts[len] += 1;
                }
            }
        }
        counts
    }
}

#[test]
fn criterion_2_mfw_oracle_equivalence() {
    let mut failures = Vec::new();
    let mut checked = 0u64;
    for alphabet in 1..=3u16 {
        let mut oracle = DenseOracle::new(alphabet, 5);
        for len in 0..=12usize {
            let mut digits: Vec<Symbol> = vec![0; len];
            loop {
                let counts = oracle.run(&digits);
                let x = Word::from(digits.as_slice());
                for m in 1..=5usize {
                    let got = compute_mfw_words(&x, alphabet, m).unwrap();
                    checked += 1;
                    let want_count: usize = counts[1..=m].iter().sum();
                    let mut ok = got.len() == want_count;
                    if ok {
                        for w in &got {
                            if w.len() > m || !oracle.is_mfw[oracle.index(w.symbols())] {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if !ok {
                        failures.push(format!("x={x} J={alphabet} m={m}: {got:?}"));
                        if failures.len() > 5 {
                            report(2, "mfw extraction matches the brute-force oracle", &failures);
                        }
                    }
                }
                // odometer over base-J strings of this length
                let mut pos = 0;
                loop {
                    if pos == len {
                        break;
                    }
                    digits[pos] += 1;
                    if digits[pos] < alphabet {
                        break;
                    }
                    digits[pos] = 0;
                    pos += 1;
                }
                if pos == len {
                    break;
                }
            }
        }
    }
    assert!(checked > 4_000_000, "exhaustive sweep actually ran ({checked})");
    report(2, "mfw extraction matches the brute-force oracle", &failures);
}

// 3. Synchronization: reading any m-1 valid symbols from two different
//    states lands on the same state.
#[test]
fn criterion_3_synchronization() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC03);
    let mut applicable = 0usize;
    for i in 0..100 {
        let j = rng.random_range(2..=3u16);
        let a = models::random_antidictionary(j, 6, &mut rng);
        let g = Automaton::build_g(&Automaton::build_f(&a).unwrap()).unwrap();
        let report = g.check_synchronization(100, rng.random());
        applicable += report.applicable;
        for c in report.counterexamples {
            failures.push(format!(
                "antidictionary {i}: states {:?} diverge to {:?} on {}",
                c.from, c.reached, c.word
            ));
        }
    }
    assert!(applicable > 10_000, "enough applicable pairs sampled ({applicable})");
    report(3, "automaton synchronization has no counterexamples", &failures);
}

fn convergence_models() -> Vec<(&'static str, SourceModel, f64)> {
    vec![
        ("golden-mean p=1/2", models::golden_mean(0.5), 2.0 / 3.0),
        ("three-word uniform", models::three_word_uniform(), 0.25),
    ]
}

// 4. Static code length per symbol approaches the entropy rate.
#[test]
fn criterion_4_static_convergence() {
    let mut failures = Vec::new();
    for (name, model, entropy) in convergence_models() {
        let records =
            run_convergence(&model, CodecMode::Static, &[1 << 20], 5, 0xAC04).unwrap();
        let median = median_bits_per_symbol(&records, 1 << 20).unwrap();
        if (median - entropy).abs() > 0.02 {
            failures.push(format!("{name}: median {median:.5} vs H {entropy:.5}"));
        } else {
            println!("  static {name}: median {median:.5}, H {entropy:.5}");
        }
    }
    report(4, "static rate within 0.02 bits/symbol of the entropy rate", &failures);
}

// 5. Dynamic code length approaches the entropy rate and decreases with n.
#[test]
fn criterion_5_dynamic_convergence() {
    let mut failures = Vec::new();
    for (name, model, entropy) in convergence_models() {
        let records = run_convergence(
            &model,
            CodecMode::Dynamic,
            &[1 << 10, 1 << 20],
            5,
            0xAC05,
        )
        .unwrap();
        let small = median_bits_per_symbol(&records, 1 << 10).unwrap();
        let large = median_bits_per_symbol(&records, 1 << 20).unwrap();
        if (large - entropy).abs() > 0.05 {
            failures.push(format!("{name}: median {large:.5} vs H {entropy:.5}"));
        }
        if large >= small {
            failures.push(format!("{name}: rate did not decrease ({small:.5} -> {large:.5})"));
        }
        println!("  dynamic {name}: {small:.5} at 2^10, {large:.5} at 2^20, H {entropy:.5}");
    }
    report(5, "dynamic rate within 0.05 of the entropy rate and decreasing", &failures);
}

// 6. Header costs vanish: at n = 2^20 the non-payload bits are under 0.01
//    bits per symbol on every shipped model.
#[test]
fn criterion_6_header_vanishing() {
    let mut failures = Vec::new();
    let shipped = [
        ("golden-mean p=1/2", models::golden_mean(0.5)),
        ("golden-mean p=0.7", models::golden_mean(0.7)),
        ("three-word uniform", models::three_word_uniform()),
        ("ternary uniform", models::ternary_uniform()),
    ];
    let n = 1 << 20;
    for (name, model) in shipped {
        for mode in [CodecMode::Static, CodecMode::Dynamic] {
            let records = run_convergence(&model, mode, &[n], 1, 0xAC06).unwrap();
            let overhead = records[0].c0_bits() as f64 / n as f64;
            if overhead > 0.01 {
                failures.push(format!("{name} {mode}: {overhead:.5} bits/symbol of overhead"));
            } else {
                println!("  {name} {mode}: overhead {overhead:.6} bits/symbol");
            }
        }
    }
    report(6, "header and record costs at most 0.01 bits/symbol at n = 2^20", &failures);
}

// 7. Structural bounds: novel-extension and shallow-context counts stay
//    under their tree bounds on every run, and the omega code length obeys
//    its analytic bound over the full range the headers use.
#[test]
fn criterion_7_structural_bounds() {
    let mut failures = Vec::new();

    for n in 2..=1_000_000u64 {
        let len = omega_len(n).unwrap() as f64;
        if len > omega_len_bound(n) {
            failures.push(format!("omega length {len} over bound at n={n}"));
            if failures.len() > 5 {
                break;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xAC07);
    let mut records = Vec::new();
    for (_, model, _) in convergence_models() {
        records.extend(
            run_convergence(&model, CodecMode::Dynamic, &[1 << 10, 1 << 14], 3, 0xAC07).unwrap(),
        );
    }
    records.extend(
        run_convergence(&models::ternary_uniform(), CodecMode::Dynamic, &[1 << 12], 3, 1).unwrap(),
    );
    let bound_report = check_bounds(&records);
    failures.extend(bound_report.violations.clone());

    // unary-alphabet runs, checked directly
    for m in 1..=4usize {
        let x = Word::new(vec![0; 200]);
        let len = dynamic_code_length(&x, 1, m).unwrap();
        let d = (m - 1) as u64;
        if len.case0_count > d + 1 {
            failures.push(format!("unary m={m}: {} novel extensions", len.case0_count));
        }
        if len.shallow_beta_steps > d {
            failures.push(format!("unary m={m}: {} shallow steps", len.shallow_beta_steps));
        }
    }

    // randomized strings, not just source output
    for _ in 0..200 {
        let j = rng.random_range(2..=4u16);
        let m = rng.random_range(1..=5usize);
        let n = rng.random_range(0..=2000usize);
        let x = Word::new((0..n).map(|_| rng.random_range(0..j)).collect());
        let len = dynamic_code_length(&x, j, m).unwrap();
        let d = (m - 1) as u32;
        let jj = u128::from(j);
        let n0_bound = (jj.pow(d + 2) - 1) / (jj - 1);
        let shallow_bound = (jj.pow(d + 1) - 1) / (jj - 1);
        if u128::from(len.case0_count) > n0_bound {
            failures.push(format!("j={j} m={m} n={n}: case0 {} > {n0_bound}", len.case0_count));
        }
        if u128::from(len.shallow_beta_steps) > shallow_bound {
            failures.push(format!(
                "j={j} m={m} n={n}: shallow {} > {shallow_bound}",
                len.shallow_beta_steps
            ));
        }
    }

    report(7, "novel-extension, shallow-context and omega-length bounds", &failures);
}

// 8. Coder optimality: the arithmetic payload never exceeds the model
//    cross-entropy by more than the fixed slack.
#[test]
fn criterion_8_coder_optimality() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC08);
    for trial in 0..10_000 {
        let alphabet = rng.random_range(2..=6u16);
        let admissible: Vec<Symbol> = {
            let mut v: Vec<Symbol> =
                (0..alphabet).filter(|_| rng.random_bool(0.8)).collect();
            if v.len() < 2 {
                v = (0..alphabet).collect();
            }
            v
        };
        let len = rng.random_range(0..=100usize);
        let symbols: Vec<Symbol> =
            (0..len).map(|_| admissible[rng.random_range(0..admissible.len())]).collect();

        let mut table = arith::FrequencyTable::new(alphabet, admissible.iter().copied());
        let mut encoder = arith::Encoder::new();
        let mut oracle_counts: Vec<u64> =
            (0..alphabet).map(|c| u64::from(admissible.contains(&c))).collect();
        let mut oracle_total: u64 = oracle_counts.iter().sum();
        let mut cross_entropy = 0.0f64;
        for &s in &symbols {
            cross_entropy -= (oracle_counts[usize::from(s)] as f64 / oracle_total as f64).log2();
            oracle_counts[usize::from(s)] += 1;
            oracle_total += 1;
            encoder.encode(&mut table, s).unwrap();
        }
        let payload = encoder.finish();
        if payload.len() as f64 > cross_entropy + 16.0 {
            failures.push(format!(
                "trial {trial}: {} bits vs budget {:.2}",
                payload.len(),
                cross_entropy + 16.0
            ));
            if failures.len() > 5 {
                break;
            }
        }
    }
    report(8, "arithmetic payload within cross-entropy + 16 bits", &failures);
}

// 9. Lockstep determinism: encoder and decoder internal states agree after
//    every symbol, and fixed seeds give byte-identical CSV.
#[test]
fn criterion_9_lockstep_determinism() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xAC09);

    for trace in 0..50 {
        let model = models::random_model(rng.random_range(2..=3u16), 4, &mut rng);
        let n = rng.random_range(1..=200usize);
        let x = model.sample_with(n, &mut rng);
        let a = model.antidictionary();
        let mut enc = StaticEncoder::new(a).unwrap();
        let mut snapshots = Vec::with_capacity(n);
        for &s in x.symbols() {
            enc.push(s).unwrap();
            snapshots.push((enc.current_state(), enc.table_counts()));
        }
        let container = encode_static(&x, a).unwrap();
        let mut dec = StaticDecoder::new(&container).unwrap();
        let mut i = 0;
        while let Some(s) = dec.next_symbol().unwrap() {
            if s != x.symbols()[i]
                || (dec.current_state(), dec.table_counts()) != snapshots[i]
            {
                failures.push(format!("static trace {trace} diverges at symbol {i}"));
                break;
            }
            i += 1;
        }
        if i != x.len() && failures.is_empty() {
            failures.push(format!("static trace {trace} stopped early at {i}"));
        }
    }

    for trace in 0..50 {
        let j = rng.random_range(1..=4u16);
        let m = rng.random_range(1..=4usize);
        let n = rng.random_range(1..=200usize);
        let x = Word::new((0..n).map(|_| rng.random_range(0..j)).collect());
        let mut enc = DynamicEncoder::new(j, m);
        let mut snapshots = Vec::with_capacity(n);
        for &s in x.symbols() {
            enc.push(s).unwrap();
            snapshots.push(enc.tree().dump());
        }
        let container = encode_dynamic(&x, j, m).unwrap();
        let mut dec = DynamicDecoder::new(&container).unwrap();
        let mut i = 0;
        while let Some(s) = dec.next_symbol().unwrap() {
            if s != x.symbols()[i] || dec.tree().dump() != snapshots[i] {
                failures.push(format!("dynamic trace {trace} diverges at symbol {i}"));
                break;
            }
            i += 1;
        }
        if i != x.len() && failures.is_empty() {
            failures.push(format!("dynamic trace {trace} stopped early at {i}"));
        }
    }

    let csv = |seed: u64| {
        let model = models::golden_mean(0.5);
        let mut records =
            run_convergence(&model, CodecMode::Static, &[512, 2048], 3, seed).unwrap();
        records
            .extend(run_convergence(&model, CodecMode::Dynamic, &[512, 2048], 3, seed).unwrap());
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        buf
    };
    if csv(42) != csv(42) {
        failures.push("identical seeds produced different CSV bytes".into());
    }
    if csv(42) == csv(43) {
        failures.push("different seeds produced identical CSV bytes".into());
    }

    report(9, "lockstep state equality and reproducible CSV", &failures);
}
