//! Test models used by the convergence experiments and shipped as spec
//! files under `models/` at the repository root, plus seeded generators for
//! random antidictionaries and sources.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::antidictionary::{compute_mfw_words, Antidictionary, Word};
use crate::automaton::Automaton;
use crate::error::Result;
use crate::markov::SourceModel;
use crate::Symbol;

fn word(symbols: &[Symbol]) -> Word {
    Word::from(symbols)
}

/// The golden-mean source: the single forbidden word `11` over a binary
/// alphabet, with `p0` the probability of emitting 0 at the branching
/// (empty-word) state. `p0 = 0.5` gives entropy rate 2/3.
pub fn golden_mean(p0: f64) -> SourceModel {
    let a = Antidictionary::new(2, [word(&[1, 1])]).expect("valid antidictionary");
    SourceModel::with_probabilities(a, &[(Word::empty(), vec![(0, p0), (1, 1.0 - p0)])])
        .expect("valid probabilities")
}

/// The three-word model `{11, 000, 10101}` with uniform branching.
/// Entropy rate 1/4.
pub fn three_word_uniform() -> SourceModel {
    let a = Antidictionary::new(2, [word(&[1, 1]), word(&[0, 0, 0]), word(&[1, 0, 1, 0, 1])])
        .expect("valid antidictionary");
    SourceModel::uniform(a).expect("buildable automaton")
}

/// A ternary model with uniform branching, generated once from
/// `random_antidictionary(3, 4, seed 3)` and frozen here.
pub fn ternary_uniform() -> SourceModel {
    SourceModel::uniform(ternary_antidictionary()).expect("buildable automaton")
}

pub fn ternary_antidictionary() -> Antidictionary {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    random_antidictionary(3, 4, &mut rng)
}

/// Sample a valid antidictionary: minimal forbidden words of a random
/// string, retried until the pruned automaton is buildable. `max_len`
/// bounds the word length.
pub fn random_antidictionary<R: Rng>(alphabet: u16, max_len: usize, rng: &mut R) -> Antidictionary {
    loop {
        let len = rng.random_range(max_len * 4..=max_len * 40);
        let x = Word::new((0..len).map(|_| rng.random_range(0..alphabet)).collect());
        let cap = rng.random_range(2..=max_len.max(2));
        let Ok(words) = compute_mfw_words(&x, alphabet, cap) else { continue };
        if words.is_empty() {
            continue;
        }
        let Ok(a) = Antidictionary::new(alphabet, words) else { continue };
        if Automaton::build_f(&a).and_then(|f| Automaton::build_g(&f)).is_ok() {
            return a;
        }
    }
}

/// A random source over a random antidictionary with uniform branching.
pub fn random_model<R: Rng>(alphabet: u16, max_len: usize, rng: &mut R) -> SourceModel {
    loop {
        let a = random_antidictionary(alphabet, max_len, rng);
        if let Ok(m) = SourceModel::uniform(a) {
            return m;
        }
    }
}

/// Spec-file text for the shipped models, used to keep `models/` in sync.
pub fn spec_text(model: &SourceModel) -> Result<String> {
    let mut out = model.antidictionary().to_text();
    let g = model.automaton();
    for s in 0..g.num_states() {
        if g.out_degree(s) < 2 {
            continue;
        }
        for c in g.edge_symbols(s) {
            out.push_str(&format!("prob {} {} {}\n", g.locus(s), c, model.probability(s, c)));
        }
    }
    Ok(out)
}
