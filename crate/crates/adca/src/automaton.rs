//! Deterministic forbidden-word automata. `build_f` constructs the full
//! automaton whose sink states absorb every string containing a forbidden
//! word; `build_g` strips the sinks to leave the prediction machine the
//! codecs walk. States are numbered breadth-first over the proper prefixes
//! by (length, lexicographic), with the empty-word state first; sinks, when
//! present, follow in the same order of their words.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::antidictionary::{Antidictionary, Word};
use crate::error::{Error, Result};
use crate::Symbol;

pub type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Normal,
    Sink,
}

#[derive(Debug, Clone)]
struct State {
    locus: Word,
    kind: StateKind,
    /// Outgoing edge per symbol; `None` only in the pruned automaton.
    edges: Vec<Option<StateId>>,
}

#[derive(Debug, Clone)]
pub struct Automaton {
    alphabet: u16,
    mfw_max_len: usize,
    /// True for F(A) (total transitions, sinks present).
    full: bool,
    states: Vec<State>,
}

impl Automaton {
    /// Build F(A): one state per proper prefix of a forbidden word plus one
    /// sink per forbidden word. Edges follow the longest-suffix rule.
    pub fn build_f(a: &Antidictionary) -> Result<Self> {
        let issues = a.validate_words();
        if let Some(first) = issues.first() {
            return Err(Error::InvalidAntidictionary(first.to_string()));
        }
        let alphabet = a.alphabet_size();

        let mut prefixes: HashSet<Word> = HashSet::new();
        for w in a.words() {
            for len in 0..w.len() {
                prefixes.insert(Word::from(&w.symbols()[..len]));
            }
        }
        let mut ordered: Vec<Word> = prefixes.iter().cloned().collect();
        ordered.sort_by(|x, y| (x.len(), x.symbols()).cmp(&(y.len(), y.symbols())));

        let mut index: HashMap<Word, StateId> = HashMap::new();
        let mut states: Vec<State> = Vec::with_capacity(ordered.len() + a.len());
        for w in &ordered {
            index.insert(w.clone(), states.len());
            states.push(State {
                locus: w.clone(),
                kind: StateKind::Normal,
                edges: vec![None; usize::from(alphabet)],
            });
        }
        let mut sink_of: HashMap<Word, StateId> = HashMap::new();
        for w in a.words() {
            sink_of.insert(w.clone(), states.len());
            states.push(State {
                locus: w.clone(),
                kind: StateKind::Sink,
                edges: vec![None; usize::from(alphabet)],
            });
        }

        // Edges from prefix states: extend, else fall back to the longest
        // suffix of the extension that is a prefix or a forbidden word.
        let mut extended: Vec<Symbol> = Vec::new();
        for (id, w) in ordered.iter().enumerate() {
            for sym in 0..alphabet {
                extended.clear();
                extended.extend_from_slice(w.symbols());
                extended.push(sym);
                let target = Self::resolve(&extended, &index, &sink_of);
                states[id].edges[usize::from(sym)] = Some(target);
            }
        }
        // Sink edges all loop.
        for id in ordered.len()..states.len() {
            for sym in 0..alphabet {
                states[id].edges[usize::from(sym)] = Some(id);
            }
        }

        Ok(Automaton { alphabet, mfw_max_len: a.max_len(), full: true, states })
    }

    fn resolve(
        extended: &[Symbol],
        index: &HashMap<Word, StateId>,
        sink_of: &HashMap<Word, StateId>,
    ) -> StateId {
        for start in 0..=extended.len() {
            let suffix = Word::from(&extended[start..]);
            if let Some(&sink) = sink_of.get(&suffix) {
                return sink;
            }
            if let Some(&id) = index.get(&suffix) {
                return id;
            }
        }
        unreachable!("the empty suffix is always a prefix state");
    }

    /// Build G(A) from F(A) by deleting sinks and edges into sinks. Errors
    /// when the initial state is left without an outgoing edge, which makes
    /// the automaton unable to accept anything. Deeper states may end up
    /// edgeless: they mark contexts with no valid continuation, and a walk
    /// over a string avoiding A can only reach one at its very end.
    pub fn build_g(f: &Automaton) -> Result<Self> {
        assert!(f.full, "build_g expects the full automaton");
        let sink_ids: HashSet<StateId> = f
            .states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind == StateKind::Sink)
            .map(|(i, _)| i)
            .collect();
        // Prefix states come first in the canonical order, so dropping the
        // sinks keeps every surviving index unchanged.
        let mut states: Vec<State> = Vec::new();
        for (id, s) in f.states.iter().enumerate() {
            if s.kind == StateKind::Sink {
                continue;
            }
            debug_assert_eq!(id, states.len());
            let edges: Vec<Option<StateId>> = s
                .edges
                .iter()
                .map(|e| e.filter(|t| !sink_ids.contains(t)))
                .collect();
            if id == 0 && edges.iter().all(Option::is_none) {
                return Err(Error::DegenerateAutomaton { locus: s.locus.dotted() });
            }
            states.push(State { locus: s.locus.clone(), kind: StateKind::Normal, edges });
        }
        Ok(Automaton { alphabet: f.alphabet, mfw_max_len: f.mfw_max_len, full: false, states })
    }

    pub fn alphabet_size(&self) -> u16 {
        self.alphabet
    }

    /// Length m of the longest forbidden word this automaton was built from.
    pub fn mfw_max_len(&self) -> usize {
        self.mfw_max_len
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// The initial state s(lambda).
    pub fn initial(&self) -> StateId {
        0
    }

    pub fn kind(&self, s: StateId) -> StateKind {
        self.states[s].kind
    }

    pub fn locus(&self, s: StateId) -> &Word {
        &self.states[s].locus
    }

    /// One transition; `None` marks a forbidden continuation (pruned form
    /// only — the full automaton is total).
    pub fn step(&self, s: StateId, symbol: Symbol) -> Option<StateId> {
        if symbol >= self.alphabet {
            return None;
        }
        self.states[s].edges[usize::from(symbol)]
    }

    /// Fold of [`step`] from the initial state; `None` if any prefix hits a
    /// forbidden transition.
    pub fn state_of(&self, w: &Word) -> Option<StateId> {
        let mut s = self.initial();
        for &sym in w.symbols() {
            s = self.step(s, sym)?;
        }
        Some(s)
    }

    /// Labels of the outgoing edges of `s` in canonical symbol order.
    pub fn edge_symbols(&self, s: StateId) -> Vec<Symbol> {
        (0..self.alphabet)
            .filter(|&a| self.states[s].edges[usize::from(a)].is_some())
            .collect()
    }

    pub fn out_degree(&self, s: StateId) -> usize {
        self.states[s].edges.iter().filter(|e| e.is_some()).count()
    }

    /// Partition states into S1 (exactly one outgoing edge) and S2 (two or
    /// more). Meaningful on the pruned automaton.
    pub fn classify(&self) -> (Vec<StateId>, Vec<StateId>) {
        let mut s1 = Vec::new();
        let mut s2 = Vec::new();
        for id in 0..self.states.len() {
            match self.out_degree(id) {
                0 | 1 => s1.push(id),
                _ => s2.push(id),
            }
        }
        (s1, s2)
    }

    /// Check the synchronization property: for every pair of states and a
    /// sampled word w of length m-1, if w can be read from both states then
    /// both walks end in the same state. Returns the counterexamples found
    /// (an empty report for every valid automaton).
    pub fn check_synchronization(&self, words_per_pair: usize, seed: u64) -> SyncReport {
        assert!(!self.full, "synchronization is a property of the pruned automaton");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = self.mfw_max_len.saturating_sub(1);
        let mut report = SyncReport::default();
        for i in 0..self.states.len() {
            for j in i + 1..self.states.len() {
                for _ in 0..words_per_pair {
                    let w = Word::new(
                        (0..len).map(|_| rng.random_range(0..self.alphabet)).collect(),
                    );
                    report.tested += 1;
                    let a = self.walk(i, &w);
                    let b = self.walk(j, &w);
                    match (a, b) {
                        (Some(sa), Some(sb)) => {
                            report.applicable += 1;
                            if sa != sb {
                                report.counterexamples.push(SyncCounterexample {
                                    from: (i, j),
                                    word: w,
                                    reached: (sa, sb),
                                });
                            }
                        }
                        _ => {}
                    }
                }
            }
        }
        report
    }

    fn walk(&self, from: StateId, w: &Word) -> Option<StateId> {
        let mut s = from;
        for &sym in w.symbols() {
            s = self.step(s, sym)?;
        }
        Some(s)
    }

    /// Deterministic text listing of states, edges and the S1/S2
    /// classification, for golden tests and the CLI dump.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("alphabet {}\n", self.alphabet));
        out.push_str(&format!("mfw-max-len {}\n", self.mfw_max_len));
        out.push_str(&format!("states {}\n", self.states.len()));
        for (id, s) in self.states.iter().enumerate() {
            let kind = match s.kind {
                StateKind::Normal => "normal",
                StateKind::Sink => "sink",
            };
            out.push_str(&format!("state {id} {kind} {}\n", s.locus.dotted()));
        }
        out.push_str("edges\n");
        for (id, s) in self.states.iter().enumerate() {
            for (sym, target) in s.edges.iter().enumerate() {
                if let Some(t) = target {
                    out.push_str(&format!("{id} {sym} {t}\n"));
                }
            }
        }
        if !self.full {
            let (s1, s2) = self.classify();
            let join = |v: &[StateId]| {
                v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
            };
            out.push_str(&format!("s1 {}\n", join(&s1)));
            out.push_str(&format!("s2 {}\n", join(&s2)));
        }
        out
    }

    /// Test-only constructor for synthetic automata (e.g. pure cycles that
    /// no antidictionary generates).
    #[cfg(test)]
    pub(crate) fn synthetic(alphabet: u16, edges: Vec<Vec<Option<StateId>>>) -> Self {
        let states = edges
            .into_iter()
            .enumerate()
            .map(|(i, e)| {
                assert_eq!(e.len(), usize::from(alphabet));
                State { locus: Word::new(vec![i as Symbol]), kind: StateKind::Normal, edges: e }
            })
            .collect();
        Automaton { alphabet, mfw_max_len: 1, full: false, states }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncCounterexample {
    pub from: (StateId, StateId),
    pub word: Word,
    pub reached: (StateId, StateId),
}

#[derive(Debug, Clone, Default)]
pub struct SyncReport {
    pub tested: usize,
    /// Pairs where both walks survived and the property applies.
    pub applicable: usize,
    pub counterexamples: Vec<SyncCounterexample>,
}

impl SyncReport {
    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
    }
}
