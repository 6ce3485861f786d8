//! Markov sources driven by the pruned forbidden-word automaton: edge
//! probabilities, the stationary distribution, the entropy rate and string
//! sampling. Single-edge states always carry probability one; only
//! branching states contribute entropy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::antidictionary::{Antidictionary, Word};
use crate::automaton::{Automaton, StateId};
use crate::error::{Error, Result};
use crate::Symbol;

const PROB_SUM_TOL: f64 = 1e-9;
/// Stationary masses below this are treated as zero when splitting S2.
const MU_ZERO_TOL: f64 = 1e-12;

/// A stationary Markov source on G(A).
#[derive(Debug, Clone)]
pub struct SourceModel {
    antidictionary: Antidictionary,
    automaton: Automaton,
    /// probs[state][symbol] > 0 exactly on the edges of the automaton.
    probs: Vec<Vec<f64>>,
}

impl SourceModel {
    /// Uniform branching: every edge of a branching state gets equal
    /// probability; single edges get probability one.
    pub fn uniform(antidictionary: Antidictionary) -> Result<Self> {
        let automaton = Automaton::build_g(&Automaton::build_f(&antidictionary)?)?;
        // a source never terminates: every state needs an outgoing edge
        for s in 0..automaton.num_states() {
            if automaton.out_degree(s) == 0 {
                return Err(Error::DegenerateAutomaton { locus: automaton.locus(s).dotted() });
            }
        }
        let probs = (0..automaton.num_states())
            .map(|s| {
                let edges = automaton.edge_symbols(s);
                let p = 1.0 / edges.len() as f64;
                let mut row = vec![0.0; usize::from(automaton.alphabet_size())];
                for e in edges {
                    row[usize::from(e)] = p;
                }
                row
            })
            .collect();
        Ok(SourceModel { antidictionary, automaton, probs })
    }

    /// Explicit probabilities for branching states. `assignments` maps a
    /// state locus to `(symbol, probability)` pairs; every edge of a listed
    /// state must be covered and sum to one. Unlisted branching states
    /// default to uniform; single-edge states are forced to one.
    pub fn with_probabilities(
        antidictionary: Antidictionary,
        assignments: &[(Word, Vec<(Symbol, f64)>)],
    ) -> Result<Self> {
        let mut model = Self::uniform(antidictionary)?;
        for (locus, pairs) in assignments {
            let state = model
                .automaton
                .state_of(locus)
                .filter(|&s| model.automaton.locus(s) == locus)
                .ok_or_else(|| {
                    Error::InvalidProbability(format!("'{locus}' is not a state locus"))
                })?;
            let edges = model.automaton.edge_symbols(state);
            if edges.len() == 1 {
                // forced anyway; accept only an explicit probability of one
                match pairs.as_slice() {
                    [(s, p)] if *s == edges[0] && (*p - 1.0).abs() <= PROB_SUM_TOL => continue,
                    _ => {
                        return Err(Error::InvalidProbability(format!(
                            "state '{locus}' has a single edge; its probability is fixed at 1"
                        )))
                    }
                }
            }
            let mut row = vec![0.0; usize::from(model.automaton.alphabet_size())];
            for &(symbol, p) in pairs {
                if !edges.contains(&symbol) {
                    return Err(Error::InvalidProbability(format!(
                        "state '{locus}' has no edge labeled {symbol}"
                    )));
                }
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::InvalidProbability(format!(
                        "probability {p} for edge {symbol} at '{locus}' is outside (0, 1]"
                    )));
                }
                if row[usize::from(symbol)] != 0.0 {
                    return Err(Error::InvalidProbability(format!(
                        "edge {symbol} at '{locus}' specified twice"
                    )));
                }
                row[usize::from(symbol)] = p;
            }
            for &e in &edges {
                if row[usize::from(e)] == 0.0 {
                    return Err(Error::InvalidProbability(format!(
                        "edge {e} at '{locus}' left unspecified"
                    )));
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > PROB_SUM_TOL {
                return Err(Error::InvalidProbability(format!(
                    "probabilities at '{locus}' sum to {sum}, not 1"
                )));
            }
            model.probs[state] = row;
        }
        Ok(model)
    }

    /// Parse a source spec file: the antidictionary text format plus
    /// optional `prob <locus symbols|lambda> <symbol> <p>` lines.
    pub fn parse_spec(text: &str) -> Result<Self> {
        let antidictionary = Antidictionary::parse(text)?;
        let mut by_locus: Vec<(Word, Vec<(Symbol, f64)>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            let Some(rest) = line.strip_prefix("prob ") else { continue };
            let tokens: Vec<&str> = rest.split_whitespace().collect();
            if tokens.len() < 3 {
                return Err(Error::Parse {
                    line: lineno,
                    message: "prob line needs <locus> <symbol> <p>".into(),
                });
            }
            let p: f64 = tokens[tokens.len() - 1].parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid probability '{}'", tokens[tokens.len() - 1]),
            })?;
            let symbol: Symbol = tokens[tokens.len() - 2].parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid symbol '{}'", tokens[tokens.len() - 2]),
            })?;
            let locus_tokens = &tokens[..tokens.len() - 2];
            let locus = if locus_tokens == ["lambda"] {
                Word::empty()
            } else {
                let mut symbols = Vec::new();
                for t in locus_tokens {
                    symbols.push(t.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("invalid locus symbol '{t}'"),
                    })?);
                }
                Word::new(symbols)
            };
            match by_locus.iter_mut().find(|(l, _)| *l == locus) {
                Some((_, pairs)) => pairs.push((symbol, p)),
                None => by_locus.push((locus, vec![(symbol, p)])),
            }
        }
        Self::with_probabilities(antidictionary, &by_locus)
    }

    pub fn antidictionary(&self) -> &Antidictionary {
        &self.antidictionary
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn alphabet_size(&self) -> u16 {
        self.automaton.alphabet_size()
    }

    pub fn probability(&self, state: StateId, symbol: Symbol) -> f64 {
        self.probs[state][usize::from(symbol)]
    }

    /// Sample a length-n string by walking the automaton from the initial
    /// state, drawing each symbol by cumulative-probability inversion in
    /// canonical symbol order. Deterministic for a given seed.
    pub fn sample(&self, n: usize, seed: u64) -> Word {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(n, &mut rng)
    }

    pub fn sample_with<R: Rng>(&self, n: usize, rng: &mut R) -> Word {
        let mut out = Vec::with_capacity(n);
        let mut state = self.automaton.initial();
        for _ in 0..n {
            let u: f64 = rng.random();
            let row = &self.probs[state];
            let mut cum = 0.0;
            let mut chosen = None;
            for (symbol, &p) in row.iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                cum += p;
                if u < cum {
                    chosen = Some(symbol as Symbol);
                    break;
                }
            }
            // cumulative rounding can leave u just past the final edge
            let symbol = chosen.unwrap_or_else(|| {
                (0..row.len() as u16).rev().find(|&s| row[usize::from(s)] > 0.0).unwrap()
            });
            out.push(symbol);
            state = self.automaton.step(state, symbol).expect("edges follow probabilities");
        }
        Word::new(out)
    }

    /// Stationary distribution, S2 split by stationary mass, and the
    /// entropy rate. Errors when more than one closed communicating class
    /// would make the distribution ambiguous.
    pub fn stationary(&self) -> Result<StationaryInfo> {
        let n = self.automaton.num_states();
        let closed = self.count_closed_classes();
        if closed != 1 {
            return Err(Error::NonUniqueStationary { closed_classes: closed });
        }
        // mu (P - I + E) = 1 with E all ones: nonsingular for a unique
        // closed class, and its solution is the stationary vector.
        let mut matrix = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut p_ij = 0.0;
                for (symbol, &p) in self.probs[i].iter().enumerate() {
                    if p > 0.0 && self.automaton.step(i, symbol as Symbol) == Some(j) {
                        p_ij += p;
                    }
                }
                let identity = if i == j { 1.0 } else { 0.0 };
                // transposed: unknowns multiply from the left
                matrix[j][i] = p_ij - identity + 1.0;
            }
        }
        let mut mu = solve_linear(matrix, vec![1.0; n])?;
        for m in &mut mu {
            // transient states solve to +-1e-16 noise; keep mu >= 0
            if *m < 0.0 {
                if *m < -1e-9 {
                    return Err(Error::SingularSystem);
                }
                *m = 0.0;
            }
        }
        let entropy = self.entropy_rate_for(&mu);
        let (_, s2) = self.automaton.classify();
        let mut s2_zero = Vec::new();
        let mut s2_pos = Vec::new();
        for &s in &s2 {
            if mu[s] <= MU_ZERO_TOL {
                s2_zero.push(s);
            } else {
                s2_pos.push(s);
            }
        }
        Ok(StationaryInfo { mu, entropy, s2_zero, s2_pos })
    }

    /// Entropy rate in bits per symbol: stationary-weighted branch entropy
    /// of the branching states, with 0 log 0 = 0.
    fn entropy_rate_for(&self, mu: &[f64]) -> f64 {
        let (_, s2) = self.automaton.classify();
        let mut h = 0.0;
        for &s in &s2 {
            let mut state_h = 0.0;
            for &p in &self.probs[s] {
                if p > 0.0 {
                    state_h -= p * p.log2();
                }
            }
            h += mu[s] * state_h;
        }
        h
    }

    fn count_closed_classes(&self) -> usize {
        let n = self.automaton.num_states();
        let mut reach = vec![vec![false; n]; n];
        for i in 0..n {
            let mut stack = vec![i];
            reach[i][i] = true;
            while let Some(s) = stack.pop() {
                for (symbol, &p) in self.probs[s].iter().enumerate() {
                    if p > 0.0 {
                        let t = self.automaton.step(s, symbol as Symbol).unwrap();
                        if !reach[i][t] {
                            reach[i][t] = true;
                            stack.push(t);
                        }
                    }
                }
            }
        }
        let mut seen = vec![false; n];
        let mut closed = 0;
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let class: Vec<usize> = (0..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
            for &j in &class {
                seen[j] = true;
            }
            let escapes =
                class.iter().any(|&j| (0..n).any(|t| reach[j][t] && !class.contains(&t)));
            if !escapes {
                closed += 1;
            }
        }
        closed
    }

    /// Test-and-harness constructor bypassing the automaton builder.
    #[cfg(test)]
    pub(crate) fn synthetic(automaton: Automaton, probs: Vec<Vec<f64>>) -> Self {
        use crate::antidictionary;
        let x = Word::new(vec![0, 1]);
        let antidictionary =
            antidictionary::compute_mfws(&x, 2, 2).expect("placeholder antidictionary");
        SourceModel { antidictionary, automaton, probs }
    }
}

/// Stationary distribution and derived classification of a [`SourceModel`].
#[derive(Debug, Clone)]
pub struct StationaryInfo {
    /// Per-state stationary probabilities, summing to one.
    pub mu: Vec<f64>,
    /// Entropy rate in bits per symbol.
    pub entropy: f64,
    /// Branching states with zero stationary mass.
    pub s2_zero: Vec<StateId>,
    /// Branching states with positive stationary mass.
    pub s2_pos: Vec<StateId>,
}

/// Gaussian elimination with partial pivoting.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    const PIVOT_TOL: f64 = 1e-12;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot_row][col].abs() < PIVOT_TOL {
            return Err(Error::SingularSystem);
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                let pivot_val = a[col][k];
                a[row][k] -= factor * pivot_val;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut sum = b[row];
        for k in row + 1..n {
            sum -= a[row][k] * x[k];
        }
        x[row] = sum / a[row][row];
    }
    Ok(x)
}
