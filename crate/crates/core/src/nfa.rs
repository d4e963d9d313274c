//! The substitution-only Hamming automaton for a fixed word and distance.
//!
//! State `(i, j)` means `i` symbols have been emitted and `j` of them differ
//! from the sensitive word. Emitting `w[i]` keeps `j`; any other symbol
//! increments it. Only states that can still finish with exactly `ℓ`
//! differences are kept, so the automaton has `O(n·ℓ)` states and a single
//! accepting state `(n, ℓ)`.

use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;

use crate::dag::{Edge, Layered};
use crate::error::{Error, Result};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NfaState {
    /// Symbols emitted so far.
    pub pos: usize,
    /// Differences from the sensitive word so far.
    pub errors: usize,
}

impl NfaState {
    pub const fn new(pos: usize, errors: usize) -> NfaState {
        NfaState { pos, errors }
    }
}

impl fmt::Display for NfaState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.pos, self.errors)
    }
}

/// Accepts exactly the words at Hamming distance `ℓ` from a sensitive word.
#[derive(Debug, Clone)]
pub struct HammingNfa {
    word: Word,
    distance: usize,
    dag: Layered<NfaState>,
}

impl HammingNfa {
    pub fn build(word: &Word, distance: usize) -> Result<HammingNfa> {
        let n = word.len();
        if distance > n {
            return Err(Error::Domain(format!("distance {distance} exceeds word length {n}")));
        }
        let m = word.alphabet().size();
        // errors j is viable at position i iff j <= i, j <= ℓ and ℓ - j <= n - i
        let range = |i: usize| (distance.saturating_sub(n - i))..=(i.min(distance));
        let layers: Vec<Vec<NfaState>> = (0..=n)
            .map(|i| range(i).map(|j| NfaState::new(i, j)).collect())
            .collect();
        let edges = (0..=n)
            .map(|i| {
                layers[i]
                    .iter()
                    .map(|s| {
                        if i == n {
                            return vec![];
                        }
                        let next = range(i + 1);
                        let first = *next.start();
                        let expected = word.symbols()[i];
                        (0..m)
                            .filter_map(|sym| {
                                let j = s.errors + usize::from(sym != expected);
                                next.contains(&j).then(|| Edge {
                                    symbol: sym,
                                    target: j - first,
                                })
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(HammingNfa {
            word: word.clone(),
            distance,
            dag: Layered::new(layers, edges),
        })
    }

    /// Fills completion counts `V` and the branch policy `V(q')/V(q)`.
    pub fn synthesize_policy(&mut self) {
        self.dag.synthesize();
    }

    pub fn is_synthesized(&self) -> bool {
        self.dag.is_synthesized()
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn start(&self) -> NfaState {
        NfaState::new(0, 0)
    }

    pub fn accepting(&self) -> NfaState {
        NfaState::new(self.word.len(), self.distance)
    }

    pub fn states(&self) -> impl Iterator<Item = NfaState> + '_ {
        self.dag.layers.iter().flatten().copied()
    }

    pub fn contains(&self, state: NfaState) -> bool {
        self.dag.locate(state).is_some()
    }

    /// The transition relation `δ(q, σ)`.
    pub fn step(&self, state: NfaState, symbol: usize) -> Option<NfaState> {
        let (i, k) = self.dag.locate(state)?;
        self.dag.edges[i][k]
            .iter()
            .find(|e| e.symbol == symbol)
            .map(|e| self.dag.layers[i + 1][e.target])
    }

    /// Outgoing `(symbol, successor)` pairs in symbol order.
    pub fn transitions(&self, state: NfaState) -> Vec<(usize, NfaState)> {
        match self.dag.locate(state) {
            Some((i, k)) => self.dag.edges[i][k]
                .iter()
                .map(|e| (e.symbol, self.dag.layers[i + 1][e.target]))
                .collect(),
            None => vec![],
        }
    }

    /// Completion count `V(q)`: accepting paths from `q`.
    pub fn completion(&self, state: NfaState) -> Option<&BigUint> {
        let (i, k) = self.dag.locate(state)?;
        self.dag.count_at(i, k)
    }

    /// Policy value `μ(δ(q, σ), σ | q)` as an exact ratio.
    pub fn branch_probability(&self, state: NfaState, symbol: usize) -> Option<BigRational> {
        let (i, k) = self.dag.locate(state)?;
        let edge = self.dag.edges[i][k].iter().find(|e| e.symbol == symbol)?;
        self.dag.edge_ratio(i, k, edge)
    }

    /// Number of accepted words, once synthesized.
    pub fn language_size(&self) -> Option<BigUint> {
        self.dag.language_size()
    }

    pub fn accepts(&self, candidate: &Word) -> bool {
        if candidate.len() != self.word.len() || candidate.alphabet() != self.word.alphabet() {
            return false;
        }
        let mut state = self.start();
        for &sym in candidate.symbols() {
            match self.step(state, sym) {
                Some(next) => state = next,
                None => return false,
            }
        }
        state == self.accepting()
    }

    /// Uniform draw from the accepted language.
    pub fn sample_word<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Word> {
        let symbols = self.dag.sample_path(rng)?;
        Word::new(self.word.alphabet().clone(), symbols)
    }

    /// Every accepted word, by path enumeration.
    pub fn language(&self) -> Result<Vec<Word>> {
        self.dag
            .paths()?
            .into_iter()
            .map(|p| Word::new(self.word.alphabet().clone(), p))
            .collect()
    }

    /// Text dump of states, edges, counts and policy ratios.
    pub fn export_graph(&self) -> String {
        let alphabet = self.word.alphabet();
        self.dag.export(
            &format!("# hamming-nfa word={} distance={}", self.word, self.distance),
            |s| s.to_string(),
            |sym| alphabet.symbol(sym).to_string(),
        )
    }
}

pub fn build_mnfa(word: &Word, distance: usize) -> Result<HammingNfa> {
    HammingNfa::build(word, distance)
}

pub fn synthesize_policy(mut nfa: HammingNfa) -> HammingNfa {
    nfa.synthesize_policy();
    nfa
}

pub fn sample_word<R: Rng + ?Sized>(nfa: &HammingNfa, rng: &mut R) -> Result<Word> {
    nfa.sample_word(rng)
}
