//! Markov chains, trajectory feasibility and the product automaton that
//! restricts Hamming-distance sampling to feasible trajectories.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dag::{Edge, Layered};
use crate::error::{Error, Result};
use crate::spectrum::DistanceSpectrum;
use crate::word::{Alphabet, Word};

/// Tolerance on row sums of the transition matrix.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// A finite Markov chain with a fixed initial state.
///
/// Chain states double as output symbols. The initial state is context: it
/// constrains the first symbol of a trajectory but is never part of the word.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    states: Arc<Alphabet>,
    transitions: Vec<Vec<f64>>,
    initial: usize,
}

/// On-disk JSON layout of a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFile {
    pub states: Vec<String>,
    pub initial: String,
    pub transitions: Vec<Vec<f64>>,
}

impl MarkovChain {
    pub fn new(states: Arc<Alphabet>, transitions: Vec<Vec<f64>>, initial: usize) -> Result<MarkovChain> {
        let k = states.size();
        if initial >= k {
            return Err(Error::Invalid(format!("initial state index {initial} out of range")));
        }
        if transitions.len() != k {
            return Err(Error::Invalid(format!(
                "transition matrix has {} rows for {k} states",
                transitions.len()
            )));
        }
        for (i, row) in transitions.iter().enumerate() {
            let label = states.symbol(i);
            if row.len() != k {
                return Err(Error::Invalid(format!("row {label} has {} entries, expected {k}", row.len())));
            }
            if let Some(bad) = row.iter().find(|p| !p.is_finite() || **p < 0.0 || **p > 1.0) {
                return Err(Error::Invalid(format!("row {label} has entry {bad} outside [0, 1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::Invalid(format!("row {label} sums to {sum}, not 1")));
            }
        }
        Ok(MarkovChain {
            states,
            transitions,
            initial,
        })
    }

    pub fn from_file(file: ChainFile) -> Result<MarkovChain> {
        let states = Alphabet::new(file.states)?;
        let initial = states
            .index_of(&file.initial)
            .ok_or_else(|| Error::Invalid(format!("initial state {:?} is not a listed state", file.initial)))?;
        MarkovChain::new(states, file.transitions, initial)
    }

    pub fn to_file(&self) -> ChainFile {
        ChainFile {
            states: self.states.symbols().to_vec(),
            initial: self.states.symbol(self.initial).to_string(),
            transitions: self.transitions.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<MarkovChain> {
        MarkovChain::from_file(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("chain serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<MarkovChain> {
        MarkovChain::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }

    /// Random chain over `k` states `y0..y{k-1}` starting at `y0`; each
    /// transition is present with probability `density`, and every row keeps
    /// at least one.
    pub fn synthetic(k: usize, density: f64, seed: u64) -> Result<MarkovChain> {
        if !(density > 0.0 && density <= 1.0) {
            return Err(Error::Domain(format!("density must lie in (0, 1], got {density}")));
        }
        let states = Alphabet::new((0..k).map(|i| format!("y{i}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let transitions = (0..k)
            .map(|_| {
                let mut row: Vec<f64> = (0..k)
                    .map(|_| {
                        if density >= 1.0 || rng.random::<f64>() < density {
                            0.05 + rng.random::<f64>()
                        } else {
                            0.0
                        }
                    })
                    .collect();
                if row.iter().all(|&p| p == 0.0) {
                    row[rng.random_range(0..k)] = 1.0;
                }
                let sum: f64 = row.iter().sum();
                row.iter_mut().for_each(|p| *p /= sum);
                row
            })
            .collect();
        MarkovChain::new(states, transitions, 0)
    }

    pub fn states(&self) -> &Arc<Alphabet> {
        &self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn transitions(&self) -> &[Vec<f64>] {
        &self.transitions
    }

    pub fn probability(&self, from: usize, to: usize) -> f64 {
        self.transitions[from][to]
    }

    pub fn allows(&self, from: usize, to: usize) -> bool {
        self.transitions[from][to] > 0.0
    }

    fn successors(&self, from: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.states.size()).filter(move |&to| self.allows(from, to))
    }

    fn check_alphabet(&self, w: &Word) -> Result<()> {
        if !Arc::ptr_eq(w.alphabet(), &self.states) && **w.alphabet() != *self.states {
            return Err(Error::Dimension("word alphabet differs from the chain state space".into()));
        }
        Ok(())
    }

    /// First zero-probability step of `w` from the initial state, as
    /// `(from, to, position)`.
    pub fn first_infeasible_step(&self, w: &Word) -> Result<Option<(usize, usize, usize)>> {
        self.check_alphabet(w)?;
        let mut prev = self.initial;
        for (pos, &y) in w.symbols().iter().enumerate() {
            if !self.allows(prev, y) {
                return Ok(Some((prev, y, pos)));
            }
            prev = y;
        }
        Ok(None)
    }

    /// True iff every step of `w`, starting from the initial state, has
    /// positive probability.
    pub fn is_feasible(&self, w: &Word) -> Result<bool> {
        Ok(self.first_infeasible_step(w)?.is_none())
    }

    /// Fails with [`Error::Infeasible`] naming the first bad transition.
    pub fn require_feasible(&self, w: &Word) -> Result<()> {
        match self.first_infeasible_step(w)? {
            None => Ok(()),
            Some((from, to, position)) => Err(Error::Infeasible {
                from: self.states.symbol(from).to_string(),
                to: self.states.symbol(to).to_string(),
                position,
            }),
        }
    }

    /// Samples an `n`-step trajectory from the initial state.
    pub fn trajectory<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Word> {
        let mut state = self.initial;
        let mut symbols = Vec::with_capacity(n);
        for _ in 0..n {
            let u: f64 = rng.random();
            let row = &self.transitions[state];
            let mut acc = 0.0;
            let mut next = None;
            for (to, &p) in row.iter().enumerate() {
                if p <= 0.0 {
                    continue;
                }
                acc += p;
                next = Some(to);
                if u < acc {
                    break;
                }
            }
            state = next.expect("rows have positive mass");
            symbols.push(state);
        }
        Word::new(self.states.clone(), symbols)
    }

    /// States reachable from the initial state in `1..=max_steps` steps.
    pub fn reachable_states(&self, max_steps: usize) -> Vec<usize> {
        let k = self.states.size();
        let mut seen = vec![false; k];
        let mut frontier = vec![self.initial];
        for _ in 0..max_steps {
            let mut next = vec![];
            for &s in &frontier {
                for t in self.successors(s) {
                    if !seen[t] {
                        seen[t] = true;
                        next.push(t);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            frontier = next;
        }
        (0..k).filter(|&s| seen[s]).collect()
    }
}

/// Product state: Hamming-automaton position and error count, plus the
/// chain state most recently emitted (the initial state before any output).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductState {
    pub pos: usize,
    pub errors: usize,
    pub chain_state: usize,
}

impl ProductState {
    pub const fn new(pos: usize, errors: usize, chain_state: usize) -> ProductState {
        ProductState {
            pos,
            errors,
            chain_state,
        }
    }
}

impl fmt::Display for ProductState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{},#{}", self.pos, self.errors, self.chain_state)
    }
}

/// Accepts exactly the feasible trajectories at distance `ℓ` from a feasible
/// sensitive trajectory.
#[derive(Debug, Clone)]
pub struct ProductNfa {
    chain: Arc<MarkovChain>,
    word: Word,
    distance: usize,
    dag: Layered<ProductState>,
}

impl ProductNfa {
    pub fn build(chain: &Arc<MarkovChain>, word: &Word, distance: usize) -> Result<ProductNfa> {
        chain.require_feasible(word)?;
        let n = word.len();
        if distance > n {
            return Err(Error::Domain(format!("distance {distance} exceeds word length {n}")));
        }
        let viable = |i: usize, j: usize| j <= distance && distance - j <= n - i;
        let mut layers = vec![vec![ProductState::new(0, 0, chain.initial())]];
        let mut edges: Vec<Vec<Vec<Edge>>> = vec![];
        for i in 0..n {
            let expected = word.symbols()[i];
            let mut next: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            let mut raw: Vec<Vec<(usize, (usize, usize))>> = vec![];
            for s in &layers[i] {
                let out: Vec<_> = chain
                    .successors(s.chain_state)
                    .filter_map(|y| {
                        let j = s.errors + usize::from(y != expected);
                        viable(i + 1, j).then_some((y, (j, y)))
                    })
                    .collect();
                for &(_, key) in &out {
                    next.insert(key, 0);
                }
                raw.push(out);
            }
            for (idx, slot) in next.values_mut().enumerate() {
                *slot = idx;
            }
            edges.push(
                raw.into_iter()
                    .map(|out| {
                        out.into_iter()
                            .map(|(y, key)| Edge {
                                symbol: y,
                                target: next[&key],
                            })
                            .collect()
                    })
                    .collect(),
            );
            layers.push(next.keys().map(|&(j, y)| ProductState::new(i + 1, j, y)).collect());
        }
        edges.push(vec![vec![]; layers[n].len()]);
        Ok(ProductNfa {
            chain: Arc::clone(chain),
            word: word.clone(),
            distance,
            dag: Layered::new(layers, edges).prune(),
        })
    }

    /// Fills `V(q, y)` backward from every accepting state and the policy
    /// `V(q', y') / V(q, y)`.
    pub fn synthesize_policy(&mut self) {
        self.dag.synthesize();
    }

    pub fn is_synthesized(&self) -> bool {
        self.dag.is_synthesized()
    }

    pub fn chain(&self) -> &Arc<MarkovChain> {
        &self.chain
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    pub fn start(&self) -> ProductState {
        ProductState::new(0, 0, self.chain.initial())
    }

    /// True when no feasible word lies at this distance.
    pub fn is_empty(&self) -> bool {
        self.dag.layers[0].is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = ProductState> + '_ {
        self.dag.layers.iter().flatten().copied()
    }

    pub fn step(&self, state: ProductState, symbol: usize) -> Option<ProductState> {
        let (i, k) = self.dag.locate(state)?;
        self.dag.edges[i][k]
            .iter()
            .find(|e| e.symbol == symbol)
            .map(|e| self.dag.layers[i + 1][e.target])
    }

    pub fn transitions(&self, state: ProductState) -> Vec<(usize, ProductState)> {
        match self.dag.locate(state) {
            Some((i, k)) => self.dag.edges[i][k]
                .iter()
                .map(|e| (e.symbol, self.dag.layers[i + 1][e.target]))
                .collect(),
            None => vec![],
        }
    }

    pub fn completion(&self, state: ProductState) -> Option<&BigUint> {
        let (i, k) = self.dag.locate(state)?;
        self.dag.count_at(i, k)
    }

    /// `μ_y(δ(q, y'), y' | q, y)` as an exact ratio.
    pub fn branch_probability(&self, state: ProductState, symbol: usize) -> Option<BigRational> {
        let (i, k) = self.dag.locate(state)?;
        let edge = self.dag.edges[i][k].iter().find(|e| e.symbol == symbol)?;
        self.dag.edge_ratio(i, k, edge)
    }

    /// `N(ℓ)`: feasible words at this distance. Zero when empty.
    pub fn language_size(&self) -> Option<BigUint> {
        if self.is_empty() {
            return self.is_synthesized().then(BigUint::zero);
        }
        self.dag.language_size()
    }

    pub fn sample_word<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Word> {
        if self.is_empty() {
            return Err(Error::EmptyClass(self.distance));
        }
        let symbols = self.dag.sample_path(rng)?;
        Word::new(self.word.alphabet().clone(), symbols)
    }

    pub fn language(&self) -> Result<Vec<Word>> {
        if self.is_empty() {
            return Ok(vec![]);
        }
        self.dag
            .paths()?
            .into_iter()
            .map(|p| Word::new(self.word.alphabet().clone(), p))
            .collect()
    }

    pub fn export_graph(&self) -> String {
        let states = self.chain.states();
        self.dag.export(
            &format!("# product-nfa word={} distance={}", self.word, self.distance),
            |s| format!("{}^{},{}", s.pos, s.errors, states.symbol(s.chain_state)),
            |sym| states.symbol(sym).to_string(),
        )
    }
}

pub fn build_product(chain: &Arc<MarkovChain>, word: &Word, distance: usize) -> Result<ProductNfa> {
    ProductNfa::build(chain, word, distance)
}

pub fn synthesize_product_policy(mut pnfa: ProductNfa) -> ProductNfa {
    pnfa.synthesize_policy();
    pnfa
}

pub fn sample_feasible_word<R: Rng + ?Sized>(pnfa: &ProductNfa, rng: &mut R) -> Result<Word> {
    pnfa.sample_word(rng)
}

pub fn is_feasible(chain: &MarkovChain, w: &Word) -> Result<bool> {
    chain.is_feasible(w)
}

/// Feasible words per Hamming distance from `w`.
///
/// One backward pass over (position, chain state) carrying, for each suffix,
/// the number of feasible completions per error count.
pub fn feasible_spectrum(chain: &MarkovChain, w: &Word) -> Result<DistanceSpectrum> {
    chain.require_feasible(w)?;
    let n = w.len();
    let k = chain.states().size();
    // suffix[y][e]: feasible continuations from chain state y at position i
    // that differ from w[i..] in exactly e places
    let mut suffix: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]; k];
    for i in (0..n).rev() {
        let expected = w.symbols()[i];
        let width = n - i + 1;
        suffix = (0..k)
            .map(|y| {
                let mut acc = vec![BigUint::zero(); width];
                for next in chain.successors(y) {
                    let shift = usize::from(next != expected);
                    for (e, c) in suffix[next].iter().enumerate() {
                        acc[e + shift] += c;
                    }
                }
                acc
            })
            .collect();
    }
    DistanceSpectrum::from_counts(suffix.swap_remove(chain.initial()))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::nfa::{build_mnfa, synthesize_policy};
    use crate::oracle::{enumerate_feasible, enumerate_words};
    use crate::spectrum::class_count;
    use crate::word::hamming_distance;
    use std::collections::{BTreeSet, HashMap};

    /// Four-state chain: y0↔y2, y0↔y3, y2↔y3, y0→y1, y1→y2, y1→y3.
    pub(crate) fn four_state_chain() -> Arc<MarkovChain> {
        let t = vec![
            vec![0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            vec![0.0, 0.0, 0.5, 0.5],
            vec![0.5, 0.0, 0.0, 0.5],
            vec![0.5, 0.0, 0.5, 0.0],
        ];
        Arc::new(MarkovChain::new(Alphabet::parse("y0,y1,y2,y3").unwrap(), t, 0).unwrap())
    }

    fn word(chain: &MarkovChain, text: &str) -> Word {
        Word::parse(chain.states(), text).unwrap()
    }

    fn ratio(n: u32, d: u32) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn feasibility_examples() {
        let chain = four_state_chain();
        assert!(is_feasible(&chain, &word(&chain, "y1,y2,y3")).unwrap());
        assert!(!is_feasible(&chain, &word(&chain, "y3,y1,y1")).unwrap());
        let err = chain.require_feasible(&word(&chain, "y3,y1,y1")).unwrap_err();
        assert!(err.to_string().contains("y3 -> y1"), "{err}");
        // the first step is checked from the initial state
        assert!(!is_feasible(&chain, &word(&chain, "y0,y1")).unwrap());

        let identity = MarkovChain::new(
            Alphabet::parse("p,q").unwrap(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            0,
        )
        .unwrap();
        assert!(is_feasible(&identity, &word(&identity, "p,p,p")).unwrap());
        assert!(!is_feasible(&identity, &word(&identity, "p,q")).unwrap());

        let other = Word::parse(&Alphabet::parse("a,b").unwrap(), "ab").unwrap();
        assert!(matches!(is_feasible(&chain, &other), Err(Error::Dimension(_))));
    }

    #[test]
    fn worked_example_product() {
        let chain = four_state_chain();
        let w = word(&chain, "y1,y2,y3");
        let p = synthesize_product_policy(build_product(&chain, &w, 2).unwrap());
        assert_eq!(p.language_size().unwrap(), BigUint::from(5u32));
        let start = p.start();
        assert_eq!(p.completion(start).unwrap(), &BigUint::from(5u32));
        assert_eq!(p.branch_probability(start, 2).unwrap(), ratio(1, 5));
        assert_eq!(p.branch_probability(start, 3).unwrap(), ratio(2, 5));
        assert_eq!(p.branch_probability(start, 1).unwrap(), ratio(2, 5));
        assert_eq!(p.step(start, 1), Some(ProductState::new(1, 0, 1)));
        assert_eq!(p.step(start, 2), Some(ProductState::new(1, 1, 2)));

        let s11y3 = ProductState::new(1, 1, 3);
        assert_eq!(p.step(s11y3, 0), Some(ProductState::new(2, 2, 0)));
        assert_eq!(p.step(s11y3, 2), Some(ProductState::new(2, 1, 2)));
        assert_eq!(p.branch_probability(s11y3, 0).unwrap(), ratio(1, 2));
        assert_eq!(p.branch_probability(s11y3, 2).unwrap(), ratio(1, 2));
        assert_eq!(p.branch_probability(ProductState::new(1, 1, 2), 0).unwrap(), ratio(1, 1));
        assert_eq!(p.branch_probability(ProductState::new(2, 1, 3), 0).unwrap(), ratio(1, 2));

        // dead states such as (2^2, y3) are pruned
        assert!(p.completion(ProductState::new(2, 2, 3)).is_none());
        let got: BTreeSet<String> = p.language().unwrap().iter().map(|x| x.to_string()).collect();
        let want: BTreeSet<String> = ["y1,y3,y0", "y1,y3,y2", "y2,y0,y3", "y3,y0,y3", "y3,y2,y0"]
            .into_iter()
            .map(String::from)
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn worked_example_export() {
        let chain = four_state_chain();
        let w = word(&chain, "y1,y2,y3");
        let p = synthesize_product_policy(build_product(&chain, &w, 2).unwrap());
        let text = p.export_graph();
        assert!(text.starts_with("# product-nfa word=y1,y2,y3 distance=2\nstate 0^0,y0 V=5\n"));
        assert!(text.contains("edge 0^0,y0 -y2-> 1^1,y2 mu=1/5\n"));
        assert!(text.contains("edge 1^1,y3 -y0-> 2^2,y0 mu=1/2\n"));
        assert!(text.contains("edge 2^1,y3 -y2-> 3^2,y2 mu=1/2\n"));
    }

    #[test]
    fn zero_distance_single_path() {
        let chain = four_state_chain();
        let w = word(&chain, "y2,y0,y1");
        let p = synthesize_product_policy(build_product(&chain, &w, 0).unwrap());
        assert_eq!(p.language_size().unwrap(), BigUint::one());
        for s in p.states().filter(|s| s.pos < 3) {
            for (sym, _) in p.transitions(s) {
                assert_eq!(p.branch_probability(s, sym).unwrap(), ratio(1, 1));
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(p.sample_word(&mut rng).unwrap(), w);
    }

    #[test]
    fn infeasible_sensitive_word_is_rejected() {
        let chain = four_state_chain();
        let w = word(&chain, "y3,y1,y1");
        assert!(matches!(build_product(&chain, &w, 1), Err(Error::Infeasible { .. })));
        assert!(matches!(feasible_spectrum(&chain, &w), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn empty_class_is_signalled() {
        // a deterministic cycle admits exactly one trajectory
        let chain = Arc::new(
            MarkovChain::new(
                Alphabet::parse("a,b,c").unwrap(),
                vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]],
                0,
            )
            .unwrap(),
        );
        let w = word(&chain, "b,c,a");
        let p = synthesize_product_policy(build_product(&chain, &w, 2).unwrap());
        assert!(p.is_empty());
        assert_eq!(p.language_size().unwrap(), BigUint::zero());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(p.sample_word(&mut rng), Err(Error::EmptyClass(2))));
        let spectrum = feasible_spectrum(&chain, &w).unwrap();
        assert_eq!(spectrum.counts(), &[1u32, 0, 0, 0].map(BigUint::from));
    }

    #[test]
    fn fully_connected_chain_matches_unconstrained_automaton() {
        let m = 4;
        let chain = Arc::new(MarkovChain::synthetic(m, 1.0, 3).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = chain.trajectory(6, &mut rng).unwrap();
        let spectrum = feasible_spectrum(&chain, &w).unwrap();
        assert_eq!(spectrum, DistanceSpectrum::full(6, m).unwrap());
        for ell in 0..=6 {
            let p = synthesize_product_policy(build_product(&chain, &w, ell).unwrap());
            let plain = synthesize_policy(build_mnfa(&w, ell).unwrap());
            assert_eq!(p.language_size().unwrap(), class_count(6, m, ell).unwrap());
            for s in p.states() {
                let q = crate::nfa::NfaState::new(s.pos, s.errors);
                assert_eq!(p.completion(s), plain.completion(q), "state {s}");
            }
        }
    }

    #[test]
    fn spectrum_and_language_match_brute_force() {
        for seed in 0..6u64 {
            let k = 2 + (seed as usize % 5);
            let chain = Arc::new(MarkovChain::synthetic(k, 0.5, seed).unwrap());
            for n in 1..=5 {
                let feasible = enumerate_feasible(&chain, n).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
                let w = chain.trajectory(n, &mut rng).unwrap();
                let spectrum = feasible_spectrum(&chain, &w).unwrap();
                assert_eq!(spectrum.total(), BigUint::from(feasible.len()));
                assert_eq!(spectrum.count(0), &BigUint::one());
                for ell in 0..=n {
                    let p = synthesize_product_policy(build_product(&chain, &w, ell).unwrap());
                    let got: BTreeSet<String> = p.language().unwrap().iter().map(|x| x.to_string()).collect();
                    let want: BTreeSet<String> = feasible
                        .iter()
                        .filter(|v| hamming_distance(&w, v).unwrap() == ell)
                        .map(|x| x.to_string())
                        .collect();
                    assert_eq!(got, want);
                    assert_eq!(p.language_size().unwrap(), spectrum.count(ell).clone());
                    for s in p.states().filter(|s| s.pos < n) {
                        let total: BigRational = p
                            .transitions(s)
                            .iter()
                            .map(|&(sym, _)| p.branch_probability(s, sym).unwrap())
                            .sum();
                        assert_eq!(total, BigRational::one());
                    }
                }
            }
        }
    }

    #[test]
    fn feasible_totals_match_enumeration_exhaustively() {
        for k in 2..=6 {
            let chain = MarkovChain::synthetic(k, 0.6, k as u64 * 31).unwrap();
            for n in 1..=6 {
                let feasible = enumerate_feasible(&chain, n).unwrap();
                let w = &feasible[feasible.len() / 2];
                let spectrum = feasible_spectrum(&chain, w).unwrap();
                assert_eq!(spectrum.total(), BigUint::from(feasible.len()), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn sampler_is_uniform_and_feasible() {
        let chain = four_state_chain();
        let w = word(&chain, "y1,y2,y3");
        let p = synthesize_product_policy(build_product(&chain, &w, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let draws = 50_000;
        let mut hist: HashMap<String, usize> = HashMap::new();
        for _ in 0..draws {
            let v = sample_feasible_word(&p, &mut rng).unwrap();
            assert!(chain.is_feasible(&v).unwrap());
            assert_eq!(hamming_distance(&v, &w).unwrap(), 2);
            *hist.entry(v.to_string()).or_default() += 1;
        }
        assert_eq!(hist.len(), 5);
        let sigma = (draws as f64 * 0.2 * 0.8).sqrt();
        for &c in hist.values() {
            assert!((c as f64 - draws as f64 * 0.2).abs() < 3.0 * sigma, "{hist:?}");
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let chain = MarkovChain::synthetic(43, 0.1, 17).unwrap();
        let back = MarkovChain::from_json(&chain.to_json()).unwrap();
        assert_eq!(back, chain);
        assert!(chain.transitions().iter().all(|row| row.iter().any(|&p| p > 0.0)));

        let bad_sum = r#"{"states":["a","b"],"initial":"a","transitions":[[0.5,0.4],[0,1]]}"#;
        assert!(matches!(MarkovChain::from_json(bad_sum), Err(Error::Invalid(_))));
        let bad_init = r#"{"states":["a","b"],"initial":"c","transitions":[[0.5,0.5],[0,1]]}"#;
        assert!(matches!(MarkovChain::from_json(bad_init), Err(Error::Invalid(_))));
        let ragged = r#"{"states":["a","b"],"initial":"a","transitions":[[1.0],[0,1]]}"#;
        assert!(MarkovChain::from_json(ragged).is_err());
        assert!(MarkovChain::from_json("{").is_err());
    }

    #[test]
    fn synthetic_generation() {
        let dense = MarkovChain::synthetic(5, 1.0, 8).unwrap();
        assert!(dense.transitions().iter().flatten().all(|&p| p > 0.0));
        assert_eq!(MarkovChain::synthetic(10, 0.3, 4).unwrap(), MarkovChain::synthetic(10, 0.3, 4).unwrap());
        assert!(MarkovChain::synthetic(4, 0.0, 1).is_err());
        assert!(MarkovChain::synthetic(1, 0.5, 1).is_err());
        assert_eq!(dense.reachable_states(3), vec![0, 1, 2, 3, 4]);
        let chain = four_state_chain();
        assert_eq!(chain.reachable_states(1), vec![1, 2, 3]);
        assert_eq!(chain.reachable_states(2), vec![0, 1, 2, 3]);
    }

    #[test]
    fn trajectories_are_feasible() {
        let chain = MarkovChain::synthetic(12, 0.25, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            assert!(chain.is_feasible(&chain.trajectory(20, &mut rng).unwrap()).unwrap());
        }
        let all = enumerate_words(chain.states(), 1).unwrap();
        assert_eq!(all.len(), 12);
    }
}
