//! End-to-end privatization: draw a distance class, then a uniform word in
//! that class through the matching automaton.

use std::fmt;
use std::sync::{Arc, OnceLock};
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::{feasible_spectrum, MarkovChain, ProductNfa};
use crate::nfa::HammingNfa;
use crate::oracle::{enumerate_feasible, enumerate_words, ExactPmf};
use crate::pf::{class_distribution, ClassDistribution, Selection};
use crate::spectrum::DistanceSpectrum;
use crate::word::{hamming_distance, PrivacyParams, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MechanismKind {
    PfWord,
    PfMarkov,
    EmWord,
    EmMarkov,
}

impl MechanismKind {
    pub const ALL: [MechanismKind; 4] = [
        MechanismKind::PfWord,
        MechanismKind::PfMarkov,
        MechanismKind::EmWord,
        MechanismKind::EmMarkov,
    ];

    pub fn new(selection: Selection, markov: bool) -> MechanismKind {
        match (selection, markov) {
            (Selection::PermuteAndFlip, false) => MechanismKind::PfWord,
            (Selection::PermuteAndFlip, true) => MechanismKind::PfMarkov,
            (Selection::Exponential, false) => MechanismKind::EmWord,
            (Selection::Exponential, true) => MechanismKind::EmMarkov,
        }
    }

    pub fn selection(self) -> Selection {
        match self {
            MechanismKind::PfWord | MechanismKind::PfMarkov => Selection::PermuteAndFlip,
            MechanismKind::EmWord | MechanismKind::EmMarkov => Selection::Exponential,
        }
    }

    pub fn is_markov(self) -> bool {
        matches!(self, MechanismKind::PfMarkov | MechanismKind::EmMarkov)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MechanismKind::PfWord => "pf-word",
            MechanismKind::PfMarkov => "pf-markov",
            MechanismKind::EmWord => "em-word",
            MechanismKind::EmMarkov => "em-markov",
        }
    }

    fn stream_id(self) -> u64 {
        match self {
            MechanismKind::PfWord => 1,
            MechanismKind::PfMarkov => 2,
            MechanismKind::EmWord => 3,
            MechanismKind::EmMarkov => 4,
        }
    }
}

impl fmt::Display for MechanismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One privatized release.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismReport {
    pub mechanism: MechanismKind,
    pub epsilon: f64,
    pub adjacency: u32,
    pub input: String,
    pub output: String,
    pub ell: usize,
    pub seed: u64,
    /// Only filled on request so that reports stay byte-reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed mixed from the master seed, mechanism, grid index and
/// trial index. Distinct coordinates give unrelated streams.
pub fn derive_seed(master: u64, mechanism: MechanismKind, eps_index: usize, trial: usize) -> u64 {
    let mut s = splitmix64(master);
    s = splitmix64(s ^ mechanism.stream_id());
    s = splitmix64(s ^ eps_index as u64);
    splitmix64(s ^ trial as u64)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Precomputed state for repeated releases of one sensitive word.
///
/// The class distribution is built once; automata are built lazily per
/// distance and then shared, so a `Privatizer` can serve many trials across
/// threads.
pub struct Privatizer {
    kind: MechanismKind,
    word: Word,
    chain: Option<Arc<MarkovChain>>,
    dist: ClassDistribution,
    hamming: Vec<OnceLock<HammingNfa>>,
    product: Vec<OnceLock<ProductNfa>>,
}

impl Privatizer {
    /// Mechanism over all words of the input's length.
    pub fn for_word(w: &Word, params: &PrivacyParams, selection: Selection) -> Result<Privatizer> {
        if w.is_empty() {
            return Err(Error::Domain("word must have at least one symbol".into()));
        }
        let spectrum = DistanceSpectrum::full(w.len(), w.alphabet().size())?;
        let dist = class_distribution(selection, &spectrum, params)?;
        Ok(Privatizer {
            kind: MechanismKind::new(selection, false),
            word: w.clone(),
            chain: None,
            hamming: (0..=w.len()).map(|_| OnceLock::new()).collect(),
            product: vec![],
            dist,
        })
    }

    /// Mechanism restricted to feasible trajectories of `chain`.
    pub fn for_trajectory(
        chain: &Arc<MarkovChain>,
        w: &Word,
        params: &PrivacyParams,
        selection: Selection,
    ) -> Result<Privatizer> {
        if w.is_empty() {
            return Err(Error::Domain("word must have at least one symbol".into()));
        }
        chain.require_feasible(w)?;
        let spectrum = feasible_spectrum(chain, w)?;
        let dist = class_distribution(selection, &spectrum, params)?;
        Ok(Privatizer {
            kind: MechanismKind::new(selection, true),
            word: w.clone(),
            chain: Some(Arc::clone(chain)),
            hamming: vec![],
            product: (0..=w.len()).map(|_| OnceLock::new()).collect(),
            dist,
        })
    }

    pub fn kind(&self) -> MechanismKind {
        self.kind
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn distribution(&self) -> &ClassDistribution {
        &self.dist
    }

    fn hamming_at(&self, ell: usize) -> Result<&HammingNfa> {
        let cell = &self.hamming[ell];
        if let Some(nfa) = cell.get() {
            return Ok(nfa);
        }
        let mut nfa = HammingNfa::build(&self.word, ell)?;
        nfa.synthesize_policy();
        Ok(cell.get_or_init(|| nfa))
    }

    fn product_at(&self, chain: &Arc<MarkovChain>, ell: usize) -> Result<&ProductNfa> {
        let cell = &self.product[ell];
        if let Some(p) = cell.get() {
            return Ok(p);
        }
        let mut p = ProductNfa::build(chain, &self.word, ell)?;
        p.synthesize_policy();
        Ok(cell.get_or_init(|| p))
    }

    /// Draws `(ℓ, output)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(usize, Word)> {
        let ell = self.dist.sample(rng);
        let out = match &self.chain {
            None => self.hamming_at(ell)?.sample_word(rng)?,
            Some(chain) => self.product_at(chain, ell)?.sample_word(rng)?,
        };
        Ok((ell, out))
    }

    /// One release seeded from `seed`.
    pub fn run(&self, seed: u64) -> Result<MechanismReport> {
        let mut rng = rng_from_seed(seed);
        let (ell, out) = self.sample(&mut rng)?;
        let params = self.dist.params();
        Ok(MechanismReport {
            mechanism: self.kind,
            epsilon: params.epsilon(),
            adjacency: params.adjacency(),
            input: self.word.to_string(),
            output: out.to_string(),
            ell,
            seed,
            wall_time_ms: None,
        })
    }

    /// Like [`Privatizer::run`] but records elapsed time.
    pub fn run_timed(&self, seed: u64) -> Result<MechanismReport> {
        let start = Instant::now();
        let mut report = self.run(seed)?;
        report.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        Ok(report)
    }

    /// Probability that this mechanism releases `v`.
    pub fn output_prob(&self, v: &Word) -> Result<f64> {
        if let Some(chain) = &self.chain {
            if !chain.is_feasible(v)? {
                return Ok(0.0);
            }
        }
        Ok(self.dist.word_prob(hamming_distance(&self.word, v)?))
    }

    /// Exact output pmf over every admissible word, by enumeration.
    pub fn exact_pmf(&self) -> Result<ExactPmf> {
        let n = self.word.len();
        let support = match &self.chain {
            None => enumerate_words(self.word.alphabet(), n)?,
            Some(chain) => enumerate_feasible(chain, n)?,
        };
        let probs = support.iter().map(|v| self.output_prob(v)).collect::<Result<_>>()?;
        Ok(ExactPmf { support, probs })
    }
}

/// Permute-and-flip over all words of the same length.
pub fn mechanism1(w: &Word, params: &PrivacyParams, seed: u64) -> Result<MechanismReport> {
    Privatizer::for_word(w, params, Selection::PermuteAndFlip)?.run(seed)
}

/// Permute-and-flip over the feasible trajectories of `chain`.
pub fn mechanism2(chain: &Arc<MarkovChain>, w: &Word, params: &PrivacyParams, seed: u64) -> Result<MechanismReport> {
    Privatizer::for_trajectory(chain, w, params, Selection::PermuteAndFlip)?.run(seed)
}

/// Exponential-mechanism baseline, unconstrained or chain-restricted.
pub fn em_mechanism(
    chain: Option<&Arc<MarkovChain>>,
    w: &Word,
    params: &PrivacyParams,
    seed: u64,
) -> Result<MechanismReport> {
    match chain {
        None => Privatizer::for_word(w, params, Selection::Exponential)?.run(seed),
        Some(c) => Privatizer::for_trajectory(c, w, params, Selection::Exponential)?.run(seed),
    }
}

/// Exact output pmfs for every sensitive word of length `n`: all words, or
/// only the feasible ones when a chain is given.
pub fn pmf_family(
    alphabet_or_chain: Source<'_>,
    n: usize,
    params: &PrivacyParams,
    selection: Selection,
) -> Result<Vec<(Word, ExactPmf)>> {
    let inputs = match alphabet_or_chain {
        Source::Words(alphabet) => enumerate_words(alphabet, n)?,
        Source::Chain(chain) => enumerate_feasible(chain, n)?,
    };
    inputs
        .into_iter()
        .map(|w| {
            let p = match alphabet_or_chain {
                Source::Words(_) => Privatizer::for_word(&w, params, selection)?,
                Source::Chain(chain) => Privatizer::for_trajectory(chain, &w, params, selection)?,
            };
            let pmf = p.exact_pmf()?;
            Ok((w, pmf))
        })
        .collect()
}

/// Where sensitive words come from.
#[derive(Clone, Copy)]
pub enum Source<'a> {
    Words(&'a Arc<crate::word::Alphabet>),
    Chain(&'a Arc<MarkovChain>),
}
