//! Brute-force ground truth for desk-sized instances.
//!
//! Nothing here touches the class-level machinery in [`crate::pf`] or the
//! automata: the pmf comes from the literal alternating subset sum over an
//! explicit candidate list, and [`simulate_pf`] runs the shuffle-then-accept
//! procedure directly. Both exist to check the production path.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::markov::MarkovChain;
use crate::word::{hamming_distance, utility, Alphabet, PrivacyParams, Word};

/// Largest candidate set the subset-sum oracle will enumerate.
pub const SUBSET_LIMIT: usize = 24;
/// Largest word set the enumerators will materialize.
pub const WORD_LIMIT: usize = 1 << 16;

/// An explicit pmf over output words.
#[derive(Debug, Clone)]
pub struct ExactPmf {
    pub support: Vec<Word>,
    pub probs: Vec<f64>,
}

impl ExactPmf {
    pub fn prob_of(&self, w: &Word) -> f64 {
        self.support
            .iter()
            .position(|s| s == w)
            .map_or(0.0, |i| self.probs[i])
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// `Ψ` by literal enumeration: the sum over every subset `S` of the
/// candidates other than `exclude` of `(-1)^|S| / (|S|+1) · Π exp(ε·u_s / 2b)`.
pub fn psi_literal(utilities: &[i64], exclude: usize, params: &PrivacyParams) -> Result<f64> {
    if utilities.len() > SUBSET_LIMIT {
        return Err(Error::Capacity {
            what: "subset-sum candidate set",
            size: utilities.len(),
            limit: SUBSET_LIMIT,
        });
    }
    assert!(exclude < utilities.len(), "excluded index out of range");
    let rate = params.rate();
    let weights: Vec<f64> = utilities
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != exclude)
        .map(|(_, &u)| (rate * u as f64).exp())
        .collect();
    // by_size[k] = sum over |S| = k of the subset product
    let mut by_size = vec![0.0f64; weights.len() + 1];
    fn walk(weights: &[f64], size: usize, product: f64, by_size: &mut [f64]) {
        match weights.split_first() {
            None => by_size[size] += product,
            Some((&w, rest)) => {
                walk(rest, size, product, by_size);
                walk(rest, size + 1, product * w, by_size);
            }
        }
    }
    walk(&weights, 0, 1.0, &mut by_size);
    let (mut pos, mut neg) = (0.0, 0.0);
    for (k, s) in by_size.iter().enumerate() {
        let term = s / (k + 1) as f64;
        if k % 2 == 0 {
            pos += term;
        } else {
            neg += term;
        }
    }
    Ok(pos - neg)
}

/// Permute-and-flip pmf of `w` over an explicit candidate set.
pub fn exact_pf_pmf(w: &Word, candidates: &[Word], params: &PrivacyParams) -> Result<ExactPmf> {
    let utilities = candidates
        .iter()
        .map(|c| utility(w, c))
        .collect::<Result<Vec<_>>>()?;
    let rate = params.rate();
    let probs = (0..candidates.len())
        .map(|i| Ok((rate * utilities[i] as f64).exp() * psi_literal(&utilities, i, params)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExactPmf {
        support: candidates.to_vec(),
        probs,
    })
}

/// Empirical frequencies of the shuffle-then-accept sampler, aligned with
/// `candidates`.
///
/// Each trial visits candidates in uniformly random order and accepts the
/// current one with probability `exp(ε(u - u_max) / 2b)`; a candidate of
/// maximal utility always accepts, so every trial ends within one pass.
pub fn simulate_pf<R: Rng + ?Sized>(
    w: &Word,
    candidates: &[Word],
    params: &PrivacyParams,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if candidates.is_empty() {
        return Err(Error::Domain("empty candidate set".into()));
    }
    let utilities = candidates
        .iter()
        .map(|c| utility(w, c))
        .collect::<Result<Vec<_>>>()?;
    let best = *utilities.iter().max().expect("nonempty");
    let rate = params.rate();
    let accept: Vec<f64> = utilities
        .iter()
        .map(|&u| (rate * (u - best) as f64).exp())
        .collect();
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    let mut hits = vec![0u64; candidates.len()];
    for _ in 0..trials {
        order.shuffle(rng);
        for &r in &order {
            if accept[r] >= 1.0 || rng.random::<f64>() < accept[r] {
                hits[r] += 1;
                break;
            }
        }
    }
    Ok(hits.iter().map(|&h| h as f64 / trials as f64).collect())
}

/// Result of an exhaustive differential-privacy check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpReport {
    pub epsilon: f64,
    pub adjacency: u32,
    /// Largest `ln(pmf_w(o) / pmf_v(o))` over adjacent `(w, v)` and outputs `o`.
    pub max_log_ratio: f64,
    /// The `(w, v, o)` achieving the maximum.
    pub worst: Option<(String, String, String)>,
    pub pairs_checked: usize,
    pub holds: bool,
}

/// Slack allowed on top of `ε` when deciding whether the bound holds.
pub const DP_SLACK: f64 = 1e-9;

/// Maximum log-ratio of output probabilities over all adjacent input pairs.
///
/// An output with positive probability under one input and zero under an
/// adjacent one yields an infinite ratio.
pub fn verify_dp(family: &[(Word, ExactPmf)], adjacency: u32, epsilon: f64) -> Result<DpReport> {
    let tables: Vec<HashMap<&Word, f64>> = family
        .iter()
        .map(|(_, pmf)| pmf.support.iter().zip(pmf.probs.iter().copied()).collect())
        .collect();
    let mut max_log_ratio = f64::NEG_INFINITY;
    let mut worst = None;
    let mut pairs = 0;
    for (i, (w, _)) in family.iter().enumerate() {
        for (j, (v, _)) in family.iter().enumerate() {
            if i == j || hamming_distance(w, v)? > adjacency as usize {
                continue;
            }
            pairs += 1;
            for (&out, &p) in &tables[i] {
                let q = tables[j].get(out).copied().unwrap_or(0.0);
                let ratio = match (p > 0.0, q > 0.0) {
                    (false, _) => continue,
                    (true, false) => f64::INFINITY,
                    (true, true) => (p / q).ln(),
                };
                if ratio > max_log_ratio {
                    max_log_ratio = ratio;
                    worst = Some((w.to_string(), v.to_string(), out.to_string()));
                }
            }
        }
    }
    if pairs == 0 {
        max_log_ratio = 0.0;
    }
    Ok(DpReport {
        epsilon,
        adjacency,
        max_log_ratio,
        worst,
        pairs_checked: pairs,
        holds: max_log_ratio <= epsilon + DP_SLACK,
    })
}

/// Every word of length `n` over `alphabet`, in lexicographic index order.
pub fn enumerate_words(alphabet: &Arc<Alphabet>, n: usize) -> Result<Vec<Word>> {
    let m = alphabet.size();
    let total = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > WORD_LIMIT as u128 {
        return Err(Error::Capacity {
            what: "word enumeration",
            size: usize::try_from(total).unwrap_or(usize::MAX),
            limit: WORD_LIMIT,
        });
    }
    (0..total as usize)
        .map(|mut code| {
            let mut symbols = vec![0; n];
            for slot in symbols.iter_mut().rev() {
                *slot = code % m;
                code /= m;
            }
            Word::new(Arc::clone(alphabet), symbols)
        })
        .collect()
}

/// Feasible trajectories of length `n`, by filtering the full enumeration.
pub fn enumerate_feasible(chain: &MarkovChain, n: usize) -> Result<Vec<Word>> {
    let mut out = vec![];
    for w in enumerate_words(chain.states(), n)? {
        if chain.is_feasible(&w)? {
            out.push(w);
        }
    }
    Ok(out)
}

/// Total-variation distance between two aligned probability vectors.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}
