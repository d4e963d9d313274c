//! Layered acyclic automata with exact path counting and uniform path
//! sampling. Layer `i` holds the states reached after emitting `i` symbols;
//! every edge goes from layer `i` to layer `i + 1` and carries one symbol.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::oracle::WORD_LIMIT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub symbol: usize,
    /// Index of the target state in the next layer.
    pub target: usize,
}

#[derive(Debug, Clone)]
pub struct Layered<S> {
    pub layers: Vec<Vec<S>>,
    pub edges: Vec<Vec<Vec<Edge>>>,
    completion: Option<Vec<Vec<BigUint>>>,
}

impl<S: Copy + PartialEq> Layered<S> {
    pub fn new(layers: Vec<Vec<S>>, edges: Vec<Vec<Vec<Edge>>>) -> Layered<S> {
        debug_assert_eq!(edges.len(), layers.len());
        Layered {
            layers,
            edges,
            completion: None,
        }
    }

    /// Removes states with no path to the last layer, then states no longer
    /// reachable from the first. Edge targets are reindexed.
    pub fn prune(self) -> Layered<S> {
        let depth = self.layers.len();
        let mut live: Vec<Vec<bool>> = self.layers.iter().map(|l| vec![false; l.len()]).collect();
        live[depth - 1].iter_mut().for_each(|x| *x = true);
        for i in (0..depth - 1).rev() {
            for k in 0..self.layers[i].len() {
                live[i][k] = self.edges[i][k].iter().any(|e| live[i + 1][e.target]);
            }
        }
        let mut reach: Vec<Vec<bool>> = self.layers.iter().map(|l| vec![false; l.len()]).collect();
        reach[0].iter_mut().zip(&live[0]).for_each(|(r, &l)| *r = l);
        for i in 0..depth - 1 {
            for k in 0..self.layers[i].len() {
                if reach[i][k] {
                    for e in &self.edges[i][k] {
                        if live[i + 1][e.target] {
                            reach[i + 1][e.target] = true;
                        }
                    }
                }
            }
        }
        let remap: Vec<Vec<Option<usize>>> = reach
            .iter()
            .map(|layer| {
                let mut next = 0;
                layer
                    .iter()
                    .map(|&keep| {
                        keep.then(|| {
                            next += 1;
                            next - 1
                        })
                    })
                    .collect()
            })
            .collect();
        let mut layers = Vec::with_capacity(depth);
        let mut edges = Vec::with_capacity(depth);
        for i in 0..depth {
            let mut states = vec![];
            let mut out = vec![];
            for k in 0..self.layers[i].len() {
                if remap[i][k].is_none() {
                    continue;
                }
                states.push(self.layers[i][k]);
                out.push(
                    self.edges[i][k]
                        .iter()
                        .filter_map(|e| {
                            remap[i + 1][e.target].map(|t| Edge {
                                symbol: e.symbol,
                                target: t,
                            })
                        })
                        .collect(),
                );
            }
            layers.push(states);
            edges.push(out);
        }
        Layered::new(layers, edges)
    }

    /// Backward pass: the last layer accepts with count 1 and every other
    /// state counts the paths through each of its outgoing edges.
    pub fn synthesize(&mut self) {
        let depth = self.layers.len();
        let mut counts: Vec<Vec<BigUint>> = vec![vec![]; depth];
        counts[depth - 1] = vec![BigUint::one(); self.layers[depth - 1].len()];
        for i in (0..depth - 1).rev() {
            counts[i] = self.edges[i]
                .iter()
                .map(|out| out.iter().map(|e| &counts[i + 1][e.target]).sum())
                .collect();
        }
        self.completion = Some(counts);
    }

    pub fn is_synthesized(&self) -> bool {
        self.completion.is_some()
    }

    pub fn locate(&self, state: S) -> Option<(usize, usize)> {
        self.layers
            .iter()
            .enumerate()
            .find_map(|(i, layer)| layer.iter().position(|&s| s == state).map(|k| (i, k)))
    }

    pub fn count_at(&self, layer: usize, index: usize) -> Option<&BigUint> {
        self.completion.as_ref().map(|c| &c[layer][index])
    }

    /// Number of accepted words, i.e. the count at the start state.
    pub fn language_size(&self) -> Option<BigUint> {
        let c = self.completion.as_ref()?;
        Some(c[0].first().cloned().unwrap_or_else(BigUint::zero))
    }

    /// `V(target) / V(source)` for one edge.
    pub fn edge_ratio(&self, layer: usize, index: usize, edge: &Edge) -> Option<BigRational> {
        let c = self.completion.as_ref()?;
        let num = c[layer + 1][edge.target].clone();
        let den = c[layer][index].clone();
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num.into(), den.into()))
    }

    /// One run from the start state; each step draws an exact integer in
    /// `[0, V(q))` and follows the edge whose cumulative count covers it.
    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<usize>> {
        let counts = self
            .completion
            .as_ref()
            .ok_or_else(|| Error::Domain("policy has not been synthesized".into()))?;
        if counts[0].first().is_none_or(Zero::is_zero) {
            return Err(Error::Domain("automaton accepts no words".into()));
        }
        let mut symbols = Vec::with_capacity(self.layers.len() - 1);
        let mut k = 0;
        for i in 0..self.layers.len() - 1 {
            let mut r = uniform_below(&counts[i][k], rng);
            let mut chosen = None;
            for e in &self.edges[i][k] {
                let c = &counts[i + 1][e.target];
                if r < *c {
                    chosen = Some(*e);
                    break;
                }
                r -= c;
            }
            let e = chosen.expect("edge counts sum to the state count");
            symbols.push(e.symbol);
            k = e.target;
        }
        Ok(symbols)
    }

    /// Every accepted symbol sequence, depth first in edge order.
    pub fn paths(&self) -> Result<Vec<Vec<usize>>> {
        let depth = self.layers.len();
        if self.layers[0].is_empty() {
            return Ok(vec![]);
        }
        let mut out = vec![];
        let mut stack = vec![(0usize, 0usize, Vec::new())];
        while let Some((i, k, prefix)) = stack.pop() {
            if i == depth - 1 {
                out.push(prefix);
                if out.len() > WORD_LIMIT {
                    return Err(Error::Capacity {
                        what: "automaton language",
                        size: out.len(),
                        limit: WORD_LIMIT,
                    });
                }
                continue;
            }
            for e in self.edges[i][k].iter().rev() {
                let mut next = prefix.clone();
                next.push(e.symbol);
                stack.push((i + 1, e.target, next));
            }
        }
        Ok(out)
    }

    /// Line-oriented dump: one `state` line per state, one `edge` line per
    /// transition, with counts and branch ratios once synthesized.
    pub fn export(&self, header: &str, label: impl Fn(&S) -> String, symbol: impl Fn(usize) -> String) -> String {
        let mut out = String::new();
        writeln!(out, "{header}").unwrap();
        for (i, layer) in self.layers.iter().enumerate() {
            for (k, s) in layer.iter().enumerate() {
                match self.count_at(i, k) {
                    Some(v) => writeln!(out, "state {} V={v}", label(s)).unwrap(),
                    None => writeln!(out, "state {}", label(s)).unwrap(),
                }
            }
        }
        for (i, layer) in self.layers.iter().enumerate().take(self.layers.len() - 1) {
            for (k, s) in layer.iter().enumerate() {
                for e in &self.edges[i][k] {
                    let target = label(&self.layers[i + 1][e.target]);
                    match self.edge_ratio(i, k, e) {
                        Some(mu) => writeln!(out, "edge {} -{}-> {} mu={mu}", label(s), symbol(e.symbol), target).unwrap(),
                        None => writeln!(out, "edge {} -{}-> {}", label(s), symbol(e.symbol), target).unwrap(),
                    }
                }
            }
        }
        out
    }
}

/// Uniform integer in `[0, bound)` by rejection on the bit length of `bound`.
pub fn uniform_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top_mask = if bits.is_multiple_of(32) { u32::MAX } else { (1u32 << (bits % 32)) - 1 };
    loop {
        let mut digits: Vec<u32> = (0..words).map(|_| rng.random()).collect();
        *digits.last_mut().expect("nonzero bound") &= top_mask;
        let candidate = BigUint::new(digits);
        if candidate < *bound {
            return candidate;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_below_small_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for bound in [1u32, 2, 3, 7, 12, 1 << 20] {
            let b = BigUint::from(bound);
            for _ in 0..200 {
                assert!(uniform_below(&b, &mut rng) < b);
            }
        }
        let mut hist = [0usize; 3];
        for _ in 0..30_000 {
            let x: u32 = uniform_below(&BigUint::from(3u32), &mut rng).try_into().unwrap();
            hist[x as usize] += 1;
        }
        assert!(hist.iter().all(|&h| (9_400..10_600).contains(&h)), "{hist:?}");
    }

    #[test]
    fn uniform_below_large_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let bound = BigUint::from(42u32).pow(14) + 1u32;
        let mut saw_high = false;
        for _ in 0..100 {
            let x = uniform_below(&bound, &mut rng);
            assert!(x < bound);
            saw_high |= x > &bound >> 1;
        }
        assert!(saw_high);
    }
}
