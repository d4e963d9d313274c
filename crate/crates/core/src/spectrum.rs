//! Distance-class combinatorics.
//!
//! The vector of Hamming distances from a sensitive word to every candidate
//! output has exponential length, but everything downstream depends only on
//! how many candidates sit at each distance. A [`DistanceSpectrum`] stores
//! exactly those multiplicities as arbitrary-precision integers.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc == C(n, i) here, so the division is exact
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Number of length-`n` words over `m` symbols at distance exactly `ell`
/// from a fixed word: `C(n, ell) (m - 1)^ell`.
pub fn class_count(n: usize, m: usize, ell: usize) -> Result<BigUint> {
    if ell > n {
        return Err(Error::Domain(format!("distance {ell} exceeds word length {n}")));
    }
    if m < 2 {
        return Err(Error::Domain(format!("alphabet size must be >= 2, got {m}")));
    }
    Ok(binomial(n as u64, ell as u64) * BigUint::from(m - 1).pow(ell as u32))
}

/// Natural log of a positive big integer, accurate to double precision.
pub fn log_count(x: &BigUint) -> Result<f64> {
    if x.is_zero() {
        return Err(Error::Domain("log of zero count".into()));
    }
    let bits = x.bits();
    if bits <= 1000 {
        return Ok(x.to_f64().expect("fits in f64").ln());
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().expect("top 64 bits");
    Ok((top as f64).ln() + shift as f64 * std::f64::consts::LN_2)
}

/// Candidate multiplicities per Hamming distance `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceSpectrum {
    counts: Vec<BigUint>,
}

impl DistanceSpectrum {
    /// Unconstrained spectrum: every word of `Σⁿ` is a candidate.
    pub fn full(n: usize, m: usize) -> Result<DistanceSpectrum> {
        if n == 0 {
            return Err(Error::Domain("word length must be >= 1".into()));
        }
        let counts = (0..=n)
            .map(|ell| class_count(n, m, ell))
            .collect::<Result<Vec<_>>>()?;
        Ok(DistanceSpectrum { counts })
    }

    /// Builds a spectrum from explicit counts indexed by distance.
    ///
    /// Class 0 holds the sensitive word itself and must be nonempty.
    pub fn from_counts(counts: Vec<BigUint>) -> Result<DistanceSpectrum> {
        if counts.len() < 2 {
            return Err(Error::Domain("spectrum needs classes 0..=n with n >= 1".into()));
        }
        if counts[0].is_zero() {
            return Err(Error::Domain("class 0 must contain the sensitive word".into()));
        }
        Ok(DistanceSpectrum { counts })
    }

    /// Word length `n`.
    pub fn word_len(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn count(&self, ell: usize) -> &BigUint {
        &self.counts[ell]
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    /// `(ℓ, count)` for every nonempty class.
    pub fn classes(&self) -> impl Iterator<Item = (usize, &BigUint)> + '_ {
        self.counts.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn total(&self) -> BigUint {
        self.counts.iter().sum()
    }

    /// Largest distance with a nonempty class.
    pub fn max_distance(&self) -> usize {
        self.classes().map(|(ell, _)| ell).last().unwrap_or(0)
    }
}
