//! Distance-class distributions for permute-and-flip and the exponential
//! mechanism.
//!
//! Under permute-and-flip every candidate at distance `ℓ` is selected with
//! probability `exp(-εℓ/2b) · Φ(ℓ)`, where `Φ(ℓ)` is the alternating
//! subset sum over all *other* candidates. Grouping candidates by distance
//! gives the class pmf `exp(-εℓ/2b) · cnt(ℓ) · Φ(ℓ)`.
//!
//! The subset sum is the term-wise integral of an elementary-symmetric
//! generating product:
//!
//! ```text
//! Φ(ℓ) = Σ_k (-1)^k e_k(p) / (k+1) = ∫₀¹ Π_j (1 - t·p_j) dt
//!      = ∫₀¹ exp( Σ_d c_d · ln(1 - t·q_d) ) dt,   q_d = exp(-εd/2b)
//! ```
//!
//! with `c_d` the class counts after removing one candidate from class `ℓ`.
//! The integrand is evaluated in the log domain, so counts like `42^14` are
//! harmless.

use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::spectrum::{log_count, DistanceSpectrum};
use crate::word::PrivacyParams;

/// Relative error target for each Φ integral.
pub const PHI_REL_TOL: f64 = 1e-12;
const MAX_PANELS: usize = 20_000;

/// Which selection rule turns utilities into a class distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Selection {
    PermuteAndFlip,
    Exponential,
}

/// Evaluates `ln Φ(ℓ)` for every class of one spectrum.
#[derive(Debug, Clone)]
pub struct PhiEvaluator {
    // (distance, count as f64, q_d) for nonempty classes
    classes: Vec<(usize, f64, f64)>,
}

impl PhiEvaluator {
    pub fn new(spectrum: &DistanceSpectrum, params: &PrivacyParams) -> PhiEvaluator {
        let rate = params.rate();
        let classes = spectrum
            .classes()
            .map(|(d, c)| {
                let count = c.to_f64().unwrap_or(f64::INFINITY);
                (d, count, (-rate * d as f64).exp())
            })
            .collect();
        PhiEvaluator { classes }
    }

    /// `ln Φ(ℓ)`. Fails with a domain error when class `ℓ` is empty.
    pub fn log_phi(&self, ell: usize) -> Result<f64> {
        if !self.classes.iter().any(|&(d, _, _)| d == ell) {
            return Err(Error::Domain(format!("distance class {ell} is empty")));
        }
        let terms: Vec<(f64, f64)> = self
            .classes
            .iter()
            .map(|&(d, c, q)| (if d == ell { c - 1.0 } else { c }, q))
            .filter(|&(c, _)| c > 0.0)
            .collect();
        if terms.is_empty() {
            // a single candidate: only the empty subset contributes
            return Ok(0.0);
        }
        let slope: f64 = terms.iter().map(|&(c, q)| c * q).sum();
        let integrand = |t: f64| -> f64 {
            let log: f64 = terms.iter().map(|&(c, q)| c * (-t * q).ln_1p()).sum();
            log.exp()
        };
        let est = quadrature::integrate(integrand, &breakpoints(slope), PHI_REL_TOL, MAX_PANELS)?;
        if est.value.is_nan() || est.value <= 0.0 {
            return Err(Error::Numeric {
                estimate: est.value,
                error_bound: est.error,
            });
        }
        Ok(est.value.ln())
    }
}

/// Panels `[0, 1/s], [1/s, 2/s], [2/s, 4/s], ...` so that the decay of
/// `exp(-s·t)` near zero is resolved at every scale.
fn breakpoints(slope: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    if slope > 2.0 {
        let mut t = 1.0 / slope;
        while t < 1.0 {
            breaks.push(t);
            t *= 2.0;
        }
    }
    breaks.push(1.0);
    breaks
}

/// `ln Φ(ℓ)` for a single class.
pub fn log_phi(spectrum: &DistanceSpectrum, params: &PrivacyParams, ell: usize) -> Result<f64> {
    if ell > spectrum.word_len() {
        return Err(Error::Domain(format!("distance {ell} exceeds word length")));
    }
    PhiEvaluator::new(spectrum, params).log_phi(ell)
}

/// A normalized pmf over Hamming distances `0..=n`.
#[derive(Debug, Clone)]
pub struct ClassDistribution {
    selection: Selection,
    spectrum: DistanceSpectrum,
    params: PrivacyParams,
    log_phi: Vec<Option<f64>>,
    log_weights: Vec<f64>,
    log_mass: f64,
    probs: Vec<f64>,
}

/// Permute-and-flip class distribution over `spectrum`.
pub fn pf_class_distribution(
    spectrum: &DistanceSpectrum,
    params: &PrivacyParams,
) -> Result<ClassDistribution> {
    let phi = PhiEvaluator::new(spectrum, params);
    let log_phi = spectrum
        .counts()
        .iter()
        .enumerate()
        .map(|(ell, c)| if c.is_zero() { Ok(None) } else { phi.log_phi(ell).map(Some) })
        .collect::<Result<Vec<_>>>()?;
    ClassDistribution::assemble(Selection::PermuteAndFlip, spectrum, params, log_phi)
}

/// Exponential-mechanism class distribution: `P(ℓ) ∝ exp(-εℓ/2b)·cnt(ℓ)`.
pub fn em_class_distribution(
    spectrum: &DistanceSpectrum,
    params: &PrivacyParams,
) -> Result<ClassDistribution> {
    let log_phi = vec![None; spectrum.counts().len()];
    ClassDistribution::assemble(Selection::Exponential, spectrum, params, log_phi)
}

/// Dispatches on `selection`.
pub fn class_distribution(
    selection: Selection,
    spectrum: &DistanceSpectrum,
    params: &PrivacyParams,
) -> Result<ClassDistribution> {
    match selection {
        Selection::PermuteAndFlip => pf_class_distribution(spectrum, params),
        Selection::Exponential => em_class_distribution(spectrum, params),
    }
}

impl ClassDistribution {
    fn assemble(
        selection: Selection,
        spectrum: &DistanceSpectrum,
        params: &PrivacyParams,
        log_phi: Vec<Option<f64>>,
    ) -> Result<ClassDistribution> {
        let rate = params.rate();
        let log_weights = spectrum
            .counts()
            .iter()
            .zip(&log_phi)
            .enumerate()
            .map(|(ell, (c, lp))| {
                if c.is_zero() {
                    return Ok(f64::NEG_INFINITY);
                }
                Ok(-rate * ell as f64 + log_count(c)? + lp.unwrap_or(0.0))
            })
            .collect::<Result<Vec<f64>>>()?;
        let log_mass = log_sum_exp(&log_weights);
        if !log_mass.is_finite() {
            return Err(Error::Numeric {
                estimate: log_mass,
                error_bound: f64::NAN,
            });
        }
        let probs = log_weights.iter().map(|&w| (w - log_mass).exp()).collect();
        Ok(ClassDistribution {
            selection,
            spectrum: spectrum.clone(),
            params: *params,
            log_phi,
            log_weights,
            log_mass,
            probs,
        })
    }

    pub fn selection(&self) -> Selection {
        self.selection
    }

    pub fn spectrum(&self) -> &DistanceSpectrum {
        &self.spectrum
    }

    pub fn params(&self) -> &PrivacyParams {
        &self.params
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, ell: usize) -> f64 {
        self.probs[ell]
    }

    /// Unnormalized log-weights; `-inf` for empty classes.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// `ln Φ(ℓ)` per class, present only for permute-and-flip.
    pub fn log_phi(&self) -> &[Option<f64>] {
        &self.log_phi
    }

    /// Sum of the weights before normalization.
    ///
    /// Close to 1 for permute-and-flip (its weights already form a pmf up to
    /// quadrature error); the partition function `Z` for the exponential
    /// mechanism.
    pub fn raw_mass(&self) -> f64 {
        self.log_mass.exp()
    }

    /// Probability of one particular output word at distance `ℓ`.
    pub fn word_prob(&self, ell: usize) -> f64 {
        let count = self.spectrum.count(ell);
        if count.is_zero() {
            return 0.0;
        }
        (self.log_weights[ell] - self.log_mass - log_count(count).expect("nonzero")).exp()
    }

    /// `E[ℓ] = Σ ℓ·P(ℓ)`.
    pub fn expected_error(&self) -> f64 {
        self.probs.iter().enumerate().map(|(l, p)| l as f64 * p).sum()
    }

    /// Draws a distance by inverse-CDF lookup.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut last = 0;
        for (ell, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            acc += p;
            last = ell;
            if u < acc {
                return ell;
            }
        }
        last
    }

    pub fn summary(&self) -> DistributionSummary {
        DistributionSummary {
            selection: self.selection,
            epsilon: self.params.epsilon(),
            adjacency: self.params.adjacency(),
            n: self.spectrum.word_len(),
            classes: self
                .spectrum
                .counts()
                .iter()
                .enumerate()
                .map(|(ell, c)| ClassEntry {
                    ell,
                    count: c.to_string(),
                    log_weight: self.log_weights[ell].is_finite().then_some(self.log_weights[ell]),
                    log_phi: self.log_phi[ell],
                    prob: self.probs[ell],
                })
                .collect(),
            raw_mass: self.raw_mass(),
            expected_error: self.expected_error(),
        }
    }
}

/// Sampling a distance class with an explicit distribution argument.
pub fn sample_class<R: Rng + ?Sized>(dist: &ClassDistribution, rng: &mut R) -> usize {
    dist.sample(rng)
}

pub fn expected_error(dist: &ClassDistribution) -> f64 {
    dist.expected_error()
}

/// Serializable view of a [`ClassDistribution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub selection: Selection,
    pub epsilon: f64,
    pub adjacency: u32,
    pub n: usize,
    pub classes: Vec<ClassEntry>,
    pub raw_mass: f64,
    pub expected_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub ell: usize,
    /// Exact class size as a decimal string.
    pub count: String,
    pub log_weight: Option<f64>,
    pub log_phi: Option<f64>,
    pub prob: f64,
}

pub(crate) fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}
