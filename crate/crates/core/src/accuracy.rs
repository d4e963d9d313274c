//! Expected-error bounds for the permute-and-flip word mechanism and the
//! Hoeffding tail on the released distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pf::{em_class_distribution, log_sum_exp, pf_class_distribution};
use crate::spectrum::DistanceSpectrum;
use crate::word::PrivacyParams;

/// `C = (m-1)·exp(-ε/2b)`.
pub fn odds(m: usize, params: &PrivacyParams) -> Result<f64> {
    if m < 2 {
        return Err(Error::Domain(format!("alphabet size {m} is below 2")));
    }
    Ok((m - 1) as f64 * (-params.rate()).exp())
}

/// `nC/(1+C)`, which is also the exponential mechanism's expected error.
pub fn upper_bound(n: usize, m: usize, params: &PrivacyParams) -> Result<f64> {
    let c = odds(m, params)?;
    Ok(n as f64 * c / (1.0 + c))
}

/// `2·exp(-2t²/n²)`.
pub fn hoeffding_tail(n: usize, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("tail threshold must be positive, got {t}")));
    }
    if n == 0 {
        return Err(Error::Domain("word length must be positive".into()));
    }
    let n = n as f64;
    Ok(2.0 * (-2.0 * t * t / (n * n)).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub t: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub epsilon: f64,
    pub adjacency: u32,
    /// Only defined for the unconstrained spectrum.
    pub c: Option<f64>,
    pub upper: f64,
    pub lower: f64,
    /// Exact permute-and-flip expected error, for comparison.
    pub expected_error: f64,
    pub e_em_phi: f64,
    pub phi0: f64,
    pub phin: f64,
    /// Class whose `Φ` stands in for `Φ(n)`.
    pub top_class: usize,
    /// True when class `n` is empty and `top_class < n`.
    pub substituted: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hoeffding: Vec<TailBound>,
}

impl BoundReport {
    /// Attaches Hoeffding tails at the given thresholds.
    pub fn with_tails(mut self, ts: &[f64]) -> Result<BoundReport> {
        self.hoeffding = ts
            .iter()
            .map(|&t| Ok(TailBound { t, bound: hoeffding_tail(self.n, t)? }))
            .collect::<Result<_>>()?;
        Ok(self)
    }
}

/// Bounds on the unconstrained spectrum of words of length `n` over `m`
/// symbols.
pub fn bounds(n: usize, m: usize, params: &PrivacyParams) -> Result<BoundReport> {
    let spectrum = DistanceSpectrum::full(n, m)?;
    let upper = upper_bound(n, m, params)?;
    assemble(&spectrum, params, upper, Some(odds(m, params)?))
}

/// Bounds on an arbitrary spectrum. The upper term is the exponential
/// mechanism's expected error on that spectrum, and the Grüss range runs up
/// to the largest nonempty class.
pub fn spectrum_bounds(spectrum: &DistanceSpectrum, params: &PrivacyParams) -> Result<BoundReport> {
    let upper = em_class_distribution(spectrum, params)?.expected_error();
    assemble(spectrum, params, upper, None)
}

/// Lower bound alone; see [`spectrum_bounds`].
pub fn lower_bound(spectrum: &DistanceSpectrum, params: &PrivacyParams) -> Result<f64> {
    Ok(spectrum_bounds(spectrum, params)?.lower)
}

fn assemble(spectrum: &DistanceSpectrum, params: &PrivacyParams, upper: f64, c: Option<f64>) -> Result<BoundReport> {
    let n = spectrum.word_len();
    let pf = pf_class_distribution(spectrum, params)?;
    let em = em_class_distribution(spectrum, params)?;
    let top = spectrum.max_distance();
    let log_phi = pf.log_phi();
    let lp = |ell: usize| log_phi[ell].expect("nonempty class has Φ");

    // ln E_em[Φ] over nonempty classes.
    let terms: Vec<f64> = em
        .probs()
        .iter()
        .zip(log_phi)
        .filter_map(|(&p, lp)| lp.filter(|_| p > 0.0).map(|lp| p.ln() + lp))
        .collect();
    let log_e = log_sum_exp(&terms);
    let spread = (lp(0) - log_e).exp() - (lp(top) - log_e).exp();
    let lower = upper - top as f64 * spread / 4.0;

    Ok(BoundReport {
        n,
        epsilon: params.epsilon(),
        adjacency: params.adjacency(),
        c,
        upper,
        lower,
        expected_error: pf.expected_error(),
        e_em_phi: log_e.exp(),
        phi0: lp(0).exp(),
        phin: lp(top).exp(),
        top_class: top,
        substituted: top < n,
        hoeffding: vec![],
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::markov::{feasible_spectrum, MarkovChain};
    use crate::word::{Alphabet, Word};

    fn params(eps: f64, b: u32) -> PrivacyParams {
        PrivacyParams::new(eps, b).unwrap()
    }

    #[test]
    fn reference_curve_point() {
        let r = bounds(5, 2, &params(0.1, 1)).unwrap();
        assert!((r.upper - 2.437_513_017_578_95).abs() < 1e-12);
        assert!((r.expected_error - 2.435_492_764_447_187_5).abs() < 1e-10);
        assert!((r.lower - 2.427_415_858_549_904_5).abs() < 1e-9, "{}", r.lower);
        assert!((2.35..=2.44).contains(&r.lower));
        assert!(r.lower <= r.expected_error && r.expected_error <= r.upper);
        assert!(!r.substituted);
    }

    #[test]
    fn upper_bound_limits() {
        assert!((upper_bound(7, 4, &params(0.0, 1)).unwrap() - 7.0 * 3.0 / 4.0).abs() < 1e-12);
        assert!(upper_bound(7, 4, &params(1e4, 1)).unwrap() < 1e-300);
        assert!(upper_bound(3, 1, &params(1.0, 1)).is_err());
    }

    #[test]
    fn zero_epsilon_collapses_the_sandwich() {
        let r = bounds(6, 3, &params(0.0, 1)).unwrap();
        assert!((r.lower - r.upper).abs() < 1e-12);
        assert!((r.expected_error - r.upper).abs() < 1e-12);
    }

    #[test]
    fn strong_utility_gives_negative_lower_bound() {
        let r = bounds(5, 2, &params(10.0, 1)).unwrap();
        assert!((r.lower - -0.598_314_711_033_842_85).abs() < 1e-9, "{}", r.lower);
        assert!(r.lower <= r.expected_error && r.expected_error <= r.upper);
        assert!((r.expected_error - 0.017_145_196_275_827_97).abs() < 1e-10);
    }

    #[test]
    fn upper_bound_is_em_expected_error() {
        for n in 1..=12 {
            for m in 2..=6 {
                let p = params(0.7, 2);
                let em = em_class_distribution(&DistanceSpectrum::full(n, m).unwrap(), &p).unwrap();
                assert!((em.expected_error() - upper_bound(n, m, &p).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sandwich_on_a_small_grid() {
        for eps in [0.1, 1.0, 5.0] {
            for n in [2, 5, 9] {
                for m in [2, 3, 7] {
                    for b in [1, 3] {
                        let r = bounds(n, m, &params(eps, b)).unwrap();
                        assert!(r.lower <= r.expected_error + 1e-12, "{r:?}");
                        assert!(r.expected_error <= r.upper + 1e-12, "{r:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn hoeffding_values() {
        assert!((hoeffding_tail(5, 5.0).unwrap() - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((hoeffding_tail(5, 1e-9).unwrap() - 2.0).abs() < 1e-12);
        assert!(hoeffding_tail(5, 0.0).is_err());
        let r = bounds(5, 2, &params(1.0, 1)).unwrap().with_tails(&[1.0, 2.0]).unwrap();
        assert_eq!(r.hoeffding.len(), 2);
    }

    #[test]
    fn restricted_spectrum_flags_substitution() {
        // Every trajectory passes through y3 at the second step, so no
        // output can differ from the input everywhere.
        let states = Alphabet::parse("y0,y1,y2,y3").unwrap();
        let t = vec![
            vec![0.0, 0.5, 0.5, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0, 1.0],
            vec![0.0, 0.5, 0.5, 0.0],
        ];
        let chain = MarkovChain::new(states, t, 0).unwrap();
        let w = Word::parse(chain.states(), "y1,y3,y1").unwrap();
        let spectrum = feasible_spectrum(&chain, &w).unwrap();
        let r = spectrum_bounds(&spectrum, &params(2.0, 1)).unwrap();
        assert!(r.c.is_none());
        assert_eq!(r.top_class, 2);
        assert!(r.substituted);
        assert!(r.lower <= r.expected_error && r.expected_error <= r.upper);
    }

    #[test]
    fn report_round_trips() {
        let r = bounds(4, 3, &params(1.5, 1)).unwrap().with_tails(&[1.0]).unwrap();
        let back: BoundReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
