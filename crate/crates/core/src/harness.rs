//! Batch drivers behind the command-line tool: epsilon sweeps, synthetic
//! chains, exhaustive privacy checks and oracle comparisons.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accuracy::{bounds, spectrum_bounds};
use crate::error::{Error, Result};
use crate::markov::{feasible_spectrum, MarkovChain};
use crate::mechanisms::{derive_seed, pmf_family, rng_from_seed, MechanismKind, Privatizer, Source};
use crate::oracle::{enumerate_words, exact_pf_pmf, simulate_pf, total_variation, verify_dp, DpReport, SUBSET_LIMIT};
use crate::pf::Selection;
use crate::word::{Alphabet, PrivacyParams, Word};

/// Exact CSV header of sweep output.
pub const CSV_HEADER: &str = "mechanism,epsilon,b,n,m,trial,ell,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<OutputFormat> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Invalid(format!("unknown format '{other}', expected csv or json"))),
        }
    }
}

/// Accepts `pf`, `em` and the long names.
pub fn parse_selection(s: &str) -> Result<Selection> {
    match s.trim().to_ascii_lowercase().as_str() {
        "pf" | "permute-and-flip" => Ok(Selection::PermuteAndFlip),
        "em" | "exponential" => Ok(Selection::Exponential),
        other => Err(Error::Invalid(format!("unknown mechanism '{other}', expected pf or em"))),
    }
}

/// The sensitive input of a sweep.
#[derive(Clone)]
pub enum Target {
    Word(Word),
    Trajectory { chain: Arc<MarkovChain>, word: Word },
}

impl Target {
    /// A uniformly random word of length `n`.
    pub fn random_word(alphabet: &Arc<Alphabet>, n: usize, seed: u64) -> Result<Target> {
        use rand::Rng;
        let mut rng = rng_from_seed(seed);
        let symbols = (0..n).map(|_| rng.random_range(0..alphabet.size())).collect();
        Ok(Target::Word(Word::new(Arc::clone(alphabet), symbols)?))
    }

    /// A trajectory of length `n` simulated from the chain.
    pub fn random_trajectory(chain: &Arc<MarkovChain>, n: usize, seed: u64) -> Result<Target> {
        let word = chain.trajectory(n, &mut rng_from_seed(seed))?;
        Ok(Target::Trajectory {
            chain: Arc::clone(chain),
            word,
        })
    }

    pub fn word(&self) -> &Word {
        match self {
            Target::Word(w) | Target::Trajectory { word: w, .. } => w,
        }
    }

    fn privatizer(&self, params: &PrivacyParams, selection: Selection) -> Result<Privatizer> {
        match self {
            Target::Word(w) => Privatizer::for_word(w, params, selection),
            Target::Trajectory { chain, word } => Privatizer::for_trajectory(chain, word, params, selection),
        }
    }
}

#[derive(Clone)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    pub adjacency: u32,
    pub trials: usize,
    pub selections: Vec<Selection>,
    pub target: Target,
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilons.is_empty() {
            return Err(Error::Invalid("epsilon grid is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::Invalid("trials must be at least 1".into()));
        }
        if self.selections.is_empty() {
            return Err(Error::Invalid("no mechanism selected".into()));
        }
        for &e in &self.epsilons {
            PrivacyParams::new(e, self.adjacency)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub mechanism: MechanismKind,
    pub epsilon: f64,
    pub b: u32,
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub ell: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanEntry {
    pub mechanism: MechanismKind,
    pub epsilon: f64,
    pub trials: usize,
    pub mean_ell: f64,
    /// Exact `E[ℓ]` of the class distribution the trials were drawn from.
    pub expected_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub epsilon: f64,
    pub upper: f64,
    pub lower: f64,
    pub substituted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub epsilon: f64,
    pub pf_mean: f64,
    pub em_mean: f64,
    /// `100·(em - pf)/em`; zero when both means vanish.
    pub reduction_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub word: String,
    pub means: Vec<MeanEntry>,
    pub bounds: Vec<BoundEntry>,
    pub reductions: Vec<Reduction>,
}

impl SweepSummary {
    pub fn mean(&self, mechanism: MechanismKind, epsilon: f64) -> Option<f64> {
        self.means
            .iter()
            .find(|e| e.mechanism == mechanism && e.epsilon == epsilon)
            .map(|e| e.mean_ell)
    }

    pub fn reduction(&self, epsilon: f64) -> Option<&Reduction> {
        self.reductions.iter().find(|r| r.epsilon == epsilon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub summary: SweepSummary,
}

/// Runs every `(mechanism, ε, trial)` cell. Trials run in parallel; rows
/// come back ordered by mechanism, then grid index, then trial.
pub fn sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    let word = config.target.word();
    let (n, m) = (word.len(), word.alphabet().size());
    let mut rows = vec![];
    let mut means = vec![];
    for &selection in &config.selections {
        for (i, &eps) in config.epsilons.iter().enumerate() {
            let params = PrivacyParams::new(eps, config.adjacency)?;
            let p = config.target.privatizer(&params, selection)?;
            let kind = p.kind();
            let cell: Vec<SweepRow> = (0..config.trials)
                .into_par_iter()
                .map(|trial| {
                    let seed = derive_seed(config.seed, kind, i, trial);
                    let r = p.run(seed)?;
                    Ok(SweepRow {
                        mechanism: kind,
                        epsilon: eps,
                        b: config.adjacency,
                        n,
                        m,
                        trial,
                        ell: r.ell,
                        seed,
                    })
                })
                .collect::<Result<_>>()?;
            let total: usize = cell.iter().map(|r| r.ell).sum();
            means.push(MeanEntry {
                mechanism: kind,
                epsilon: eps,
                trials: config.trials,
                mean_ell: total as f64 / config.trials as f64,
                expected_error: p.distribution().expected_error(),
            });
            rows.extend(cell);
        }
    }

    let mut bound_entries = vec![];
    for &eps in &config.epsilons {
        let params = PrivacyParams::new(eps, config.adjacency)?;
        let r = match &config.target {
            Target::Word(_) => bounds(n, m, &params)?,
            Target::Trajectory { chain, word } => spectrum_bounds(&feasible_spectrum(chain, word)?, &params)?,
        };
        bound_entries.push(BoundEntry {
            epsilon: eps,
            upper: r.upper,
            lower: r.lower,
            substituted: r.substituted,
        });
    }

    let markov = matches!(config.target, Target::Trajectory { .. });
    let pf_kind = MechanismKind::new(Selection::PermuteAndFlip, markov);
    let em_kind = MechanismKind::new(Selection::Exponential, markov);
    let mean_of = |kind, eps| means.iter().find(|e: &&MeanEntry| e.mechanism == kind && e.epsilon == eps).map(|e| e.mean_ell);
    let reductions = config
        .epsilons
        .iter()
        .filter_map(|&eps| {
            let (pf, em) = (mean_of(pf_kind, eps)?, mean_of(em_kind, eps)?);
            let pct = if em > 0.0 { 100.0 * (em - pf) / em } else { 0.0 };
            Some(Reduction {
                epsilon: eps,
                pf_mean: pf,
                em_mean: em,
                reduction_pct: pct,
            })
        })
        .collect();

    Ok(SweepOutput {
        rows,
        summary: SweepSummary {
            word: word.to_string(),
            means,
            bounds: bound_entries,
            reductions,
        },
    })
}

/// Writes rows as CSV with the fixed header.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON followed by a newline.
pub fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Writes a sweep to `path` in the requested format.
pub fn write_sweep(output: &SweepOutput, path: &Path, format: OutputFormat) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    match format {
        OutputFormat::Csv => write_csv(&output.rows, file),
        OutputFormat::Json => write_text(file, &to_json_line(output)?),
    }
}

fn write_text<W: Write>(mut out: W, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

/// Writes `text` to `path`, or to standard output when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => write_text(BufWriter::new(File::create(p)?), text),
        None => write_text(io::stdout().lock(), text),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub states: usize,
    pub density: f64,
    pub seed: u64,
    pub max_steps: usize,
    pub reachable: Vec<String>,
}

/// Builds a synthetic chain and lists the states reachable from the initial
/// state within `max_steps`.
pub fn gen_chain(states: usize, density: f64, seed: u64, max_steps: usize) -> Result<(MarkovChain, ChainSummary)> {
    let chain = MarkovChain::synthetic(states, density, seed)?;
    let reachable = chain
        .reachable_states(max_steps)
        .into_iter()
        .map(|s| chain.states().symbol(s).to_string())
        .collect();
    let summary = ChainSummary {
        states,
        density,
        seed,
        max_steps,
        reachable,
    };
    Ok((chain, summary))
}

/// Exhaustive privacy check over every sensitive word of length `n`.
pub fn verify_instance(source: Source<'_>, n: usize, params: &PrivacyParams, selection: Selection) -> Result<DpReport> {
    let family = pmf_family(source, n, params, selection)?;
    verify_dp(&family, params.adjacency(), params.epsilon())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub word: String,
    pub epsilon: f64,
    pub adjacency: u32,
    pub candidates: usize,
    /// Largest gap between the class-based pmf and the subset-sum pmf.
    pub max_abs_diff: f64,
    pub trials: usize,
    /// Total variation between the shuffle-then-accept sampler and the
    /// class-based pmf.
    pub simulated_tv: f64,
    pub probs: Vec<(String, f64)>,
}

/// Compares the mechanism's exact pmf against both brute-force oracles.
pub fn oracle_compare(w: &Word, params: &PrivacyParams, trials: usize, seed: u64) -> Result<OracleComparison> {
    let candidates = enumerate_words(w.alphabet(), w.len())?;
    if candidates.len() > SUBSET_LIMIT {
        return Err(Error::Capacity {
            what: "subset-sum oracle",
            size: candidates.len(),
            limit: SUBSET_LIMIT,
        });
    }
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    let ours = Privatizer::for_word(w, params, Selection::PermuteAndFlip)?.exact_pmf()?;
    let literal = exact_pf_pmf(w, &candidates, params)?;
    let max_abs_diff = ours
        .probs
        .iter()
        .zip(&literal.probs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let sim = simulate_pf(w, &candidates, params, trials, &mut rng_from_seed(seed))?;
    Ok(OracleComparison {
        word: w.to_string(),
        epsilon: params.epsilon(),
        adjacency: params.adjacency(),
        candidates: candidates.len(),
        max_abs_diff,
        trials,
        simulated_tv: total_variation(&sim, &ours.probs),
        probs: ours.support.iter().map(|v| v.to_string()).zip(ours.probs).collect(),
    })
}
