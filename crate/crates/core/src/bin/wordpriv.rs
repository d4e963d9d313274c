use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use wordpriv::harness::{self, OutputFormat, SweepConfig, Target};
use wordpriv::mechanisms::Source;
use wordpriv::{
    bounds, class_distribution, feasible_spectrum, Alphabet, DistanceSpectrum, Error, MarkovChain, PrivacyParams,
    Privatizer, Result, Word,
};

#[derive(Parser)]
#[command(name = "wordpriv", version, about = "Word-level differential privacy for symbolic trajectories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Privacy {
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 1)]
    adjacency: u32,
}

impl Privacy {
    fn params(&self) -> Result<PrivacyParams> {
        PrivacyParams::new(self.epsilon, self.adjacency)
    }
}

/// Where sensitive words live: an explicit alphabet, or a chain file.
#[derive(Args)]
struct Domain {
    /// Comma-separated symbols.
    #[arg(long, conflicts_with = "chain")]
    alphabet: Option<String>,
    /// Chain JSON file; outputs are restricted to feasible trajectories.
    #[arg(long)]
    chain: Option<PathBuf>,
}

enum Resolved {
    Words(Arc<Alphabet>),
    Chain(Arc<MarkovChain>),
}

impl Domain {
    fn resolve(&self) -> Result<Resolved> {
        match (&self.alphabet, &self.chain) {
            (_, Some(path)) => Ok(Resolved::Chain(Arc::new(MarkovChain::load(path)?))),
            (Some(a), None) => Ok(Resolved::Words(Alphabet::parse(a)?)),
            (None, None) => Err(Error::Invalid("one of --alphabet or --chain is required".into())),
        }
    }
}

impl Resolved {
    fn source(&self) -> Source<'_> {
        match self {
            Resolved::Words(a) => Source::Words(a),
            Resolved::Chain(c) => Source::Chain(c),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Privatize one word over an alphabet.
    PrivatizeWord {
        #[arg(long)]
        word: String,
        #[arg(long)]
        alphabet: String,
        #[command(flatten)]
        privacy: Privacy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// pf or em.
        #[arg(long, default_value = "pf")]
        mechanism: String,
        /// Include wall time in the report.
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Privatize one feasible trajectory of a chain.
    PrivatizeTrajectory {
        #[arg(long)]
        chain: PathBuf,
        #[arg(long)]
        word: String,
        #[command(flatten)]
        privacy: Privacy,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "pf")]
        mechanism: String,
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Class distribution of the mechanism for one input.
    Pmf {
        #[command(flatten)]
        domain: Domain,
        #[arg(long)]
        word: Option<String>,
        /// Word length, for the unconstrained spectrum without a word.
        #[arg(long, requires = "alphabet_size")]
        length: Option<usize>,
        #[arg(long)]
        alphabet_size: Option<usize>,
        #[command(flatten)]
        privacy: Privacy,
        #[arg(long, default_value = "pf")]
        mechanism: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expected-error bounds and Hoeffding tails.
    Bounds {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        alphabet_size: usize,
        #[command(flatten)]
        privacy: Privacy,
        /// Tail thresholds.
        #[arg(long = "t", value_delimiter = ',')]
        t: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated releases over an epsilon grid.
    Sweep {
        #[command(flatten)]
        domain: Domain,
        /// Sensitive word; simulated from the chain or drawn uniformly when absent.
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        adjacency: u32,
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "pf,em")]
        mechanism: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Write a random sparse chain.
    GenChain {
        #[arg(long)]
        states: usize,
        #[arg(long, default_value_t = 0.3)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Horizon for the reachability report.
        #[arg(long, default_value_t = 20)]
        max_steps: usize,
    },
    /// Exhaustive privacy check over all inputs of one length.
    VerifyDp {
        #[command(flatten)]
        domain: Domain,
        #[arg(long)]
        length: usize,
        #[command(flatten)]
        privacy: Privacy,
        #[arg(long, default_value = "pf")]
        mechanism: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the exact pmf with the brute-force oracles.
    OracleCompare {
        #[arg(long)]
        word: String,
        #[arg(long)]
        alphabet: String,
        #[command(flatten)]
        privacy: Privacy,
        #[arg(long, default_value_t = 1_000_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn release(p: &Privatizer, seed: u64, timing: bool) -> Result<String> {
    let report = if timing { p.run_timed(seed)? } else { p.run(seed)? };
    harness::to_json_line(&report)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::PrivatizeWord {
            word,
            alphabet,
            privacy,
            seed,
            mechanism,
            timing,
            out,
        } => {
            let alphabet = Alphabet::parse(&alphabet)?;
            let w = Word::parse(&alphabet, &word)?;
            let p = Privatizer::for_word(&w, &privacy.params()?, harness::parse_selection(&mechanism)?)?;
            harness::emit(&release(&p, seed, timing)?, out.as_deref())?;
        }
        Command::PrivatizeTrajectory {
            chain,
            word,
            privacy,
            seed,
            mechanism,
            timing,
            out,
        } => {
            let chain = Arc::new(MarkovChain::load(chain)?);
            let w = Word::parse(chain.states(), &word)?;
            let sel = harness::parse_selection(&mechanism)?;
            let p = Privatizer::for_trajectory(&chain, &w, &privacy.params()?, sel)?;
            harness::emit(&release(&p, seed, timing)?, out.as_deref())?;
        }
        Command::Pmf {
            domain,
            word,
            length,
            alphabet_size,
            privacy,
            mechanism,
            out,
        } => {
            let spectrum = match (word, length, alphabet_size) {
                (Some(word), _, _) => match domain.resolve()? {
                    Resolved::Words(a) => {
                        let w = Word::parse(&a, &word)?;
                        DistanceSpectrum::full(w.len(), a.size())?
                    }
                    Resolved::Chain(c) => {
                        let w = Word::parse(c.states(), &word)?;
                        c.require_feasible(&w)?;
                        feasible_spectrum(&c, &w)?
                    }
                },
                (None, Some(n), Some(m)) => DistanceSpectrum::full(n, m)?,
                _ => return Err(Error::Invalid("give --word, or --length with --alphabet-size".into())),
            };
            let dist = class_distribution(harness::parse_selection(&mechanism)?, &spectrum, &privacy.params()?)?;
            harness::emit(&harness::to_json_line(&dist.summary())?, out.as_deref())?;
        }
        Command::Bounds {
            length,
            alphabet_size,
            privacy,
            t,
            out,
        } => {
            let report = bounds(length, alphabet_size, &privacy.params()?)?.with_tails(&t)?;
            harness::emit(&harness::to_json_line(&report)?, out.as_deref())?;
        }
        Command::Sweep {
            domain,
            word,
            length,
            epsilon,
            adjacency,
            trials,
            mechanism,
            seed,
            out,
            format,
        } => {
            let format: OutputFormat = format.parse()?;
            let resolved = domain.resolve()?;
            let target = match (&resolved, word, length) {
                (Resolved::Words(a), Some(w), _) => Target::Word(Word::parse(a, &w)?),
                (Resolved::Chain(c), Some(w), _) => Target::Trajectory {
                    chain: Arc::clone(c),
                    word: Word::parse(c.states(), &w)?,
                },
                (Resolved::Words(a), None, Some(n)) => Target::random_word(a, n, seed)?,
                (Resolved::Chain(c), None, Some(n)) => Target::random_trajectory(c, n, seed)?,
                (_, None, None) => return Err(Error::Invalid("give --word or --length".into())),
            };
            let config = SweepConfig {
                epsilons: epsilon,
                adjacency,
                trials,
                selections: mechanism.iter().map(|s| harness::parse_selection(s)).collect::<Result<_>>()?,
                target,
                seed,
            };
            let output = harness::sweep(&config)?;
            harness::write_sweep(&output, &out, format)?;
            harness::emit(&harness::to_json_line(&output.summary)?, None)?;
        }
        Command::GenChain {
            states,
            density,
            seed,
            out,
            max_steps,
        } => {
            let (chain, summary) = harness::gen_chain(states, density, seed, max_steps)?;
            chain.save(&out)?;
            harness::emit(&harness::to_json_line(&summary)?, None)?;
        }
        Command::VerifyDp {
            domain,
            length,
            privacy,
            mechanism,
            out,
        } => {
            let resolved = domain.resolve()?;
            let sel = harness::parse_selection(&mechanism)?;
            let report = harness::verify_instance(resolved.source(), length, &privacy.params()?, sel)?;
            harness::emit(&harness::to_json_line(&report)?, out.as_deref())?;
            return Ok(report.holds);
        }
        Command::OracleCompare {
            word,
            alphabet,
            privacy,
            trials,
            seed,
            out,
        } => {
            let alphabet = Alphabet::parse(&alphabet)?;
            let w = Word::parse(&alphabet, &word)?;
            let report = harness::oracle_compare(&w, &privacy.params()?, trials, seed)?;
            harness::emit(&harness::to_json_line(&report)?, out.as_deref())?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        // The privacy check ran but found a violation.
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
