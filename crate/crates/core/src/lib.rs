//! Word-level differential privacy for symbolic trajectories.
//!
//! The permute-and-flip mechanism is applied to whole words: a Hamming
//! distance is drawn from an exact class distribution, then an output word is
//! drawn uniformly from that distance class with a counting automaton. A
//! Markov-chain variant restricts outputs to feasible trajectories.

pub mod accuracy;
pub mod dag;
pub mod error;
pub mod harness;
pub mod markov;
pub mod mechanisms;
pub mod nfa;
pub mod oracle;
pub mod pf;
pub mod quadrature;
pub mod spectrum;
pub mod word;

pub use accuracy::{bounds, hoeffding_tail, lower_bound, spectrum_bounds, upper_bound, BoundReport};
pub use error::{Error, Result};
pub use markov::{feasible_spectrum, MarkovChain, ProductNfa};
pub use mechanisms::{em_mechanism, mechanism1, mechanism2, MechanismKind, MechanismReport, Privatizer};
pub use nfa::HammingNfa;
pub use pf::{class_distribution, em_class_distribution, pf_class_distribution, ClassDistribution, Selection};
pub use spectrum::DistanceSpectrum;
pub use word::{hamming_distance, Alphabet, PrivacyParams, Word};
