//! Alphabets, words, Hamming distance and the utility function.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An ordered set of distinct symbol labels, indexed densely from zero.
#[derive(Debug, Clone)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
}

impl Alphabet {
    /// Builds an alphabet from at least two distinct, non-empty labels.
    pub fn new<I, S>(symbols: I) -> Result<Arc<Alphabet>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::Invalid("alphabet symbols must be non-empty".into()));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate alphabet symbol {s:?}")));
            }
        }
        if symbols.len() < 2 {
            return Err(Error::Invalid(format!(
                "alphabet needs at least 2 symbols, got {}",
                symbols.len()
            )));
        }
        Ok(Arc::new(Alphabet { symbols, index }))
    }

    /// Parses a comma-separated symbol list such as `"a,b,c"`.
    pub fn parse(text: &str) -> Result<Arc<Alphabet>> {
        Alphabet::new(text.split(',').map(str::trim))
    }

    /// Alphabet of `m` generated labels `s0, s1, ...`.
    pub fn numbered(m: usize) -> Result<Arc<Alphabet>> {
        Alphabet::new((0..m).map(|i| format!("s{i}")))
    }

    pub fn size(&self) -> usize {
        self.symbols.len()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, index: usize) -> &str {
        &self.symbols[index]
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.index.get(symbol).copied()
    }

    fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols
    }
}

impl Eq for Alphabet {}

/// A fixed-length sequence of symbols drawn from one alphabet.
#[derive(Debug, Clone)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    symbols: Vec<usize>,
}

impl Word {
    pub fn new(alphabet: Arc<Alphabet>, symbols: Vec<usize>) -> Result<Word> {
        if symbols.is_empty() {
            return Err(Error::Invalid("words must have length at least 1".into()));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s >= alphabet.size()) {
            return Err(Error::Invalid(format!(
                "symbol index {bad} out of range for alphabet of size {}",
                alphabet.size()
            )));
        }
        Ok(Word { alphabet, symbols })
    }

    /// Parses `"a,b,c"`, or `"abc"` when every symbol is a single character.
    pub fn parse(alphabet: &Arc<Alphabet>, text: &str) -> Result<Word> {
        let text = text.trim();
        let labels: Vec<String> = if text.contains(',') || !alphabet.single_char() {
            text.split(',').map(|s| s.trim().to_string()).collect()
        } else {
            text.chars().map(String::from).collect()
        };
        let symbols = labels
            .iter()
            .map(|label| {
                alphabet
                    .index_of(label)
                    .ok_or_else(|| Error::Invalid(format!("unknown symbol {label:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Word::new(Arc::clone(alphabet), symbols)
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    fn check_compatible(&self, other: &Word) -> Result<()> {
        if !Arc::ptr_eq(&self.alphabet, &other.alphabet) && self.alphabet != other.alphabet {
            return Err(Error::Dimension("words use different alphabets".into()));
        }
        if self.len() != other.len() {
            return Err(Error::Dimension(format!(
                "word lengths differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols && *self.alphabet == *other.alphabet
    }
}

impl Eq for Word {}

impl std::hash::Hash for Word {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.symbols.hash(state);
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(self.alphabet.symbol(s))?;
        }
        Ok(())
    }
}

/// Privacy parameter ε and adjacency parameter b.
///
/// The utility sensitivity is bounded by `b`, so every exponent in the
/// mechanisms has the form `ε·u / 2b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyParams {
    epsilon: f64,
    adjacency: u32,
}

impl PrivacyParams {
    pub fn new(epsilon: f64, adjacency: u32) -> Result<PrivacyParams> {
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::Domain(format!("epsilon must be finite and >= 0, got {epsilon}")));
        }
        if adjacency == 0 {
            return Err(Error::Domain("adjacency parameter b must be >= 1".into()));
        }
        Ok(PrivacyParams { epsilon, adjacency })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn adjacency(&self) -> u32 {
        self.adjacency
    }

    /// `ε / 2b`, the per-error decay rate in log space.
    pub fn rate(&self) -> f64 {
        self.epsilon / (2.0 * f64::from(self.adjacency))
    }
}

pub fn hamming_distance(w: &Word, v: &Word) -> Result<usize> {
    w.check_compatible(v)?;
    Ok(w.symbols
        .iter()
        .zip(&v.symbols)
        .filter(|(a, b)| a != b)
        .count())
}

/// Negative Hamming distance.
pub fn utility(w: &Word, v: &Word) -> Result<i64> {
    hamming_distance(w, v).map(|d| -(d as i64))
}

pub fn is_adjacent(w: &Word, v: &Word, b: u32) -> Result<bool> {
    Ok(hamming_distance(w, v)? <= b as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abc() -> Arc<Alphabet> {
        Alphabet::parse("a,b,c").unwrap()
    }

    fn w(text: &str) -> Word {
        Word::parse(&abc(), text).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hamming_distance(&w("abc"), &w("abc")).unwrap(), 0);
        assert_eq!(hamming_distance(&w("abc"), &w("abb")).unwrap(), 1);
        assert_eq!(hamming_distance(&w("abc"), &w("bca")).unwrap(), 3);
    }

    #[test]
    fn utility_examples() {
        assert_eq!(utility(&w("abc"), &w("abc")).unwrap(), 0);
        assert_eq!(utility(&w("abc"), &w("bca")).unwrap(), -3);
        assert_eq!(utility(&w("ab"), &w("cb")).unwrap(), -1);
    }

    #[test]
    fn adjacency_examples() {
        assert!(is_adjacent(&w("abc"), &w("abc"), 1).unwrap());
        assert!(!is_adjacent(&w("abc"), &w("bca"), 2).unwrap());
        assert!(is_adjacent(&w("abc"), &w("abb"), 1).unwrap());
    }

    #[test]
    fn mismatches_are_dimension_errors() {
        assert!(matches!(hamming_distance(&w("abc"), &w("ab")), Err(Error::Dimension(_))));
        let other = Alphabet::parse("x,y,z").unwrap();
        let v = Word::parse(&other, "xyz").unwrap();
        assert!(matches!(hamming_distance(&w("abc"), &v), Err(Error::Dimension(_))));
        // equal symbol lists count as the same alphabet
        let same = Word::parse(&Alphabet::parse("a,b,c").unwrap(), "abc").unwrap();
        assert_eq!(hamming_distance(&w("abc"), &same).unwrap(), 0);
    }

    #[test]
    fn parse_and_display() {
        let roads = Alphabet::parse("road-1,road-2,road-10").unwrap();
        let word = Word::parse(&roads, "road-10, road-1").unwrap();
        assert_eq!(word.symbols(), &[2, 0]);
        assert_eq!(word.to_string(), "road-10,road-1");
        assert_eq!(w("a,b,c"), w("abc"));
        assert!(Word::parse(&abc(), "abd").is_err());
        assert!(Alphabet::parse("a,a").is_err());
        assert!(Alphabet::parse("a").is_err());
        assert!(Alphabet::parse("a,,b").is_err());
    }

    #[test]
    fn params_validation() {
        assert!(PrivacyParams::new(0.0, 1).is_ok());
        assert!(PrivacyParams::new(-0.1, 1).is_err());
        assert!(PrivacyParams::new(f64::NAN, 1).is_err());
        assert!(PrivacyParams::new(1.0, 0).is_err());
        assert_eq!(PrivacyParams::new(3.0, 3).unwrap().rate(), 0.5);
    }

    fn word_strategy(len: usize) -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(0usize..3, len)
    }

    proptest! {
        #[test]
        fn metric_axioms(a in word_strategy(6), b in word_strategy(6), c in word_strategy(6)) {
            let alpha = abc();
            let (x, y, z) = (
                Word::new(alpha.clone(), a).unwrap(),
                Word::new(alpha.clone(), b).unwrap(),
                Word::new(alpha, c).unwrap(),
            );
            let dxy = hamming_distance(&x, &y).unwrap();
            prop_assert_eq!(dxy, hamming_distance(&y, &x).unwrap());
            prop_assert_eq!(dxy == 0, x == y);
            prop_assert!(dxy <= hamming_distance(&x, &z).unwrap() + hamming_distance(&z, &y).unwrap());
            prop_assert_eq!(utility(&x, &y).unwrap(), -(dxy as i64));
        }

        #[test]
        fn mutated_words_are_adjacent(
            base in word_strategy(8),
            b in 1u32..4,
            edits in prop::collection::vec((0usize..8, 0usize..3), 0..4),
        ) {
            let alpha = abc();
            let mut mutated = base.clone();
            for &(pos, sym) in edits.iter().take(b as usize) {
                mutated[pos] = sym;
            }
            let x = Word::new(alpha.clone(), base).unwrap();
            let y = Word::new(alpha, mutated).unwrap();
            prop_assert!(is_adjacent(&x, &y, b).unwrap());
        }
    }
}
