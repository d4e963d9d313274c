// Builds the distance-2 automaton for `abc`, prints its counts and branch
// ratios, and samples from it.

use std::error::Error;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wordpriv::nfa::NfaState;
use wordpriv::{Alphabet, HammingNfa, Word};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alphabet = Alphabet::parse("a,b,c")?;
    let w = Word::parse(&alphabet, "abc")?;
    let mut nfa = HammingNfa::build(&w, 2)?;
    nfa.synthesize_policy();
    print!("{}", nfa.export_graph());

    let start = NfaState::new(0, 0);
    println!("words at distance 2: {}", nfa.completion(start).unwrap());
    for sym in 0..3 {
        if let Some(p) = nfa.branch_probability(start, sym) {
            println!("P({}) from start = {p}", alphabet.symbol(sym));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws: Vec<String> = (0..4).map(|_| nfa.sample_word(&mut rng).map(|v| v.to_string())).collect::<Result<_, _>>()?;
    println!("samples: {draws:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
