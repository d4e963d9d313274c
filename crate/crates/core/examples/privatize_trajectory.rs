// Privatizes a trajectory of a small chain; every release is feasible.

use std::error::Error;
use std::sync::Arc;

use wordpriv::{mechanism2, Alphabet, MarkovChain, PrivacyParams, Word};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let states = Alphabet::parse("y0,y1,y2,y3")?;
    let t = vec![
        vec![0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        vec![0.0, 0.0, 0.5, 0.5],
        vec![0.5, 0.0, 0.0, 0.5],
        vec![0.5, 0.0, 0.5, 0.0],
    ];
    let chain = Arc::new(MarkovChain::new(states, t, 0)?);
    let w = Word::parse(chain.states(), "y1,y2,y3,y0,y2")?;
    let params = PrivacyParams::new(1.0, 1)?;
    for seed in 0..5 {
        let r = mechanism2(&chain, &w, &params, seed)?;
        let out = Word::parse(chain.states(), &r.output)?;
        assert!(chain.is_feasible(&out)?);
        println!("seed {seed}: {} (distance {})", r.output, r.ell);
    }

    // y3 never moves to y1, so this input is rejected up front.
    let bad = Word::parse(chain.states(), "y3,y1,y1")?;
    if let Err(e) = mechanism2(&chain, &bad, &params, 0) {
        println!("rejected: {e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
