// Product of the distance automaton with a chain's transition graph: only
// feasible words at the requested distance survive.

use std::error::Error;
use std::sync::Arc;

use wordpriv::{feasible_spectrum, Alphabet, MarkovChain, ProductNfa, Word};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let states = Alphabet::parse("y0,y1,y2,y3")?;
    let t = vec![
        vec![0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        vec![0.0, 0.0, 0.5, 0.5],
        vec![0.5, 0.0, 0.0, 0.5],
        vec![0.5, 0.0, 0.5, 0.0],
    ];
    let chain = Arc::new(MarkovChain::new(states, t, 0)?);
    let w = Word::parse(chain.states(), "y1,y2,y3")?;

    let mut p = ProductNfa::build(&chain, &w, 2)?;
    p.synthesize_policy();
    print!("{}", p.export_graph());
    for v in p.language()? {
        println!("accepted {v}");
    }

    let spectrum = feasible_spectrum(&chain, &w)?;
    let counts: Vec<String> = spectrum.counts().iter().map(|c| c.to_string()).collect();
    println!("feasible words per distance: {}", counts.join(" "));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
