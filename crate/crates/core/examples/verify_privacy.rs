// Exhaustive privacy check: every adjacent pair of binary words of length 3
// against every output.

use std::error::Error;

use wordpriv::harness::{oracle_compare, verify_instance};
use wordpriv::mechanisms::Source;
use wordpriv::{Alphabet, PrivacyParams, Selection, Word};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alphabet = Alphabet::parse("a,b")?;
    for eps in [0.5, 1.0, 5.0] {
        let params = PrivacyParams::new(eps, 1)?;
        let r = verify_instance(Source::Words(&alphabet), 3, &params, Selection::PermuteAndFlip)?;
        println!("eps {eps}: max log-ratio {:.6} over {} pairs, holds={}", r.max_log_ratio, r.pairs_checked, r.holds);
    }
    let w = Word::parse(&alphabet, "aba")?;
    let c = oracle_compare(&w, &PrivacyParams::new(1.0, 1)?, 100_000, 3)?;
    println!("subset-sum gap {:.2e}, simulation TV {:.4}", c.max_abs_diff, c.simulated_tv);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
