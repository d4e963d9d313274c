// Releases a privatized copy of a short word at a few privacy levels.

use std::error::Error;

use wordpriv::{mechanism1, Alphabet, PrivacyParams, Word};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alphabet = Alphabet::parse("a,b,c,d")?;
    let w = Word::parse(&alphabet, "abcdabcd")?;
    for eps in [0.5, 2.0, 8.0] {
        let params = PrivacyParams::new(eps, 1)?;
        let report = mechanism1(&w, &params, 7)?;
        println!("eps={eps:<4} {} -> {} (distance {})", report.input, report.output, report.ell);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
