// Upper and lower bounds on the expected distance against the exact value,
// plus the concentration tail.

use std::error::Error;

use wordpriv::{bounds, hoeffding_tail, PrivacyParams};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    println!("  eps     lower     exact     upper");
    for eps in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let r = bounds(5, 2, &PrivacyParams::new(eps, 1)?)?;
        println!("{eps:>5}  {:>8.5}  {:>8.5}  {:>8.5}", r.lower, r.expected_error, r.upper);
    }
    for t in [1.0, 2.0, 3.0] {
        println!("P(|ell - E| >= {t}) <= {:.5}", hoeffding_tail(5, t)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
