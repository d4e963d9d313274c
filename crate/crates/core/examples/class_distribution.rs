// Distance distributions of permute-and-flip and the exponential mechanism
// side by side.

use std::error::Error;

use wordpriv::{em_class_distribution, pf_class_distribution, DistanceSpectrum, PrivacyParams};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spectrum = DistanceSpectrum::full(6, 3)?;
    let params = PrivacyParams::new(3.0, 1)?;
    let pf = pf_class_distribution(&spectrum, &params)?;
    let em = em_class_distribution(&spectrum, &params)?;
    println!("ell  count      pf        em");
    for ell in 0..=6 {
        println!("{ell:>3}  {:>5}  {:.6}  {:.6}", spectrum.count(ell), pf.prob(ell), em.prob(ell));
    }
    println!("E[ell]: pf {:.4}, em {:.4}", pf.expected_error(), em.expected_error());
    println!("{}", serde_json::to_string_pretty(&pf.summary())?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
