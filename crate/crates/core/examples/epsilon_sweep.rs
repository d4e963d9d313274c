// A small epsilon sweep on a synthetic chain comparing mean error of the
// two mechanisms.

use std::error::Error;
use std::sync::Arc;

use wordpriv::harness::{sweep, write_csv, SweepConfig, Target};
use wordpriv::{MarkovChain, Selection};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let chain = Arc::new(MarkovChain::synthetic(10, 0.15, 29)?);
    let config = SweepConfig {
        epsilons: vec![0.1, 1.0, 3.0, 5.0],
        adjacency: 1,
        trials: 200,
        selections: vec![Selection::PermuteAndFlip, Selection::Exponential],
        target: Target::random_trajectory(&chain, 14, 29)?,
        seed: 1,
    };
    let out = sweep(&config)?;
    for r in &out.summary.reductions {
        println!("eps {:>4}: pf {:.3}  em {:.3}  reduction {:.1}%", r.epsilon, r.pf_mean, r.em_mean, r.reduction_pct);
    }
    let mut csv = vec![];
    write_csv(&out.rows[..3], &mut csv)?;
    print!("{}", String::from_utf8(csv)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
