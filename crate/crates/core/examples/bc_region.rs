//! Degraded broadcast embedding: the B′ inner region next to the C′
//! region for the same host, channel and budget.

use embedcap::prob::{Alphabet, DistortionMeasure, Kernel, Pmf};
use embedcap::regions::{compute_region, region_csv, AuxSizes, BcCase, BcProblem, Problem, SearchConfig};

fn problem(case: BcCase) -> embedcap::Result<Problem> {
    let host = Pmf::bernoulli("S", 0.05)?;
    let s = host.alphabet().clone();
    let x = Alphabet::new("X", 2)?;
    let y = Alphabet::new("Y", 2)?;
    // Y = X through a BSC(0.02), whatever the host
    let forward = Kernel::from_fn(vec![x.clone(), s.clone()], vec![y.clone()], |i, o| {
        if o[0] == i[0] { 0.98 } else { 0.02 }
    })?;
    let degrade = Kernel::bsc(&y, "Z", 0.1)?;
    Ok(Problem::Bc(BcProblem::new(host, forward, degrade, DistortionMeasure::hamming(&s, &x)?, 0.3, case)?))
}

fn main() -> embedcap::Result<()> {
    let mut cfg = SearchConfig::default().with_step(8);
    cfg.aux = AuxSizes { u: Some(2), v: Some(2), ..Default::default() };
    for case in [BcCase::B, BcCase::C] {
        let region = compute_region(&problem(case)?, &cfg)?;
        println!("# case {case:?}");
        print!("{}", region_csv(&region));
    }
    Ok(())
}
