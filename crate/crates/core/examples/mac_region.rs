//! Case C region of a two-user embedding MAC: Bernoulli(0.05) hosts,
//! output `X1 ⊕ X2` through a BSC(0.02), Hamming budgets of 0.5.
//!
//! Prints the hull, the support function and the outer bound.

use embedcap::prob::{Alphabet, DistortionMeasure, JointPmf, Kernel, Pmf};
use embedcap::regions::{
    compute_region, region_csv, support_function, BoundKind, MacCase, MacProblem, Problem,
    SearchConfig,
};

fn main() -> embedcap::Result<()> {
    let s1 = Alphabet::new("S1", 2)?;
    let s2 = Alphabet::new("S2", 2)?;
    let x1 = Alphabet::new("X1", 2)?;
    let x2 = Alphabet::new("X2", 2)?;
    let y = Alphabet::new("Y", 2)?;

    let host = JointPmf::independent(
        &JointPmf::from_pmf(&Pmf::bernoulli("S1", 0.05)?),
        &JointPmf::from_pmf(&Pmf::bernoulli("S2", 0.05)?),
    )?;
    let flip = 0.02;
    let channel = Kernel::from_fn(
        vec![x1.clone(), s1.clone(), x2.clone(), s2.clone()],
        vec![y],
        |i, o| if o[0] == i[0] ^ i[2] { 1.0 - flip } else { flip },
    )?;
    let problem = Problem::Mac(MacProblem::new(
        host,
        channel,
        DistortionMeasure::hamming(&s1, &x1)?,
        DistortionMeasure::hamming(&s2, &x2)?,
        0.5,
        0.5,
        MacCase::C,
    )?);

    let inner = compute_region(&problem, &SearchConfig::default().with_step(8))?;
    print!("{}", region_csv(&inner));
    for lambda in [0.0, 0.5, 1.0] {
        println!("# support({lambda}) = {:.6}", support_function(&inner, lambda)?);
    }

    let outer = compute_region(&problem, &SearchConfig::default().with_step(4).with_bound(BoundKind::Outer))?;
    println!("# outer support(0.5) = {:.6}", support_function(&outer, 0.5)?);
    Ok(())
}
