//! Random coding over the clean orthogonal MAC `Y = (X1, X2)` with known
//! hosts: error rate just inside and just outside the unit square.

use embedcap::cli::spec::parse_spec;
use embedcap::codec::{simulate, Scheme, SimConfig};
use embedcap::regions::{compute_region, FeasibleTuple, SearchConfig};

fn main() -> embedcap::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/mac_clean_square.toml");
    let problem = parse_spec(path.as_ref())?.problem;
    let region = compute_region(&problem, &SearchConfig::default())?;
    let tuple: FeasibleTuple = region.witnesses.last().expect("non-empty region").tuple.clone();

    for r in [0.85, 1.15] {
        let cfg = SimConfig::new(10, r, 0.0).with_trials(300).with_eps(32.0, 1.0).with_seed(3);
        let rep = simulate(&problem, Scheme::MacC, &tuple, &cfg)?;
        println!(
            "R1={r:.2}: M1={} error={:.3} {:?}",
            rep.m1, rep.empirical_error, rep.error_breakdown
        );
    }
    Ok(())
}
