//! C′ superposition scheme on a clean broadcast channel that reveals the
//! host: both decoders recover `sⁿ`, the strong one also the private
//! message.

use embedcap::cli::spec::parse_spec;
use embedcap::codec::{simulate, Scheme, SimConfig};
use embedcap::regions::{compute_region, SearchConfig};

fn main() -> embedcap::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/bc_c_clean.toml");
    let problem = parse_spec(path.as_ref())?.problem;
    let mut cfg = SearchConfig::default();
    cfg.aux.u = Some(2);
    let region = compute_region(&problem, &cfg)?;
    let tuple = &region.witnesses[2].tuple;

    // at n = 10 the loose eps needed for non-empty typical sets leaves no
    // room for cloud messages, so the sweep stays on the r1 axis
    for (r1, r2) in [(0.5, 0.0), (0.85, 0.0), (1.15, 0.0)] {
        let sim = SimConfig::new(10, r1, r2).with_trials(100).with_eps(16.0, 1.0).with_seed(5);
        let rep = simulate(&problem, Scheme::BcC, tuple, &sim)?;
        println!("({r1}, {r2}): error {:.3}  {:?}", rep.empirical_error, rep.error_breakdown);
    }
    Ok(())
}
