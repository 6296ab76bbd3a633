//! B′ scheme (binning for the strong receiver's host, superposition for
//! the weak one) at blocklength 4, with a per-event error breakdown.

use embedcap::cli::spec::parse_spec;
use embedcap::codec::{simulate, Scheme, SimConfig};
use embedcap::regions::{compute_region, SearchConfig};

fn main() -> embedcap::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/bc_b_noisy.toml");
    let parsed = parse_spec(path.as_ref())?;
    let mut cfg = SearchConfig::default();
    cfg.aux.u = Some(2);
    let region = compute_region(&parsed.problem, &cfg)?;
    let witness = &region.witnesses[1];
    println!("witness vertex {:?}", witness.point);

    // bins hold 2^{n(I(U;S)+eps)} sequences, so n·eps has to stay small

    let sim = SimConfig::new(4, 0.25, 0.25).with_trials(200).with_eps(1.0, 0.5).with_seed(11);
    let rep = simulate(&parsed.problem, Scheme::BcB, &witness.tuple, &sim)?;
    println!("{}", serde_json::to_string_pretty(&rep).expect("serializable"));
    Ok(())
}
