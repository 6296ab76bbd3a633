//! Structural checks on a problem file: inner ⊆ outer, budget nesting,
//! and the case identities that apply.
//!
//! `cargo run --example verify_structure -- path/to/problem.toml`

use embedcap::cli::spec::parse_spec;
use embedcap::regions::verify::{verify_problem, VerifyOptions};
use embedcap::regions::{Problem, SearchConfig};

fn main() -> embedcap::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/mac_xor_noisy.toml").to_string()
    });
    let problem = parse_spec(path.as_ref())?.problem;
    let relaxed = match &problem {
        Problem::Mac(p) => vec![p.delta1() + 0.1, p.delta2() + 0.1],
        Problem::Bc(p) => vec![p.delta() + 0.1],
    };
    let opts = VerifyOptions { relaxed_budgets: relaxed, ..Default::default() };
    let mut cfg = SearchConfig::default().with_step(8);
    cfg.aux.u = Some(2);
    cfg.aux.v = Some(2);
    for check in verify_problem(&problem, &cfg, &opts)? {
        println!("{:<24} {:<5} {:.3e}", check.name, check.passed, check.max_violation);
    }
    Ok(())
}
