//! Problem files: parse, echo in canonical form, and run a command the
//! way the `embedcap` binary does, without leaving the process.

use embedcap::cli::spec::{echo, parse_spec};
use embedcap::cli::{run, Cli};
use clap::Parser;

fn main() -> embedcap::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/mac_or.toml");
    let parsed = parse_spec(path.as_ref())?;
    println!("{}", echo(&parsed.file)?);

    let cli = Cli::parse_from(["embedcap", "region", "--spec", path, "--grid-step", "1/8"]);
    let outcome = run(&cli.command)?;
    print!("{}", outcome.csv.unwrap_or_default());
    println!("exit code {}", outcome.exit_code);
    Ok(())
}
