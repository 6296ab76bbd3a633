//! Command-line front end: `region`, `simulate`, `verify` and
//! `typicality-check` over a TOML problem file.
//!
//! Every command prints a JSON [`RunReport`] on stdout. `--out` writes the
//! region CSV for `region` and the report itself otherwise. Exit codes:
//! 0 success, 2 bad problem file or arguments, 3 budget refusal,
//! 4 failed verification, 1 anything else.

pub mod spec;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::codec::{simulate, SimConfig, Scheme};
use crate::error::{Error, Result};
use crate::prob::{Alphabet, JointPmf, Pmf};
use crate::regions::verify::{verify_problem, VerifyOptions};
use crate::regions::{
    compute_region, region_csv, AuxSizes, BoundKind, FeasibleTuple, Problem, RateRegion,
    SearchConfig,
};
use crate::typicality::{monte_carlo_coverage, typical_set_stats};
use spec::{echo, parse_spec, ParsedSpec, SearchSpec, SimSpec, SpecFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_SPEC: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "EMBEDCAP_THREADS";

#[derive(Parser, Debug)]
#[command(name = "embedcap", version, about = "Rate regions and coding simulations for information embedding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a rate region and print hull vertices and support samples.
    Region(Flags),
    /// Run the random-coding scheme for the problem's case.
    Simulate(Flags),
    /// Check containment, budget nesting and case identities.
    Verify(Flags),
    /// Empirical coverage and exact size window of the host's typical set.
    TypicalityCheck(Flags),
}

#[derive(Args, Debug, Clone)]
pub struct Flags {
    /// Problem file (TOML).
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid step as `1/m`, `m` or a decimal such as `0.125`.
    #[arg(long, value_parser = parse_grid_step)]
    pub grid_step: Option<u32>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eps1: Option<f64>,
    /// Blocklength.
    #[arg(long)]
    pub n: Option<usize>,
    /// Monte Carlo trials (samples for `typicality-check`).
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Rates for `simulate`.
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    /// `inner` or `outer`.
    #[arg(long, value_parser = parse_bound)]
    pub bound: Option<BoundKind>,
}

/// Parses `1/8`, `8` or `0.125` into the denominator 8.
pub fn parse_grid_step(s: &str) -> std::result::Result<u32, String> {
    let s = s.trim();
    let m = if let Some(d) = s.strip_prefix("1/") {
        d.parse::<u32>().map_err(|e| e.to_string())?
    } else if let Ok(m) = s.parse::<u32>() {
        m
    } else {
        let x: f64 = s.parse().map_err(|_| format!("cannot read grid step `{s}`"))?;
        if !(x > 0.0 && x <= 1.0) {
            return Err(format!("grid step {x} must lie in (0, 1]"));
        }
        let m = (1.0 / x).round();
        if ((1.0 / m) - x).abs() > 1e-12 {
            return Err(format!("grid step {x} is not of the form 1/m"));
        }
        m as u32
    };
    if m == 0 {
        return Err("grid denominator must be positive".into());
    }
    Ok(m)
}

fn parse_bound(s: &str) -> std::result::Result<BoundKind, String> {
    match s {
        "inner" => Ok(BoundKind::Inner),
        "outer" => Ok(BoundKind::Outer),
        _ => Err(format!("bound must be `inner` or `outer`, not `{s}`")),
    }
}

/// Self-describing output of one command.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: Option<u64>,
    /// Canonical problem file with the effective `[search]`/`[sim]`
    /// parameters folded in; rerunning on it reproduces the results.
    pub spec: String,
    pub results: Value,
    pub wall_time_s: f64,
}

/// Result of [`run`]: report, optional CSV and exit code.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub csv: Option<String>,
    pub exit_code: i32,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Spec(_) => EXIT_SPEC,
        Error::BudgetExceeded { .. } | Error::TableTooLarge { .. } => EXIT_BUDGET,
        _ => EXIT_FAILURE,
    }
}

fn merged_search(file: &SpecFile, flags: &Flags) -> SearchSpec {
    let mut s = file.search.as_ref().map(|s| s.get_ref().clone()).unwrap_or_default();
    if flags.grid_step.is_some() {
        s.grid_step = flags.grid_step;
    }
    if flags.bound.is_some() {
        s.bound = flags.bound;
    }
    s
}

fn merged_sim(file: &SpecFile, flags: &Flags) -> SimSpec {
    let mut s = file.sim.as_ref().map(|s| s.get_ref().clone()).unwrap_or_default();
    macro_rules! take {
        ($($f:ident),*) => { $( if flags.$f.is_some() { s.$f = flags.$f; } )* };
    }
    take!(seed, eps, eps1, n, trials, r1, r2);
    s
}

/// Search configuration described by a `[search]` block.
pub fn search_config(s: &SearchSpec) -> SearchConfig {
    let mut cfg = SearchConfig {
        bound: s.bound.unwrap_or_default(),
        step: s.grid_step,
        aux: AuxSizes {
            u1: s.u1,
            u2: s.u2,
            u: s.u,
            v: s.v,
            w: s.w,
        },
        ..SearchConfig::default()
    };
    if let Some(m) = s.max_candidates {
        cfg.max_candidates = m as u128;
    }
    if let Some(r) = s.refine {
        cfg.refine = r;
    }
    cfg
}

/// Simulation configuration described by a `[sim]` block.
pub fn sim_config(s: &SimSpec) -> SimConfig {
    let mut cfg = SimConfig::new(s.n.unwrap_or(8), s.r1.unwrap_or(0.0), s.r2.unwrap_or(0.0));
    if let Some(v) = s.eps {
        cfg.eps = v;
    }
    if let Some(v) = s.eps1 {
        cfg.eps1 = v;
    }
    if let Some(v) = s.trials {
        cfg.trials = v;
    }
    if let Some(v) = s.seed {
        cfg.seed = v;
    }
    if let Some(v) = s.decode_budget {
        cfg.decode_budget = v as u128;
    }
    cfg
}

fn region_json(region: &RateRegion) -> Value {
    json!({
        "empty": region.empty,
        "zero_rate_achievable": region.zero_rate_achievable(),
        "csv": region_csv(region),
        "vertices": region.vertices,
        "support_samples": region.support_samples,
        "witness_bounds": region.witnesses.iter().map(|w| w.bounds).collect::<Vec<_>>(),
    })
}

/// The inner-region witness whose polytope holds `(r1, r2)` with the most
/// slack (or misses it by the least).
fn witness_tuple(problem: &Problem, search: &SearchSpec, r1: f64, r2: f64) -> Result<FeasibleTuple> {
    let cfg = search_config(search).with_bound(BoundKind::Inner);
    let region = compute_region(problem, &cfg)?;
    let slack = |b: &crate::regions::Bounds| {
        let mut s = (b.b1 - r1).min(b.b2 - r2);
        if let Some(c) = b.b12 {
            s = s.min(c - r1 - r2);
        }
        s
    };
    region
        .witnesses
        .iter()
        .max_by(|a, b| slack(&a.bounds).total_cmp(&slack(&b.bounds)))
        .map(|w| w.tuple.clone())
        .ok_or(Error::EmptyRegion)
}

fn host_joint(problem: &Problem) -> Result<JointPmf> {
    match problem {
        Problem::Mac(p) => Ok(p.host().clone()),
        Problem::Bc(p) => Ok(JointPmf::from_pmf(p.host())),
    }
}

/// Executes one command.
pub fn run(command: &Command) -> Result<Outcome> {
    let start = Instant::now();
    let (name, flags) = match command {
        Command::Region(f) => ("region", f),
        Command::Simulate(f) => ("simulate", f),
        Command::Verify(f) => ("verify", f),
        Command::TypicalityCheck(f) => ("typicality-check", f),
    };
    let ParsedSpec {
        mut file,
        problem,
        tuple,
    } = parse_spec(&flags.spec)?;
    let mut csv = None;
    let mut exit = EXIT_OK;
    let mut seed = None;
    let results = match command {
        Command::Region(_) => {
            let search = merged_search(&file, flags);
            let region = compute_region(&problem, &search_config(&search))?;
            file.search = Some(toml::Spanned::new(0..0, search));
            csv = Some(region_csv(&region));
            region_json(&region)
        }
        Command::Verify(_) => {
            let search = merged_search(&file, flags);
            let budget = file.budget.get_ref();
            let relaxed = match &problem {
                Problem::Mac(p) => vec![
                    budget.relaxed_delta1.unwrap_or(p.delta1() + 0.1),
                    budget.relaxed_delta2.unwrap_or(p.delta2() + 0.1),
                ],
                Problem::Bc(p) => vec![budget.relaxed_delta.unwrap_or(p.delta() + 0.1)],
            };
            let opts = VerifyOptions {
                relaxed_budgets: relaxed.clone(),
                ..VerifyOptions::default()
            };
            let checks = verify_problem(&problem, &search_config(&search), &opts)?;
            let passed = checks.iter().all(|c| c.passed);
            if !passed {
                exit = EXIT_VERIFY;
            }
            file.search = Some(toml::Spanned::new(0..0, search));
            json!({ "passed": passed, "relaxed_budgets": relaxed, "checks": checks })
        }
        Command::Simulate(_) => {
            let sim = merged_sim(&file, flags);
            let cfg = sim_config(&sim);
            cfg.validate()?;
            let scheme = Scheme::for_problem(&problem)?;
            let search = merged_search(&file, flags);
            let (tuple, source) = match tuple {
                Some(t) => (t, "spec"),
                None => (witness_tuple(&problem, &search, cfg.r1, cfg.r2)?, "region-witness"),
            };
            seed = Some(cfg.seed);
            let report = simulate(&problem, scheme, &tuple, &cfg)?;
            file.sim = Some(toml::Spanned::new(
                0..0,
                SimSpec {
                    n: Some(cfg.n),
                    r1: Some(cfg.r1),
                    r2: Some(cfg.r2),
                    eps: Some(cfg.eps),
                    eps1: Some(cfg.eps1),
                    trials: Some(cfg.trials),
                    seed: Some(cfg.seed),
                    decode_budget: Some(cfg.decode_budget.min(u64::MAX as u128) as u64),
                },
            ));
            if source == "region-witness" {
                file.search = Some(toml::Spanned::new(0..0, search));
            }
            json!({ "tuple_source": source, "report": report })
        }
        Command::TypicalityCheck(_) => {
            let sim = merged_sim(&file, flags);
            let n = sim.n.unwrap_or(12);
            let eps = sim.eps.unwrap_or(0.1);
            let samples = sim.trials.unwrap_or(10_000);
            let s = sim.seed.unwrap_or(0);
            seed = Some(s);
            let joint = host_joint(&problem)?;
            let names: Vec<&str> = joint.axes().iter().map(Alphabet::name).collect();
            let flat = Pmf::new(Alphabet::new(names.join(","), joint.num_cells())?, joint.probs().to_vec())?;
            let coverage = monte_carlo_coverage(&flat, n, eps, samples, s);
            let stats = typical_set_stats(&joint, n, eps)?;
            if !stats.sandwich_holds() {
                exit = EXIT_VERIFY;
            }
            file.sim = Some(toml::Spanned::new(
                0..0,
                SimSpec {
                    n: Some(n),
                    eps: Some(eps),
                    trials: Some(samples),
                    seed: Some(s),
                    ..SimSpec::default()
                },
            ));
            json!({
                "n": n,
                "eps": eps,
                "samples": samples,
                "coverage": coverage,
                "stats": stats,
                "sandwich_holds": stats.sandwich_holds(),
            })
        }
    };
    let report = RunReport {
        tool: "embedcap".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: name.into(),
        seed,
        spec: echo(&file)?,
        results,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(Outcome {
        report,
        csv,
        exit_code: exit,
    })
}

fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::InvalidParameter(format!("{THREADS_ENV}={v} is not a positive integer"))),
        },
        Err(_) => Ok(None),
    }
}

fn write_outputs(command: &Command, outcome: &Outcome) -> Result<()> {
    let json = serde_json::to_string_pretty(&outcome.report)
        .map_err(|e| Error::InvalidParameter(format!("cannot serialize report: {e}")))?;
    println!("{json}");
    let flags = match command {
        Command::Region(f) | Command::Simulate(f) | Command::Verify(f) | Command::TypicalityCheck(f) => f,
    };
    if let Some(path) = &flags.out {
        match &outcome.csv {
            Some(csv) => std::fs::write(path, csv)?,
            None => std::fs::write(path, format!("{json}\n"))?,
        }
    }
    Ok(())
}

/// Parses `args`, runs the command on a pool capped by `EMBEDCAP_THREADS`
/// and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_SPEC } else { EXIT_OK };
        }
    };
    let result = threads_from_env().and_then(|threads| {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            b = b.num_threads(t);
        }
        let pool = b
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| run(&cli.command))
    });
    match result.and_then(|o| write_outputs(&cli.command, &o).map(|_| o.exit_code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
