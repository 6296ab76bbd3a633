//! Structural checks between regions: inner ⊆ outer, monotonicity in the
//! distortion budget, case B ⊆ case A, and the C′/D′ identity.
//!
//! Regions that must contain another are seeded with the witnesses of the
//! smaller region (mapped into the larger tuple set), so the grid
//! heuristic always visits the tuples the inclusion argument relies on.

use serde::Serialize;

use super::search::compute_region;
use super::{
    distance_outside, region_csv, BcCase, BcFeasibleTuple, BoundKind, FeasibleTuple, MacCase,
    MacEncoders, MacFeasibleTuple, MacProblem, Problem, RateRegion, SearchConfig,
};
use crate::error::{Error, Result};
use crate::prob::{flatten, unflatten, Alphabet, Kernel};

/// Outcome of one structural check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub max_violation: f64,
}

/// Tolerance for the inclusion checks.
pub const VERIFY_TOL: f64 = 1e-6;

/// Options for [`verify_problem`].
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Angles at which support functions are compared.
    pub lambdas: Vec<f64>,
    /// Larger budgets for the nesting check: `[Δ1′, Δ2′]` for MAC,
    /// `[Δ′]` for broadcast instances.
    pub relaxed_budgets: Vec<f64>,
    /// Grid denominator for outer-bound searches (defaults to the search
    /// config's).
    pub outer_step: Option<u32>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            lambdas: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            relaxed_budgets: Vec::new(),
            outer_step: None,
        }
    }
}

/// Largest amount by which `inner` pokes out of `outer`: vertex distance
/// outside the polygon and support-function excess at `lambdas`.
pub fn inclusion_violation(inner: &RateRegion, outer: &RateRegion, lambdas: &[f64]) -> f64 {
    if inner.empty {
        return 0.0;
    }
    if outer.empty {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for v in &inner.vertices {
        worst = worst.max(distance_outside(outer, *v));
    }
    for &l in lambdas {
        let a = super::hull::support(&inner.vertices, l);
        let b = super::hull::support(&outer.vertices, l);
        worst = worst.max(a - b);
    }
    worst
}

fn check(name: &str, violation: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: violation <= VERIFY_TOL,
        max_violation: violation.max(0.0),
    }
}

/// Conditional of one output axis given the kernel's inputs, with the
/// other outputs summed out.
fn output_marginal(k: &Kernel, input: &[usize], out: &str) -> Result<Vec<f64>> {
    let pos = k
        .outputs()
        .iter()
        .position(|a| a.name() == out)
        .ok_or_else(|| Error::UnknownAxis(out.to_string()))?;
    let sizes: Vec<usize> = k.outputs().iter().map(Alphabet::size).collect();
    let mut m = vec![0.0; sizes[pos]];
    for (c, p) in k.row_for(input).iter().enumerate() {
        m[unflatten(c, &sizes)[pos]] += p;
    }
    Ok(m)
}

/// Symbols of `k`'s inputs taken from a name → symbol lookup.
fn inputs_of(k: &Kernel, get: &dyn Fn(&str) -> usize) -> Vec<usize> {
    k.inputs().iter().map(|a| get(a.name())).collect()
}

/// Maps a separate-encoder tuple into the joint-encoder (outer) set:
/// `p(x1, x2 | s1, s2, q) = p(x1 | s1, q) p(x2 | s2, q)`.
pub fn separate_to_joint(t: &MacFeasibleTuple, p: &MacProblem) -> Result<MacFeasibleTuple> {
    let (enc1, enc2) = match &t.encoders {
        MacEncoders::Separate { enc1, enc2 } => (enc1, enc2),
        MacEncoders::Joint { .. } => return Ok(t.clone()),
    };
    let mut inputs = vec![p.alphabet("S1")?, p.alphabet("S2")?];
    let uses_q = enc1
        .inputs()
        .iter()
        .chain(enc2.inputs())
        .any(|a| a.name() == "Q");
    if uses_q {
        inputs.push(t.q.alphabet().clone());
    }
    let outputs = vec![p.alphabet("X1")?, p.alphabet("X2")?];
    let n_in = inputs.len();
    let x2 = outputs[1].size();
    let mut probs = Vec::new();
    let in_sizes: Vec<usize> = inputs.iter().map(Alphabet::size).collect();
    let rows: usize = in_sizes.iter().product();
    for r in 0..rows {
        let a = unflatten(r, &in_sizes);
        let get = |n: &str| match n {
            "S1" => a[0],
            "S2" => a[1],
            _ => {
                if n_in > 2 {
                    a[2]
                } else {
                    0
                }
            }
        };
        let m1 = output_marginal(enc1, &inputs_of(enc1, &get), "X1")?;
        let m2 = output_marginal(enc2, &inputs_of(enc2, &get), "X2")?;
        for v1 in &m1 {
            for j in 0..x2 {
                probs.push(v1 * m2[j]);
            }
        }
    }
    Ok(MacFeasibleTuple {
        q: t.q.clone(),
        encoders: MacEncoders::Joint {
            enc: Kernel::new(inputs, outputs, probs)?,
        },
    })
}

/// Maps a case-B tuple into case A by taking `U2 = (X2, S2)`, encoded as
/// `u2 = x2·|S2| + s2`.
pub fn case_b_to_case_a(t: &MacFeasibleTuple, p: &MacProblem) -> Result<MacFeasibleTuple> {
    let (enc1, enc2) = match &t.encoders {
        MacEncoders::Separate { enc1, enc2 } => (enc1, enc2),
        MacEncoders::Joint { .. } => {
            return Err(Error::InvalidParameter("case B tuples use separate encoders".into()))
        }
    };
    let s2 = p.alphabet("S2")?;
    let x2 = p.alphabet("X2")?;
    let u2 = Alphabet::new("U2", x2.size() * s2.size())?;
    let s_pos = enc2
        .inputs()
        .iter()
        .position(|a| a.name() == "S2")
        .ok_or_else(|| Error::AxisMismatch("encoder 2 needs input `S2`".into()))?;
    let enc2_sizes: Vec<usize> = enc2.inputs().iter().map(Alphabet::size).collect();
    let rows: usize = enc2_sizes.iter().product();
    let mut probs = Vec::new();
    for r in 0..rows {
        let a = unflatten(r, &enc2_sizes);
        let m = output_marginal(enc2, &a, "X2")?;
        for u in 0..u2.size() {
            for (x, px) in m.iter().enumerate() {
                let hit = u == flatten(&[x, a[s_pos]], &[x2.size(), s2.size()]);
                probs.push(if hit { *px } else { 0.0 });
            }
        }
    }
    let new_enc2 = Kernel::new(enc2.inputs().to_vec(), vec![u2, x2], probs)?;
    Ok(MacFeasibleTuple {
        q: t.q.clone(),
        encoders: MacEncoders::Separate {
            enc1: enc1.clone(),
            enc2: new_enc2,
        },
    })
}

/// Adds a constant auxiliary output named `name` (inserted before `X`).
pub fn add_constant_aux(t: &BcFeasibleTuple, name: &str) -> Result<BcFeasibleTuple> {
    let enc = &t.enc;
    let mut outputs: Vec<Alphabet> = Vec::new();
    for a in enc.outputs() {
        if a.name() == "X" {
            outputs.push(Alphabet::new(name, 1)?);
        }
        outputs.push(a.clone());
    }
    Ok(BcFeasibleTuple {
        enc: Kernel::new(enc.inputs().to_vec(), outputs, enc.probs().to_vec())?,
    })
}

fn witness_tuples(r: &RateRegion) -> Vec<FeasibleTuple> {
    r.witnesses.iter().map(|w| w.tuple.clone()).collect()
}

fn with_seeds(cfg: &SearchConfig, extra: Vec<FeasibleTuple>) -> SearchConfig {
    let mut c = cfg.clone();
    c.seeds.extend(extra);
    c
}

fn outer_cfg(cfg: &SearchConfig, opts: &VerifyOptions, seeds: Vec<FeasibleTuple>) -> SearchConfig {
    let mut c = with_seeds(cfg, seeds).with_bound(BoundKind::Outer);
    if let Some(m) = opts.outer_step {
        c.step = Some(m);
    }
    c
}

/// Outer region for the checks. Without an explicit outer step, a grid
/// over the budget is retried at 1/4 and 1/2: outer tuples carry joint
/// encoders and outgrow the inner grid quickly, and the inner witnesses
/// are seeded in anyway.
fn outer_region(
    problem: &Problem,
    cfg: &SearchConfig,
    opts: &VerifyOptions,
    seeds: Vec<FeasibleTuple>,
) -> Result<RateRegion> {
    let c = outer_cfg(cfg, opts, seeds);
    let first = compute_region(problem, &c);
    if opts.outer_step.is_some() || !matches!(first, Err(Error::BudgetExceeded { .. })) {
        return first;
    }
    let start = c.step.unwrap_or(8);
    let mut last = first;
    for m in [4, 2].into_iter().filter(|&m| m < start) {
        last = compute_region(problem, &SearchConfig { step: Some(m), ..c.clone() });
        if !matches!(last, Err(Error::BudgetExceeded { .. })) {
            break;
        }
    }
    last
}

fn relaxed(problem: &Problem, opts: &VerifyOptions) -> Result<Problem> {
    match problem {
        Problem::Mac(p) => {
            let (d1, d2) = match opts.relaxed_budgets.as_slice() {
                [] => (p.delta1(), p.delta2()),
                [a] => (*a, *a),
                [a, b, ..] => (*a, *b),
            };
            if d1 < p.delta1() || d2 < p.delta2() {
                return Err(Error::InvalidParameter(
                    "relaxed budgets must not be smaller than the instance's".into(),
                ));
            }
            Ok(Problem::Mac(p.with_budgets(d1, d2)?))
        }
        Problem::Bc(p) => {
            let d = opts.relaxed_budgets.first().copied().unwrap_or(p.delta());
            if d < p.delta() {
                return Err(Error::InvalidParameter(
                    "relaxed budget must not be smaller than the instance's".into(),
                ));
            }
            Ok(Problem::Bc(p.with_budget(d)?))
        }
    }
}

/// Runs the checks that apply to the problem's case.
pub fn verify_problem(
    problem: &Problem,
    cfg: &SearchConfig,
    opts: &VerifyOptions,
) -> Result<Vec<CheckResult>> {
    let lambdas = &opts.lambdas;
    let mut out = Vec::new();
    let base = compute_region(problem, cfg)?;

    match problem {
        Problem::Mac(p) => match p.case() {
            MacCase::C => {
                let inner = if cfg.bound == BoundKind::Inner {
                    base.clone()
                } else {
                    compute_region(problem, &cfg.clone().with_bound(BoundKind::Inner))?
                };
                let seeds = inner
                    .witnesses
                    .iter()
                    .map(|w| match &w.tuple {
                        FeasibleTuple::Mac(t) => separate_to_joint(t, p).map(FeasibleTuple::Mac),
                        other => Ok(other.clone()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let outer = outer_region(problem, cfg, opts, seeds)?;
                out.push(check("inner_subset_outer", inclusion_violation(&inner, &outer, lambdas)));
            }
            MacCase::A | MacCase::B => {
                let pb = Problem::Mac(p.with_case(MacCase::B));
                let rb = if p.case() == MacCase::B {
                    base.clone()
                } else {
                    compute_region(&pb, cfg)?
                };
                let seeds = rb
                    .witnesses
                    .iter()
                    .map(|w| match &w.tuple {
                        FeasibleTuple::Mac(t) => case_b_to_case_a(t, p).map(FeasibleTuple::Mac),
                        other => Ok(other.clone()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let pa = Problem::Mac(p.with_case(MacCase::A));
                let ra = compute_region(&pa, &with_seeds(cfg, seeds))?;
                out.push(check("case_b_subset_case_a", inclusion_violation(&rb, &ra, lambdas)));
            }
        },
        Problem::Bc(p) => match p.case() {
            BcCase::A | BcCase::B => {
                let inner = if cfg.bound == BoundKind::Inner {
                    base.clone()
                } else {
                    compute_region(problem, &cfg.clone().with_bound(BoundKind::Inner))?
                };
                let extra = if p.case() == BcCase::A { "W" } else { "V" };
                let seeds = inner
                    .witnesses
                    .iter()
                    .map(|w| match &w.tuple {
                        FeasibleTuple::Bc(t) => add_constant_aux(t, extra).map(FeasibleTuple::Bc),
                        other => Ok(other.clone()),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let outer = outer_region(problem, cfg, opts, seeds)?;
                out.push(check("inner_subset_outer", inclusion_violation(&inner, &outer, lambdas)));
            }
            BcCase::C | BcCase::D => {
                let rc = compute_region(&Problem::Bc(p.with_case(BcCase::C)), cfg)?;
                let rd = compute_region(&Problem::Bc(p.with_case(BcCase::D)), cfg)?;
                let same = region_csv(&rc) == region_csv(&rd);
                out.push(CheckResult {
                    name: "c_equals_d".into(),
                    passed: same,
                    max_violation: if same { 0.0 } else { inclusion_violation(&rc, &rd, lambdas).max(inclusion_violation(&rd, &rc, lambdas)) },
                });
            }
        },
    }

    let looser = relaxed(problem, opts)?;
    let nested = compute_region(&looser, &with_seeds(cfg, witness_tuples(&base)))?;
    out.push(check("delta_nesting", inclusion_violation(&base, &nested, lambdas)));
    Ok(out)
}
