//! TOML problem files.
//!
//! ```toml
//! case = "mac-c"            # mac-a | mac-b | mac-c | bc-a | bc-b | bc-c | bc-d
//!
//! [alphabets]
//! S1 = 2
//! S2 = 2
//! X1 = 2
//! X2 = 2
//! Y = 4
//!
//! [host]                    # joint pmf, row-major in `axes` order
//! axes = ["S1", "S2"]
//! probs = [0.25, 0.25, 0.25, 0.25]
//!
//! [channel]                 # MAC: one kernel; broadcast: [channel.forward]
//! inputs = ["X1", "S1", "X2", "S2"]   # and [channel.degrade]
//! outputs = ["Y"]
//! probs = [...]             # one row per input combination
//!
//! [distortion]              # "hamming" or a |S|×|X| table
//! d1 = "hamming"
//! d2 = [0.0, 1.0, 1.0, 0.0]
//!
//! [budget]
//! delta1 = 0.25
//! delta2 = 0.25
//! ```
//!
//! Optional `[search]`, `[sim]` and `[tuple]` blocks carry run parameters
//! and an explicit operating point; see [`SearchSpec`], [`SimSpec`] and
//! [`TupleSpec`]. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{Error, Result};
use crate::prob::{Alphabet, DistortionMeasure, JointPmf, Kernel, Pmf};
use crate::regions::{
    assemble_bc_joint, assemble_mac_joint, BcCase, BcFeasibleTuple, BcProblem, BoundKind, FeasibleTuple, MacCase, MacEncoders,
    MacFeasibleTuple, MacProblem, Problem,
};

/// A parsed (not yet validated) problem file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub case: Spanned<String>,
    pub alphabets: Spanned<BTreeMap<String, usize>>,
    pub host: Spanned<TableSpec>,
    pub channel: Spanned<ChannelSpec>,
    pub distortion: Spanned<DistortionSpec>,
    pub budget: Spanned<BudgetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<Spanned<SearchSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<Spanned<SimSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<Spanned<TupleSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub axes: Vec<String>,
    pub probs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub probs: Vec<f64>,
}

/// MAC files give `inputs`/`outputs`/`probs` directly; broadcast files
/// give `forward` and `degrade` sub-tables.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forward: Option<KernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrade: Option<KernelSpec>,
}

/// `"hamming"` or a row-major `|S| × |X|` table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistortionTable {
    Named(String),
    Table(Vec<f64>),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistortionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<DistortionTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<DistortionTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<DistortionTable>,
}

/// Distortion budgets, plus the looser budgets used by `verify`'s nesting
/// check (default: budget + 0.1).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxed_delta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxed_delta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxed_delta: Option<f64>,
}

/// Region search parameters; absent fields take library defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundKind>,
    /// Grid denominator `m` (step `1/m`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u2: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_candidates: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<bool>,
}

/// Simulation parameters; absent fields take library defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decode_budget: Option<u64>,
}

/// An explicit operating point: `enc1`/`enc2` (MAC) or `enc` (broadcast),
/// plus an optional time-sharing pmf `q`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enc1: Option<KernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enc2: Option<KernelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enc: Option<KernelSpec>,
}

const MAC_AXES: [&str; 5] = ["S1", "S2", "X1", "X2", "Y"];
const MAC_AUX: [&str; 2] = ["U1", "U2"];
const BC_AXES: [&str; 4] = ["S", "X", "Y", "Z"];
const BC_AUX: [&str; 3] = ["U", "V", "W"];

/// A validated file: the problem, its optional tuple, and the source text
/// positions needed for diagnostics.
#[derive(Clone, Debug)]
pub struct ParsedSpec {
    pub file: SpecFile,
    pub problem: Problem,
    pub tuple: Option<FeasibleTuple>,
}

/// Reads and validates a problem file.
pub fn parse_spec(path: &Path) -> Result<ParsedSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Spec(format!("{}: {e}", path.display())))?;
    parse_spec_str(&text).map_err(|e| match e {
        Error::Spec(m) => Error::Spec(format!("{}:{m}", path.display())),
        other => other,
    })
}

/// Parses and validates problem-file text. Diagnostics start with
/// `line:column:`.
pub fn parse_spec_str(text: &str) -> Result<ParsedSpec> {
    let file: SpecFile = toml::from_str(text).map_err(|e| {
        let (line, col) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        Error::Spec(format!("{line}:{col}: {}", e.message()))
    })?;
    let problem = build_problem(&file, text)?;
    let tuple = match &file.tuple {
        Some(t) => Some(at(text, t, "tuple", build_tuple(t.get_ref(), &file, &problem))?),
        None => None,
    };
    Ok(ParsedSpec {
        file,
        problem,
        tuple,
    })
}

/// Canonical TOML rendering; parsing it yields the same [`SpecFile`].
pub fn echo(file: &SpecFile) -> Result<String> {
    toml::to_string(file).map_err(|e| Error::Spec(format!("cannot serialize spec: {e}")))
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

/// Tags an error with the section name and its position.
fn at<T, U>(text: &str, span: &Spanned<U>, section: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| {
        let (line, col) = line_col(text, span.span().start);
        Error::Spec(format!("{line}:{col}: [{section}]: {e}"))
    })
}

fn alphabet(file: &SpecFile, name: &str) -> Result<Alphabet> {
    match file.alphabets.get_ref().get(name) {
        Some(&size) => Alphabet::new(name, size),
        None => Err(Error::UnknownAxis(format!("alphabet `{name}` is not declared"))),
    }
}

fn alphabets(file: &SpecFile, names: &[String]) -> Result<Vec<Alphabet>> {
    names.iter().map(|n| alphabet(file, n)).collect()
}

fn kernel(file: &SpecFile, k: &KernelSpec, extra: &[Alphabet]) -> Result<Kernel> {
    let lookup = |n: &String| match extra.iter().find(|a| a.name() == n) {
        Some(a) => Ok(a.clone()),
        None => alphabet(file, n),
    };
    let inputs = k.inputs.iter().map(lookup).collect::<Result<Vec<_>>>()?;
    let outputs = k.outputs.iter().map(lookup).collect::<Result<Vec<_>>>()?;
    Kernel::new(inputs, outputs, k.probs.clone())
}

fn distortion(file: &SpecFile, table: Option<&DistortionTable>, key: &str, host: &str, embed: &str) -> Result<DistortionMeasure> {
    let (s, x) = (alphabet(file, host)?, alphabet(file, embed)?);
    match table {
        None => Err(Error::Spec(format!("missing `{key}`"))),
        Some(DistortionTable::Named(n)) if n == "hamming" => DistortionMeasure::hamming(&s, &x),
        Some(DistortionTable::Named(n)) => Err(Error::Spec(format!("`{key}`: unknown measure `{n}`"))),
        Some(DistortionTable::Table(t)) => DistortionMeasure::new(s, x, t.clone()),
    }
}

fn required(v: Option<f64>, key: &str) -> Result<f64> {
    v.ok_or_else(|| Error::Spec(format!("missing `{key}`")))
}

fn build_problem(file: &SpecFile, text: &str) -> Result<Problem> {
    let case = file.case.get_ref().as_str();
    let (axes, aux): (&[&str], &[&str]) = if case.starts_with("mac-") {
        (&MAC_AXES, &MAC_AUX)
    } else {
        (&BC_AXES, &BC_AUX)
    };
    at(text, &file.alphabets, "alphabets", (|| {
        for name in file.alphabets.get_ref().keys() {
            if !axes.contains(&name.as_str()) && !aux.contains(&name.as_str()) {
                return Err(Error::UnknownAxis(format!("unexpected alphabet `{name}`")));
            }
        }
        for a in axes {
            alphabet(file, a)?;
        }
        Ok(())
    })())?;
    let host = at(text, &file.host, "host", (|| {
        let h = file.host.get_ref();
        JointPmf::new(alphabets(file, &h.axes)?, h.probs.clone())
    })())?;
    let ch = file.channel.get_ref();
    let dist = file.distortion.get_ref();
    let budget = file.budget.get_ref();
    let mac_case = match case {
        "mac-a" => Some(MacCase::A),
        "mac-b" => Some(MacCase::B),
        "mac-c" => Some(MacCase::C),
        _ => None,
    };
    if let Some(mc) = mac_case {
        let channel = at(text, &file.channel, "channel", (|| {
            if ch.forward.is_some() || ch.degrade.is_some() {
                return Err(Error::Spec("MAC channels take inputs/outputs/probs, not forward/degrade".into()));
            }
            match (&ch.inputs, &ch.outputs, &ch.probs) {
                (Some(i), Some(o), Some(p)) => kernel(
                    file,
                    &KernelSpec {
                        inputs: i.clone(),
                        outputs: o.clone(),
                        probs: p.clone(),
                    },
                    &[],
                ),
                _ => Err(Error::Spec("channel needs `inputs`, `outputs` and `probs`".into())),
            }
        })())?;
        let (d1, d2) = at(text, &file.distortion, "distortion", (|| {
            if dist.d.is_some() {
                return Err(Error::Spec("MAC problems use `d1` and `d2`".into()));
            }
            Ok((
                distortion(file, dist.d1.as_ref(), "d1", "S1", "X1")?,
                distortion(file, dist.d2.as_ref(), "d2", "S2", "X2")?,
            ))
        })())?;
        let (delta1, delta2) = at(text, &file.budget, "budget", (|| {
            if budget.delta.is_some() || budget.relaxed_delta.is_some() {
                return Err(Error::Spec("MAC problems use `delta1` and `delta2`".into()));
            }
            Ok((required(budget.delta1, "delta1")?, required(budget.delta2, "delta2")?))
        })())?;
        let p = at(text, &file.host, "host", MacProblem::new(host, channel, d1, d2, delta1, delta2, mc))?;
        return Ok(Problem::Mac(p));
    }
    let bc_case = match case {
        "bc-a" => BcCase::A,
        "bc-b" => BcCase::B,
        "bc-c" => BcCase::C,
        "bc-d" => BcCase::D,
        other => {
            return at(text, &file.case, "case", Err(Error::Spec(format!("unknown case `{other}`"))));
        }
    };
    let host = at(text, &file.host, "host", (|| {
        if host.axes().len() != 1 || host.axes()[0].name() != "S" {
            return Err(Error::AxisMismatch("broadcast host must have the single axis `S`".into()));
        }
        host.to_pmf()
    })())?;
    let (forward, degrade) = at(text, &file.channel, "channel", (|| {
        if ch.inputs.is_some() || ch.outputs.is_some() || ch.probs.is_some() {
            return Err(Error::Spec("broadcast channels take [channel.forward] and [channel.degrade]".into()));
        }
        match (&ch.forward, &ch.degrade) {
            (Some(f), Some(d)) => Ok((kernel(file, f, &[])?, kernel(file, d, &[])?)),
            _ => Err(Error::Spec("broadcast channels need `forward` and `degrade`".into())),
        }
    })())?;
    let d = at(text, &file.distortion, "distortion", (|| {
        if dist.d1.is_some() || dist.d2.is_some() {
            return Err(Error::Spec("broadcast problems use `d`".into()));
        }
        distortion(file, dist.d.as_ref(), "d", "S", "X")
    })())?;
    let delta = at(text, &file.budget, "budget", (|| {
        if budget.delta1.is_some() || budget.delta2.is_some() || budget.relaxed_delta1.is_some() || budget.relaxed_delta2.is_some() {
            return Err(Error::Spec("broadcast problems use `delta`".into()));
        }
        required(budget.delta, "delta")
    })())?;
    let p = at(text, &file.channel, "channel", BcProblem::new(host, forward, degrade, d, delta, bc_case))?;
    Ok(Problem::Bc(p))
}

fn build_tuple(t: &TupleSpec, file: &SpecFile, problem: &Problem) -> Result<FeasibleTuple> {
    match problem {
        Problem::Mac(p) => {
            if t.enc.is_some() {
                return Err(Error::Spec("MAC tuples use `enc1` and `enc2`".into()));
            }
            let q = match &t.q {
                Some(q) => Pmf::new(Alphabet::new("Q", q.len())?, q.clone())?,
                None => Pmf::uniform(Alphabet::new("Q", 1)?),
            };
            let extra = [q.alphabet().clone()];
            let (e1, e2) = match (&t.enc1, &t.enc2) {
                (Some(a), Some(b)) => (kernel(file, a, &extra)?, kernel(file, b, &extra)?),
                _ => return Err(Error::Spec("MAC tuples need `enc1` and `enc2`".into())),
            };
            let t = MacFeasibleTuple {
                q,
                encoders: MacEncoders::Separate { enc1: e1, enc2: e2 },
            };
            assemble_mac_joint(&t, p)?;
            Ok(FeasibleTuple::Mac(t))
        }
        Problem::Bc(p) => {
            if t.q.is_some() || t.enc1.is_some() || t.enc2.is_some() {
                return Err(Error::Spec("broadcast tuples use `enc` only".into()));
            }
            let enc = t
                .enc
                .as_ref()
                .ok_or_else(|| Error::Spec("broadcast tuples need `enc`".into()))?;
            let t = BcFeasibleTuple {
                enc: kernel(file, enc, &[])?,
            };
            assemble_bc_joint(&t, p)?;
            Ok(FeasibleTuple::Bc(t))
        }
    }
}
