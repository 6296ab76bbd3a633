//! Rate-bound evaluation and rate-region computation.
//!
//! Variable names are fixed by role. MAC instances use `S1, S2` (hosts),
//! `X1, X2` (embedded signals), `Y` (output), `U1, U2` (auxiliaries) and
//! `Q` (time sharing). Broadcast instances use `S, X, Y, Z` and the
//! auxiliaries `U, V, W`.
//!
//! | case | bounds (b1, b2, b12) |
//! |------|----------------------|
//! | MAC A | I(U1;U2,Y\|Q) − I(U1;S1\|Q), I(U2;U1,Y\|Q) − I(U2;S2\|Q), I(U1,U2;Y\|Q) − I(U1,U2;S1,S2\|Q) |
//! | MAC B | I(U1;Y\|X2,S2,Q) − I(U1;S1\|X2,S2,Q), I(X2,S2;Y\|U1,Q) − H(S2\|U1,Q), I(U1,X2,S2;Y\|Q) − H(S2) − I(U1;S1\|X2,S2,Q) |
//! | MAC C | I(X1,S1;Y\|X2,S2,Q) − H(S1\|S2), I(X2,S2;Y\|X1,S1,Q) − H(S2\|S1), I(X1,S1,X2,S2;Y\|Q) − H(S1,S2) |
//! | BC A′ inner | I(V;Y\|U) − I(V;S\|U), I(U;Z) − I(U;S) |
//! | BC A′ outer | I(V;Y\|U,W) − I(V;S\|U,W), I(U;Z) − I(U;S), I(U,V,W;Y) − I(U,V,W;S) |
//! | BC B′ inner | I(X,S;Y\|U) − H(S\|U), I(U;Z) − I(U;S) |
//! | BC B′ outer | I(X,S;Y\|U) − H(S\|U), I(U,V;Z) − I(U,V;S) |
//! | BC C′ / D′ | I(X;Y\|U,S), I(X,S;Z) − H(S) |

mod bounds;
mod hull;
mod search;
pub mod verify;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{
    conditional_entropy, conditional_mutual_information, expected_distortion, Alphabet,
    DistortionMeasure, JointPmf, Kernel, Pmf,
};
use bounds::{filter, BoundExpr, Term};

pub use hull::{RatePoint, COLLINEAR_TOL};
pub use search::{compute_region, AuxSizes, SearchConfig};

/// Slack allowed on distortion budgets when admitting a tuple.
pub const DISTORTION_TOL: f64 = 1e-9;

/// Bounds below `-NEGATIVE_TOL` make a tuple contribute nothing.
pub const NEGATIVE_TOL: f64 = 1e-9;

/// The three MAC scenarios: both encoders irreversible (A), encoder 1
/// irreversible and encoder 2 reversible (B), both reversible (C).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MacCase {
    A,
    B,
    C,
}

/// The four degraded-broadcast scenarios; C and D share one region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BcCase {
    A,
    B,
    C,
    D,
}

impl fmt::Display for MacCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MacCase::A => "mac-a",
            MacCase::B => "mac-b",
            MacCase::C => "mac-c",
        };
        f.write_str(s)
    }
}

impl fmt::Display for BcCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BcCase::A => "bc-a",
            BcCase::B => "bc-b",
            BcCase::C => "bc-c",
            BcCase::D => "bc-d",
        };
        f.write_str(s)
    }
}

/// Which bound to compute. Capacity cases ignore the distinction; MAC A
/// and B only have an inner bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    #[default]
    Inner,
    Outer,
}

fn require_axis(found: &Alphabet, name: &str, size: usize, what: &str) -> Result<()> {
    if found.name() != name || found.size() != size {
        return Err(Error::AxisMismatch(format!(
            "{what}: expected `{name}` of size {size}, found `{}` of size {}",
            found.name(),
            found.size()
        )));
    }
    Ok(())
}

fn axis_named<'a>(axes: &'a [Alphabet], name: &str, what: &str) -> Result<&'a Alphabet> {
    axes.iter()
        .find(|a| a.name() == name)
        .ok_or_else(|| Error::AxisMismatch(format!("{what} has no axis `{name}`")))
}

fn check_budget(delta: f64, what: &str) -> Result<()> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "{what} must be a finite nonnegative number, got {delta}"
        )));
    }
    Ok(())
}

fn same_names(axes: &[Alphabet], names: &[&str]) -> bool {
    axes.len() == names.len() && names.iter().all(|n| axes.iter().any(|a| a.name() == *n))
}

/// A two-user MAC embedding instance.
#[derive(Clone, Debug, PartialEq)]
pub struct MacProblem {
    host: JointPmf,
    channel: Kernel,
    d1: DistortionMeasure,
    d2: DistortionMeasure,
    delta1: f64,
    delta2: f64,
    case: MacCase,
}

impl MacProblem {
    /// `host` is over `S1, S2` (either order); `channel` maps
    /// `X1, S1, X2, S2` (any order) to `Y`.
    pub fn new(
        host: JointPmf,
        channel: Kernel,
        d1: DistortionMeasure,
        d2: DistortionMeasure,
        delta1: f64,
        delta2: f64,
        case: MacCase,
    ) -> Result<Self> {
        if !same_names(host.axes(), &["S1", "S2"]) {
            return Err(Error::AxisMismatch("host must be a joint over `S1`, `S2`".into()));
        }
        let host = host.permuted(&["S1", "S2"])?;
        if !same_names(channel.inputs(), &["X1", "S1", "X2", "S2"]) {
            return Err(Error::AxisMismatch(
                "channel inputs must be `X1`, `S1`, `X2`, `S2`".into(),
            ));
        }
        if channel.outputs().len() != 1 || channel.outputs()[0].name() != "Y" {
            return Err(Error::AxisMismatch("channel must have the single output `Y`".into()));
        }
        let s1 = host.axes()[0].size();
        let s2 = host.axes()[1].size();
        let ins = channel.inputs();
        require_axis(axis_named(ins, "S1", "channel")?, "S1", s1, "channel input")?;
        require_axis(axis_named(ins, "S2", "channel")?, "S2", s2, "channel input")?;
        let x1 = axis_named(ins, "X1", "channel")?.size();
        let x2 = axis_named(ins, "X2", "channel")?.size();
        require_axis(d1.host(), "S1", s1, "distortion 1 host")?;
        require_axis(d1.embed(), "X1", x1, "distortion 1 embed")?;
        require_axis(d2.host(), "S2", s2, "distortion 2 host")?;
        require_axis(d2.embed(), "X2", x2, "distortion 2 embed")?;
        check_budget(delta1, "delta1")?;
        check_budget(delta2, "delta2")?;
        Ok(MacProblem {
            host,
            channel,
            d1,
            d2,
            delta1,
            delta2,
            case,
        })
    }

    pub fn host(&self) -> &JointPmf {
        &self.host
    }
    pub fn channel(&self) -> &Kernel {
        &self.channel
    }
    pub fn d1(&self) -> &DistortionMeasure {
        &self.d1
    }
    pub fn d2(&self) -> &DistortionMeasure {
        &self.d2
    }
    pub fn delta1(&self) -> f64 {
        self.delta1
    }
    pub fn delta2(&self) -> f64 {
        self.delta2
    }
    pub fn case(&self) -> MacCase {
        self.case
    }

    pub fn alphabet(&self, name: &str) -> Result<Alphabet> {
        match name {
            "S1" | "S2" => Ok(self.host.axis(name)?.clone()),
            "X1" | "X2" => Ok(axis_named(self.channel.inputs(), name, "channel")?.clone()),
            "Y" => Ok(self.channel.outputs()[0].clone()),
            _ => Err(Error::UnknownAxis(name.to_string())),
        }
    }

    /// Same instance, different case tag.
    pub fn with_case(&self, case: MacCase) -> Self {
        MacProblem {
            case,
            ..self.clone()
        }
    }

    /// Same instance, different budgets.
    pub fn with_budgets(&self, delta1: f64, delta2: f64) -> Result<Self> {
        check_budget(delta1, "delta1")?;
        check_budget(delta2, "delta2")?;
        Ok(MacProblem {
            delta1,
            delta2,
            ..self.clone()
        })
    }
}

/// A degraded broadcast embedding instance `S → (X) → Y → Z`.
#[derive(Clone, Debug, PartialEq)]
pub struct BcProblem {
    host: Pmf,
    forward: Kernel,
    degrade: Kernel,
    d: DistortionMeasure,
    delta: f64,
    case: BcCase,
}

impl BcProblem {
    pub fn new(
        host: Pmf,
        forward: Kernel,
        degrade: Kernel,
        d: DistortionMeasure,
        delta: f64,
        case: BcCase,
    ) -> Result<Self> {
        if host.alphabet().name() != "S" {
            return Err(Error::AxisMismatch("host must be a pmf over `S`".into()));
        }
        let s = host.alphabet().size();
        if !same_names(forward.inputs(), &["X", "S"]) {
            return Err(Error::AxisMismatch("forward channel inputs must be `X`, `S`".into()));
        }
        if forward.outputs().len() != 1 || forward.outputs()[0].name() != "Y" {
            return Err(Error::AxisMismatch("forward channel must output `Y`".into()));
        }
        require_axis(axis_named(forward.inputs(), "S", "forward channel")?, "S", s, "forward input")?;
        let x = axis_named(forward.inputs(), "X", "forward channel")?.size();
        let y = forward.outputs()[0].size();
        if degrade.inputs().len() != 1 {
            return Err(Error::AxisMismatch("degrading channel must take `Y` only".into()));
        }
        require_axis(&degrade.inputs()[0], "Y", y, "degrading channel input")?;
        if degrade.outputs().len() != 1 || degrade.outputs()[0].name() != "Z" {
            return Err(Error::AxisMismatch("degrading channel must output `Z`".into()));
        }
        require_axis(d.host(), "S", s, "distortion host")?;
        require_axis(d.embed(), "X", x, "distortion embed")?;
        check_budget(delta, "delta")?;
        Ok(BcProblem {
            host,
            forward,
            degrade,
            d,
            delta,
            case,
        })
    }

    pub fn host(&self) -> &Pmf {
        &self.host
    }
    pub fn forward(&self) -> &Kernel {
        &self.forward
    }
    pub fn degrade(&self) -> &Kernel {
        &self.degrade
    }
    pub fn d(&self) -> &DistortionMeasure {
        &self.d
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn case(&self) -> BcCase {
        self.case
    }

    pub fn alphabet(&self, name: &str) -> Result<Alphabet> {
        match name {
            "S" => Ok(self.host.alphabet().clone()),
            "X" => Ok(axis_named(self.forward.inputs(), "X", "forward channel")?.clone()),
            "Y" => Ok(self.forward.outputs()[0].clone()),
            "Z" => Ok(self.degrade.outputs()[0].clone()),
            _ => Err(Error::UnknownAxis(name.to_string())),
        }
    }

    pub fn with_case(&self, case: BcCase) -> Self {
        BcProblem {
            case,
            ..self.clone()
        }
    }

    pub fn with_budget(&self, delta: f64) -> Result<Self> {
        check_budget(delta, "delta")?;
        Ok(BcProblem {
            delta,
            ..self.clone()
        })
    }
}

/// Either kind of instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Problem {
    Mac(MacProblem),
    Bc(BcProblem),
}

/// Encoders of a MAC tuple: separate `p(u_i, x_i | s_i, q)` or one joint
/// `p(x1, x2 | s1, s2, q)`.
#[derive(Clone, Debug, PartialEq)]
pub enum MacEncoders {
    Separate { enc1: Kernel, enc2: Kernel },
    Joint { enc: Kernel },
}

/// A MAC operating point: time-sharing pmf over `Q` plus encoders.
///
/// Encoder kernels take `S1` (resp. `S2`) and optionally `Q` as inputs
/// and produce `X1` (resp. `X2`), optionally together with `U1` (`U2`).
#[derive(Clone, Debug, PartialEq)]
pub struct MacFeasibleTuple {
    pub q: Pmf,
    pub encoders: MacEncoders,
}

impl MacFeasibleTuple {
    /// A tuple without time sharing (`|Q| = 1`).
    pub fn separate(enc1: Kernel, enc2: Kernel) -> Self {
        MacFeasibleTuple {
            q: trivial_q(),
            encoders: MacEncoders::Separate { enc1, enc2 },
        }
    }

    pub fn joint(enc: Kernel) -> Self {
        MacFeasibleTuple {
            q: trivial_q(),
            encoders: MacEncoders::Joint { enc },
        }
    }
}

pub(crate) fn trivial_q() -> Pmf {
    Pmf::uniform(Alphabet::new("Q", 1).expect("valid"))
}

/// A broadcast operating point: `p(aux…, x | s)` with auxiliaries among
/// `U, V, W`.
#[derive(Clone, Debug, PartialEq)]
pub struct BcFeasibleTuple {
    pub enc: Kernel,
}

/// Either kind of tuple.
#[derive(Clone, Debug, PartialEq)]
pub enum FeasibleTuple {
    Mac(MacFeasibleTuple),
    Bc(BcFeasibleTuple),
}

/// Rate bounds of one tuple. Two-user broadcast inner bounds have no sum
/// bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub b1: f64,
    pub b2: f64,
    pub b12: Option<f64>,
}

impl Bounds {
    pub(crate) fn from_values(v: &[f64]) -> Bounds {
        Bounds {
            b1: v[0],
            b2: v[1],
            b12: v.get(2).copied(),
        }
    }

    /// Vertices of `{r ≥ 0 : r1 ≤ b1, r2 ≤ b2, r1 + r2 ≤ b12}`, or `None`
    /// when some bound is negative (no rate pair, not even the origin).
    pub fn polytope(&self) -> Option<Vec<RatePoint>> {
        let c = self.b12.unwrap_or(f64::INFINITY);
        if self.b1 < -NEGATIVE_TOL || self.b2 < -NEGATIVE_TOL || c < -NEGATIVE_TOL {
            return None;
        }
        // values within the tolerance of zero are zero; stray 1e-16s would
        // otherwise show up as distinct hull vertices
        let snap = |v: f64| if v <= NEGATIVE_TOL { 0.0 } else { v };
        let (b1, b2, c) = (snap(self.b1), snap(self.b2), snap(c));
        let a1 = b1.min(c);
        let a2 = b2.min(c);
        Some(vec![
            RatePoint::new(0.0, 0.0),
            RatePoint::new(a1, 0.0),
            RatePoint::new(a1, b2.min(c - a1).max(0.0)),
            RatePoint::new(b1.min(c - a2).max(0.0), a2),
            RatePoint::new(0.0, a2),
        ])
    }

    /// Largest `λ·r1 + (1−λ)·r2` over the polytope (−∞ when empty).
    pub fn support(&self, lambda: f64) -> f64 {
        match self.polytope() {
            Some(v) => hull::support(&v, lambda),
            None => f64::NEG_INFINITY,
        }
    }
}

fn eval_exprs(joint: &JointPmf, exprs: &[BoundExpr]) -> Result<Bounds> {
    let present = |v: &str| joint.has_axis(v);
    let mut out = Vec::with_capacity(exprs.len());
    for expr in exprs {
        let mut total = 0.0;
        for (sign, term) in expr.iter() {
            let value = match *term {
                Term::Mi(a, b, c) => conditional_mutual_information(
                    joint,
                    &filter(a, &present),
                    &filter(b, &present),
                    &filter(c, &present),
                )?,
                Term::Ent(a, c) => {
                    conditional_entropy(joint, &filter(a, &present), &filter(c, &present))?
                }
            };
            total += sign * value;
        }
        out.push(total);
    }
    Ok(Bounds::from_values(&out))
}

fn check_kernel_names(
    k: &Kernel,
    allowed_inputs: &[&str],
    required_inputs: &[&str],
    allowed_outputs: &[&str],
    required_outputs: &[&str],
    what: &str,
) -> Result<()> {
    for a in k.inputs() {
        if !allowed_inputs.contains(&a.name()) {
            return Err(Error::AxisMismatch(format!(
                "{what}: unexpected input `{}`",
                a.name()
            )));
        }
    }
    for a in k.outputs() {
        if !allowed_outputs.contains(&a.name()) {
            return Err(Error::AxisMismatch(format!(
                "{what}: unexpected output `{}`",
                a.name()
            )));
        }
    }
    for r in required_inputs {
        if !k.inputs().iter().any(|a| a.name() == *r) {
            return Err(Error::AxisMismatch(format!("{what}: missing input `{r}`")));
        }
    }
    for r in required_outputs {
        if !k.outputs().iter().any(|a| a.name() == *r) {
            return Err(Error::AxisMismatch(format!("{what}: missing output `{r}`")));
        }
    }
    Ok(())
}

fn check_size(k: &Kernel, name: &str, size: usize, what: &str) -> Result<()> {
    if let Some(a) = k.inputs().iter().chain(k.outputs()).find(|a| a.name() == name) {
        if a.size() != size {
            return Err(Error::AxisMismatch(format!(
                "{what}: `{name}` has size {}, expected {size}",
                a.size()
            )));
        }
    }
    Ok(())
}

/// Full joint of `(Q, S1, S2, [U1], X1, [U2], X2, Y)` induced by a MAC
/// tuple. Errors when the encoders do not fit the problem's alphabets.
pub fn assemble_mac_joint(tuple: &MacFeasibleTuple, problem: &MacProblem) -> Result<JointPmf> {
    if tuple.q.alphabet().name() != "Q" {
        return Err(Error::AxisMismatch("time-sharing pmf must be over `Q`".into()));
    }
    let mut joint = JointPmf::independent(&JointPmf::from_pmf(&tuple.q), problem.host())?;
    let sizes = [
        ("S1", problem.alphabet("S1")?.size()),
        ("S2", problem.alphabet("S2")?.size()),
        ("X1", problem.alphabet("X1")?.size()),
        ("X2", problem.alphabet("X2")?.size()),
        ("Q", tuple.q.alphabet().size()),
    ];
    let check_sizes = |k: &Kernel, what: &str| -> Result<()> {
        for (n, s) in sizes {
            check_size(k, n, s, what)?;
        }
        Ok(())
    };
    match &tuple.encoders {
        MacEncoders::Separate { enc1, enc2 } => {
            check_kernel_names(enc1, &["S1", "Q"], &["S1"], &["U1", "X1"], &["X1"], "encoder 1")?;
            check_kernel_names(enc2, &["S2", "Q"], &["S2"], &["U2", "X2"], &["X2"], "encoder 2")?;
            check_sizes(enc1, "encoder 1")?;
            check_sizes(enc2, "encoder 2")?;
            joint = joint.chain(enc1)?.chain(enc2)?;
        }
        MacEncoders::Joint { enc } => {
            check_kernel_names(
                enc,
                &["S1", "S2", "Q"],
                &["S1", "S2"],
                &["X1", "X2"],
                &["X1", "X2"],
                "joint encoder",
            )?;
            check_sizes(enc, "joint encoder")?;
            joint = joint.chain(enc)?;
        }
    }
    joint.chain(problem.channel())
}

/// Full joint of `(S, aux…, X, Y, Z)` induced by a broadcast tuple.
pub fn assemble_bc_joint(tuple: &BcFeasibleTuple, problem: &BcProblem) -> Result<JointPmf> {
    let enc = &tuple.enc;
    check_kernel_names(enc, &["S"], &["S"], &["U", "V", "W", "X"], &["X"], "encoder")?;
    check_size(enc, "S", problem.alphabet("S")?.size(), "encoder")?;
    check_size(enc, "X", problem.alphabet("X")?.size(), "encoder")?;
    JointPmf::from_pmf(problem.host())
        .chain(enc)?
        .chain(problem.forward())?
        .chain(problem.degrade())
}

fn check_mac_distortion(joint: &JointPmf, problem: &MacProblem) -> Result<()> {
    let e1 = expected_distortion(joint, problem.d1())?;
    let e2 = expected_distortion(joint, problem.d2())?;
    if e1 > problem.delta1() + DISTORTION_TOL {
        return Err(Error::InfeasibleTuple(format!(
            "encoder 1 distortion {e1} exceeds {}",
            problem.delta1()
        )));
    }
    if e2 > problem.delta2() + DISTORTION_TOL {
        return Err(Error::InfeasibleTuple(format!(
            "encoder 2 distortion {e2} exceeds {}",
            problem.delta2()
        )));
    }
    Ok(())
}

fn mac_separate_joint(tuple: &MacFeasibleTuple, problem: &MacProblem, need_u: &[&str]) -> Result<JointPmf> {
    if !matches!(tuple.encoders, MacEncoders::Separate { .. }) {
        return Err(Error::InvalidParameter(
            "this bound needs separate encoders".into(),
        ));
    }
    let joint = assemble_mac_joint(tuple, problem)?;
    for u in need_u {
        if !joint.has_axis(u) {
            return Err(Error::AxisMismatch(format!("tuple has no auxiliary `{u}`")));
        }
    }
    check_mac_distortion(&joint, problem)?;
    Ok(joint)
}

/// MAC case A bounds; both encoders must produce their auxiliaries.
pub fn eval_mac_case_a(tuple: &MacFeasibleTuple, problem: &MacProblem) -> Result<Bounds> {
    let joint = mac_separate_joint(tuple, problem, &["U1", "U2"])?;
    eval_exprs(&joint, &bounds::MAC_A)
}

/// MAC case B bounds. Encoder 2's auxiliary is `(X2, S2)` by
/// construction, so any `U2` output of encoder 2 is ignored.
pub fn eval_mac_case_b(tuple: &MacFeasibleTuple, problem: &MacProblem) -> Result<Bounds> {
    let joint = mac_separate_joint(tuple, problem, &["U1"])?;
    eval_exprs(&joint, &bounds::MAC_B)
}

/// MAC case C bounds; accepts separate (inner) or joint (outer) encoders.
/// Auxiliary outputs, if any, are ignored.
pub fn eval_mac_case_c(tuple: &MacFeasibleTuple, problem: &MacProblem) -> Result<Bounds> {
    let joint = assemble_mac_joint(tuple, problem)?;
    check_mac_distortion(&joint, problem)?;
    eval_exprs(&joint, &bounds::MAC_C)
}

fn bc_joint(tuple: &BcFeasibleTuple, problem: &BcProblem, need: &[&str]) -> Result<JointPmf> {
    let joint = assemble_bc_joint(tuple, problem)?;
    for u in need {
        if !joint.has_axis(u) {
            return Err(Error::AxisMismatch(format!("tuple has no auxiliary `{u}`")));
        }
    }
    let e = expected_distortion(&joint, problem.d())?;
    if e > problem.delta() + DISTORTION_TOL {
        return Err(Error::InfeasibleTuple(format!(
            "distortion {e} exceeds {}",
            problem.delta()
        )));
    }
    Ok(joint)
}

pub fn eval_bc_case_a_inner(tuple: &BcFeasibleTuple, problem: &BcProblem) -> Result<Bounds> {
    eval_exprs(&bc_joint(tuple, problem, &["U", "V"])?, &bounds::BC_A_INNER)
}

pub fn eval_bc_case_a_outer(tuple: &BcFeasibleTuple, problem: &BcProblem) -> Result<Bounds> {
    eval_exprs(&bc_joint(tuple, problem, &["U", "V", "W"])?, &bounds::BC_A_OUTER)
}

pub fn eval_bc_case_b_inner(tuple: &BcFeasibleTuple, problem: &BcProblem) -> Result<Bounds> {
    eval_exprs(&bc_joint(tuple, problem, &["U"])?, &bounds::BC_B_INNER)
}

pub fn eval_bc_case_b_outer(tuple: &BcFeasibleTuple, problem: &BcProblem) -> Result<Bounds> {
    eval_exprs(&bc_joint(tuple, problem, &["U", "V"])?, &bounds::BC_B_OUTER)
}

/// Case C′ (and D′) bounds.
pub fn eval_bc_case_c(tuple: &BcFeasibleTuple, problem: &BcProblem) -> Result<Bounds> {
    eval_exprs(&bc_joint(tuple, problem, &["U"])?, &bounds::BC_C)
}

/// Dispatches to the evaluator matching the problem's case and `kind`.
pub fn eval_tuple(problem: &Problem, kind: BoundKind, tuple: &FeasibleTuple) -> Result<Bounds> {
    match (problem, tuple) {
        (Problem::Mac(p), FeasibleTuple::Mac(t)) => match (p.case(), kind) {
            (MacCase::A, BoundKind::Inner) => eval_mac_case_a(t, p),
            (MacCase::B, BoundKind::Inner) => eval_mac_case_b(t, p),
            (MacCase::C, _) => eval_mac_case_c(t, p),
            (c, BoundKind::Outer) => Err(Error::InvalidParameter(format!(
                "{c} has only an inner bound"
            ))),
        },
        (Problem::Bc(p), FeasibleTuple::Bc(t)) => match (p.case(), kind) {
            (BcCase::A, BoundKind::Inner) => eval_bc_case_a_inner(t, p),
            (BcCase::A, BoundKind::Outer) => eval_bc_case_a_outer(t, p),
            (BcCase::B, BoundKind::Inner) => eval_bc_case_b_inner(t, p),
            (BcCase::B, BoundKind::Outer) => eval_bc_case_b_outer(t, p),
            (BcCase::C | BcCase::D, _) => eval_bc_case_c(t, p),
        },
        _ => Err(Error::InvalidParameter(
            "tuple kind does not match the problem".into(),
        )),
    }
}

/// A tuple attaining a hull vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: RatePoint,
    pub bounds: Bounds,
    pub tuple: FeasibleTuple,
}

/// A convex region of achievable (or outer-bounding) rate pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct RateRegion {
    /// Counterclockwise from the origin; empty when `empty` is set.
    pub vertices: Vec<RatePoint>,
    /// `(λ, max λ·r1 + (1−λ)·r2)` at the configured sample angles.
    pub support_samples: Vec<(f64, f64)>,
    /// No searched tuple admits any rate pair, not even `(0, 0)`.
    pub empty: bool,
    /// One witness per vertex, aligned with `vertices`.
    pub witnesses: Vec<Witness>,
}

impl RateRegion {
    /// True when `(0, 0)` was certified by some tuple.
    pub fn zero_rate_achievable(&self) -> bool {
        !self.empty
    }
}

/// `max over region of λ·r1 + (1−λ)·r2`.
pub fn support_function(region: &RateRegion, lambda: f64) -> Result<f64> {
    if region.empty || region.vertices.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda {lambda} outside [0, 1]")));
    }
    Ok(hull::support(&region.vertices, lambda))
}

/// Half-plane membership test with tolerance `tol`.
pub fn contains(region: &RateRegion, point: RatePoint, tol: f64) -> bool {
    if region.empty {
        return false;
    }
    hull::outside_distance(&region.vertices, &point) <= tol
}

/// How far `point` lies outside the region (∞ for an empty region).
pub fn distance_outside(region: &RateRegion, point: RatePoint) -> f64 {
    if region.empty {
        return f64::INFINITY;
    }
    hull::outside_distance(&region.vertices, &point)
}

/// Fixed six-decimal rendering used in CSV output (never `-0.000000`).
pub fn format_rate(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// CSV with header `kind,lambda,r1,r2`: hull vertices counterclockwise from
/// the origin (empty `lambda`), then one `support` row per sample angle
/// giving the first vertex attaining the maximum. An empty region prints
/// the lone vertex `0,0` and no support rows; whether the origin is really
/// achievable is carried by [`RateRegion::zero_rate_achievable`].
pub fn region_csv(region: &RateRegion) -> String {
    let mut out = String::from("kind,lambda,r1,r2\n");
    if region.empty {
        out.push_str("vertex,,0.000000,0.000000\n");
        return out;
    }
    for v in &region.vertices {
        out.push_str(&format!("vertex,,{},{}\n", format_rate(v.r1), format_rate(v.r2)));
    }
    for &(l, value) in &region.support_samples {
        let arg = region
            .vertices
            .iter()
            .find(|v| v.weighted(l) >= value)
            .copied()
            .unwrap_or(RatePoint::new(0.0, 0.0));
        out.push_str(&format!(
            "support,{},{},{}\n",
            format_rate(l),
            format_rate(arg.r1),
            format_rate(arg.r2)
        ));
    }
    out
}
