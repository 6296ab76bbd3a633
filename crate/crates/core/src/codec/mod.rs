//! Random-coding schemes run end to end.
//!
//! Three schemes are implemented:
//!
//! | scheme  | problem          | codebook                         |
//! |---------|------------------|----------------------------------|
//! | `mac-c` | MAC, case C      | [`MacCodebook`]                  |
//! | `bc-b`  | broadcast, B′    | [`BcBinnedCodebook`]             |
//! | `bc-c`  | broadcast, C′/D′ | [`BcSuperpositionCodebook`]      |
//!
//! Codewords are pure functions of `(seed, role, indices, host sequence)`
//! (see [`crate::rng`]), so a codebook is fixed by its seed while each
//! trial draws hosts, messages and noise from its own keyed stream. A
//! [`SimReport`] is therefore independent of the worker count.
//!
//! Decoders enumerate every candidate host sequence and refuse to run when
//! that enumeration exceeds [`SimConfig::decode_budget`].

mod bc;
mod mac;

pub use bc::{
    bc_case_b_decode1, bc_case_b_decode2, bc_case_b_encode, bc_case_c_decode1,
    bc_case_c_decode2, bc_case_c_encode, BcBinnedCodebook, BcDecoderB, BcDecoderC,
    BcSuperpositionCodebook, BinnedDecoded, BinnedEncoding, SuperpositionDecoded,
};
pub use mac::{mac_case_c_decode, mac_case_c_encode, MacCodebook, MacDecoded, MacDecoder};

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{strides, Alphabet, JointPmf, Kernel};
use crate::regions::{BcCase, FeasibleTuple, MacCase, Problem};
use crate::rng::CondSampler;
use crate::typicality::{Sequence, TypicalityTest};

/// Default cap on host-candidate enumerations per decode.
pub const DEFAULT_DECODE_BUDGET: u128 = 1 << 20;

/// Cap on materialized codebook entries (symbols), to keep memory bounded.
pub const MAX_CODEBOOK_SYMBOLS: u128 = 1 << 26;

/// Monte Carlo parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub r1: f64,
    pub r2: f64,
    pub eps: f64,
    pub eps1: f64,
    pub trials: usize,
    pub seed: u64,
    pub decode_budget: u128,
}

impl SimConfig {
    /// Defaults: `eps = 0.1`, `eps1 = 0.05`, 100 trials, seed 0.
    pub fn new(n: usize, r1: f64, r2: f64) -> Self {
        SimConfig {
            n,
            r1,
            r2,
            eps: 0.1,
            eps1: 0.05,
            trials: 100,
            seed: 0,
            decode_budget: DEFAULT_DECODE_BUDGET,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_eps(mut self, eps: f64, eps1: f64) -> Self {
        self.eps = eps;
        self.eps1 = eps1;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("blocklength n must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if !(self.eps1 > 0.0 && self.eps1 < self.eps && self.eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < eps1 < eps, got eps = {}, eps1 = {}",
                self.eps, self.eps1
            )));
        }
        for (name, r) in [("r1", self.r1), ("r2", self.r2)] {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {r} is not a rate")));
            }
        }
        Ok(())
    }

    /// `(M1, M2) = (⌈2^{n·r1}⌉, ⌈2^{n·r2}⌉)`.
    pub fn message_counts(&self) -> Result<(usize, usize)> {
        Ok((message_count(self.n, self.r1)?, message_count(self.n, self.r2)?))
    }
}

/// `⌈2^{n·r}⌉`, with a relative slack so that e.g. `10 · 0.3` does not
/// round up past 8.
pub fn message_count(n: usize, r: f64) -> Result<usize> {
    let e = n as f64 * r;
    if e > 40.0 {
        return Err(Error::BudgetExceeded {
            what: "message set".into(),
            needed: u128::MAX,
            budget: 1 << 40,
        });
    }
    let m = 2f64.powf(e);
    Ok(((m * (1.0 - 1e-12)).ceil() as usize).max(1))
}

/// Which achievability scheme to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "mac-c")]
    MacC,
    #[serde(rename = "bc-b")]
    BcB,
    #[serde(rename = "bc-c")]
    BcC,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::MacC => "mac-c",
            Scheme::BcB => "bc-b",
            Scheme::BcC => "bc-c",
        })
    }
}

impl Scheme {
    /// The scheme proving achievability for the problem's case, if any.
    pub fn for_problem(problem: &Problem) -> Result<Scheme> {
        match problem {
            Problem::Mac(p) if p.case() == MacCase::C => Ok(Scheme::MacC),
            Problem::Bc(p) if p.case() == BcCase::B => Ok(Scheme::BcB),
            Problem::Bc(p) if matches!(p.case(), BcCase::C | BcCase::D) => Ok(Scheme::BcC),
            Problem::Mac(p) => Err(Error::InvalidParameter(format!(
                "no simulator for {}; only mac-c is simulated",
                p.case()
            ))),
            Problem::Bc(p) => Err(Error::InvalidParameter(format!(
                "no simulator for {}; only bc-b, bc-c and bc-d are simulated",
                p.case()
            ))),
        }
    }
}

/// Outcome of a uniqueness search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoded<T> {
    Unique(T),
    NoCandidate,
    Ambiguous,
}

impl<T> Decoded<T> {
    pub fn unique(self) -> Option<T> {
        match self {
            Decoded::Unique(t) => Some(t),
            _ => None,
        }
    }

    fn from_matches(mut found: Vec<T>) -> Self {
        match found.len() {
            0 => Decoded::NoCandidate,
            1 => Decoded::Unique(found.pop().expect("one match")),
            _ => Decoded::Ambiguous,
        }
    }
}

/// Why a trial failed; the first failing stage decides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorEvent {
    /// The encoder found no admissible auxiliary sequence.
    EncodingFailure,
    /// No candidate passed the typicality test.
    NoCandidate,
    /// More than one candidate passed.
    Ambiguity,
    /// A unique candidate with the wrong messages.
    MessageError,
    /// Right messages, wrong host sequence.
    HostError,
}

/// Error counts per event class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBreakdown {
    pub encoding_failure: usize,
    pub no_candidate: usize,
    pub ambiguity: usize,
    pub message_error: usize,
    pub host_error: usize,
}

impl ErrorBreakdown {
    pub fn total(&self) -> usize {
        self.encoding_failure + self.no_candidate + self.ambiguity + self.message_error + self.host_error
    }

    fn record(&mut self, e: ErrorEvent) {
        match e {
            ErrorEvent::EncodingFailure => self.encoding_failure += 1,
            ErrorEvent::NoCandidate => self.no_candidate += 1,
            ErrorEvent::Ambiguity => self.ambiguity += 1,
            ErrorEvent::MessageError => self.message_error += 1,
            ErrorEvent::HostError => self.host_error += 1,
        }
    }
}

/// Monte Carlo results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub scheme: Scheme,
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
    pub trials_run: usize,
    pub errors: usize,
    pub empirical_error: f64,
    pub error_breakdown: ErrorBreakdown,
    /// Mean per-letter distortion, one entry per encoder.
    pub avg_distortion: Vec<f64>,
    /// `E d` under the tuple, one entry per encoder.
    pub expected_distortion: Vec<f64>,
    /// Trials whose encoder input/output pair was jointly typical yet had
    /// per-letter distortion above `E d + eps · d_max` (always 0).
    pub distortion_bound_violations: usize,
}

/// Per-trial result before reduction.
#[derive(Clone, Debug)]
pub(crate) struct TrialOutcome {
    pub event: Option<ErrorEvent>,
    pub distortion: Vec<f64>,
    pub bound_violations: usize,
}

/// Runs `cfg.trials` episodes of the scheme matching `problem`.
pub fn simulate(
    problem: &Problem,
    scheme: Scheme,
    tuple: &FeasibleTuple,
    cfg: &SimConfig,
) -> Result<SimReport> {
    cfg.validate()?;
    let expected = Scheme::for_problem(problem)?;
    if scheme != expected {
        return Err(Error::InvalidParameter(format!(
            "scheme {scheme} does not match the problem (expected {expected})"
        )));
    }
    let (m1, m2) = cfg.message_counts()?;
    let (run, expected_distortion): (Box<dyn Fn(usize) -> TrialOutcome + Sync>, Vec<f64>) =
        match (problem, tuple) {
            (Problem::Mac(p), FeasibleTuple::Mac(t)) => {
                let cb = MacCodebook::new(p, t, cfg.n, m1, m2, cfg.seed)?;
                let dec = MacDecoder::new(&cb, cfg.eps, cfg.eps1, cfg.decode_budget)?;
                let e = cb.expected_distortion().to_vec();
                let runner = mac::TrialRunner::new(p, cb, dec, cfg)?;
                (Box::new(move |t| runner.run(t)), e)
            }
            (Problem::Bc(p), FeasibleTuple::Bc(t)) if scheme == Scheme::BcB => {
                let cb = BcBinnedCodebook::new(p, t, cfg.n, m1, m2, cfg.eps, cfg.seed)?;
                let dec = BcDecoderB::new(&cb, cfg.eps, cfg.decode_budget)?;
                let e = vec![cb.expected_distortion()];
                let runner = bc::BinnedRunner::new(p, cb, dec, cfg)?;
                (Box::new(move |t| runner.run(t)), e)
            }
            (Problem::Bc(p), FeasibleTuple::Bc(t)) => {
                let cb = BcSuperpositionCodebook::new(p, t, cfg.n, m1, m2, cfg.seed)?;
                let dec = BcDecoderC::new(&cb, cfg.eps, cfg.eps1, cfg.decode_budget)?;
                let e = vec![cb.expected_distortion()];
                let runner = bc::SuperpositionRunner::new(p, cb, dec, cfg)?;
                (Box::new(move |t| runner.run(t)), e)
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "tuple kind does not match the problem kind".into(),
                ))
            }
        };
    // collect keeps trial order, so the reduction below is scheduling-free
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials).into_par_iter().map(&*run).collect();
    let mut breakdown = ErrorBreakdown::default();
    let mut dist = vec![0.0; expected_distortion.len()];
    let mut violations = 0;
    for o in &outcomes {
        if let Some(e) = o.event {
            breakdown.record(e);
        }
        for (acc, d) in dist.iter_mut().zip(&o.distortion) {
            *acc += d;
        }
        violations += o.bound_violations;
    }
    let trials = outcomes.len();
    let errors = breakdown.total();
    Ok(SimReport {
        scheme,
        n: cfg.n,
        m1,
        m2,
        trials_run: trials,
        errors,
        empirical_error: errors as f64 / trials as f64,
        error_breakdown: breakdown,
        avg_distortion: dist.into_iter().map(|d| d / trials as f64).collect(),
        expected_distortion,
        distortion_bound_violations: violations,
    })
}

/// Draws an output sequence letter by letter from `kernel`, with one input
/// sequence per kernel input axis (same order, names and sizes).
pub fn sample_channel<R: Rng>(kernel: &Kernel, inputs: &[&Sequence], rng: &mut R) -> Result<Sequence> {
    if inputs.len() != kernel.inputs().len() {
        return Err(Error::AxisMismatch(format!(
            "kernel takes {} inputs, got {}",
            kernel.inputs().len(),
            inputs.len()
        )));
    }
    for (seq, axis) in inputs.iter().zip(kernel.inputs()) {
        if seq.alphabet() != axis {
            return Err(Error::AxisMismatch(format!(
                "input sequence over `{}` does not match kernel axis `{}`",
                seq.alphabet().name(),
                axis.name()
            )));
        }
    }
    let n = inputs.first().map_or(0, |s| s.n());
    if let Some(s) = inputs.iter().find(|s| s.n() != n) {
        return Err(Error::LengthMismatch(n, s.n()));
    }
    let out_alphabet = match kernel.outputs() {
        [a] => a.clone(),
        many => Alphabet::new(
            many.iter().map(Alphabet::name).collect::<Vec<_>>().join(","),
            kernel.out_size(),
        )?,
    };
    let sampler = KernelSampler::new(kernel, &[])?;
    let cols: Vec<&[usize]> = inputs.iter().map(|s| s.symbols()).collect();
    let out = if kernel.inputs().is_empty() {
        (0..n).map(|_| sampler.sampler.sample(0, rng)).collect()
    } else {
        sampler.sample_cols(&cols, rng)
    };
    Sequence::new(out_alphabet, out)
}

/// A kernel compiled for sampling, with its inputs bound to caller slots.
#[derive(Clone, Debug)]
pub(crate) struct KernelSampler {
    sampler: CondSampler,
    strides: Vec<usize>,
    /// kernel input position → caller slot
    slots: Vec<usize>,
}

impl KernelSampler {
    /// `slot_names[i]` names the sequence the caller passes in slot `i`;
    /// an empty list binds kernel inputs to slots in kernel order.
    pub fn new(kernel: &Kernel, slot_names: &[&str]) -> Result<Self> {
        let slots = if slot_names.is_empty() {
            (0..kernel.inputs().len()).collect()
        } else {
            kernel
                .inputs()
                .iter()
                .map(|a| {
                    slot_names.iter().position(|s| *s == a.name()).ok_or_else(|| {
                        Error::AxisMismatch(format!("no sequence for kernel input `{}`", a.name()))
                    })
                })
                .collect::<Result<Vec<_>>>()?
        };
        let sizes: Vec<usize> = kernel.inputs().iter().map(Alphabet::size).collect();
        let rows = (0..kernel.in_size()).map(|r| kernel.row(r).to_vec()).collect();
        Ok(KernelSampler {
            sampler: CondSampler::new(rows),
            strides: strides(&sizes),
            slots,
        })
    }

    pub fn sample_cols<R: Rng>(&self, cols: &[&[usize]], rng: &mut R) -> Vec<usize> {
        let n = cols.first().map_or(0, |c| c.len());
        (0..n)
            .map(|j| {
                let row: usize = self
                    .slots
                    .iter()
                    .zip(&self.strides)
                    .map(|(&s, w)| cols[s][j] * w)
                    .sum();
                self.sampler.sample(row, rng)
            })
            .collect()
    }
}

/// `p(out | given)` as a sampler whose row index is the row-major index of
/// the `given` symbols. Rows with zero mass (never reached by typical
/// inputs) put all mass on symbol 0.
pub(crate) fn conditional_sampler(joint: &JointPmf, given: &[&str], out: &str) -> Result<CondSampler> {
    let mut names: Vec<&str> = given.to_vec();
    names.push(out);
    let m = joint.marginalize(&names)?;
    let k = m.axis(out)?.size();
    let rows = m
        .probs()
        .chunks(k)
        .map(|chunk| {
            let total: f64 = chunk.iter().sum();
            if total > 0.0 {
                chunk.iter().map(|p| p / total).collect()
            } else {
                let mut r = vec![0.0; k];
                r[0] = 1.0;
                r
            }
        })
        .collect();
    Ok(CondSampler::new(rows))
}

/// Typicality test for the named marginal of `joint`, columns in `names`
/// order.
pub(crate) fn marginal_test(joint: &JointPmf, names: &[&str], n: usize, eps: f64) -> Result<TypicalityTest> {
    Ok(TypicalityTest::new(&joint.marginalize(names)?, n, eps))
}

/// `base^n`, saturating.
pub(crate) fn sequence_count(base: usize, n: usize) -> u128 {
    (base as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
}

pub(crate) fn check_budget(what: &str, needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        return Err(Error::BudgetExceeded {
            what: what.into(),
            needed,
            budget,
        });
    }
    Ok(())
}

/// Symbols of sequence number `idx` (first letter most significant).
pub(crate) fn index_to_seq(mut idx: usize, base: usize, out: &mut [usize]) {
    for d in out.iter_mut().rev() {
        *d = idx % base;
        idx /= base;
    }
}

/// Mean per-letter distortion and whether it respects the typical-pair
/// bound `E d + eps · d_max`.
pub(crate) struct DistortionCheck {
    pair: TypicalityTest,
    table: Vec<f64>,
    embed: usize,
    bound: f64,
}

impl DistortionCheck {
    pub fn new(joint: &JointPmf, d: &crate::prob::DistortionMeasure, n: usize, eps: f64) -> Result<Self> {
        let expected = crate::prob::expected_distortion(joint, d)?;
        Ok(DistortionCheck {
            pair: marginal_test(joint, &[d.host().name(), d.embed().name()], n, eps)?,
            table: d.table().to_vec(),
            embed: d.embed().size(),
            bound: expected + eps * d.d_max(),
        })
    }

    /// `(distortion, violated)`
    pub fn measure(&self, s: &[usize], x: &[usize], scratch: &mut Vec<u32>) -> (f64, bool) {
        let total: f64 = s.iter().zip(x).map(|(&a, &b)| self.table[a * self.embed + b]).sum();
        let d = total / s.len() as f64;
        let violated = self.pair.accepts(&[s, x], scratch) && d > self.bound + 1e-12;
        (d, violated)
    }
}
