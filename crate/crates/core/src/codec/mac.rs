//! MAC case C: each encoder maps `(qⁿ, sᵢⁿ, wᵢ)` to a codeword drawn from
//! `∏ p(xᵢ | sᵢ, q)`; the decoder looks for the unique messages and host
//! pair whose codewords are jointly typical with `(qⁿ, yⁿ)`.

use std::sync::OnceLock;

use rand::Rng;

use super::{
    check_budget, conditional_sampler, index_to_seq, marginal_test, sequence_count,
    Decoded, DistortionCheck, ErrorEvent, KernelSampler, SimConfig, TrialOutcome,
    MAX_CODEBOOK_SYMBOLS,
};
use crate::error::{Error, Result};
use crate::prob::JointPmf;
use crate::regions::{assemble_mac_joint, MacEncoders, MacFeasibleTuple, MacProblem};
use crate::rng::{keyed_rng, CondSampler};
use crate::typicality::TypicalityTest;

/// Lazily generated codebooks of both encoders plus the shared `qⁿ`.
#[derive(Debug)]
pub struct MacCodebook {
    seed: u64,
    n: usize,
    m: [usize; 2],
    q: Vec<usize>,
    q_size: usize,
    s_size: [usize; 2],
    /// `p(xᵢ | sᵢ, q)`, row `sᵢ·|Q| + q`
    enc: [CondSampler; 2],
    /// `(Q, S1, S2, X1, X2, Y)`
    joint: JointPmf,
    expected: [f64; 2],
    table: [OnceLock<Vec<usize>>; 2],
}

const ROLES: [&str; 2] = ["mac-x1", "mac-x2"];

impl MacCodebook {
    pub fn new(
        problem: &MacProblem,
        tuple: &MacFeasibleTuple,
        n: usize,
        m1: usize,
        m2: usize,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 || m1 == 0 || m2 == 0 {
            return Err(Error::InvalidParameter("n, M1 and M2 must be positive".into()));
        }
        if matches!(tuple.encoders, MacEncoders::Joint { .. }) {
            return Err(Error::InvalidParameter(
                "the case C scheme needs separate encoders".into(),
            ));
        }
        let full = assemble_mac_joint(tuple, problem)?;
        let joint = full.marginalize(&["Q", "S1", "S2", "X1", "X2", "Y"])?;
        let q_size = tuple.q.alphabet().size();
        let enc = [
            conditional_sampler(&joint, &["S1", "Q"], "X1")?,
            conditional_sampler(&joint, &["S2", "Q"], "X2")?,
        ];
        let mut rng = keyed_rng(seed, "mac-q", &[], &[]);
        let q_sampler = CondSampler::new(vec![tuple.q.probs().to_vec()]);
        let q = (0..n).map(|_| q_sampler.sample(0, &mut rng)).collect();
        let expected = [
            crate::prob::expected_distortion(&full, problem.d1())?,
            crate::prob::expected_distortion(&full, problem.d2())?,
        ];
        Ok(MacCodebook {
            seed,
            n,
            m: [m1, m2],
            q,
            q_size,
            s_size: [problem.alphabet("S1")?.size(), problem.alphabet("S2")?.size()],
            enc,
            joint,
            expected,
            table: [OnceLock::new(), OnceLock::new()],
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(M1, M2)`
    pub fn messages(&self) -> [usize; 2] {
        self.m
    }

    /// The time-sharing sequence `qⁿ`.
    pub fn time_sharing(&self) -> &[usize] {
        &self.q
    }

    /// Joint of `(Q, S1, S2, X1, X2, Y)` under the tuple.
    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    pub fn expected_distortion(&self) -> &[f64; 2] {
        &self.expected
    }

    /// `xᵢⁿ(qⁿ, sᵢⁿ, w)` for `user ∈ {0, 1}`; messages are `0..Mᵢ`.
    pub fn codeword(&self, user: usize, s: &[usize], w: usize) -> Vec<usize> {
        let mut rng = keyed_rng(self.seed, ROLES[user], &[w as u64], s);
        s.iter()
            .zip(&self.q)
            .map(|(&si, &qj)| self.enc[user].sample(si * self.q_size + qj, &mut rng))
            .collect()
    }

    /// All codewords of one user, indexed `(host index · Mᵢ + w) · n`.
    fn table(&self, user: usize) -> Result<&[usize]> {
        let hosts = sequence_count(self.s_size[user], self.n);
        let symbols = hosts
            .saturating_mul(self.m[user] as u128)
            .saturating_mul(self.n as u128);
        check_budget("codebook size", symbols, MAX_CODEBOOK_SYMBOLS)?;
        Ok(self.table[user].get_or_init(|| {
            let mut out = Vec::with_capacity(symbols as usize);
            let mut s = vec![0; self.n];
            for h in 0..hosts as usize {
                index_to_seq(h, self.s_size[user], &mut s);
                for w in 0..self.m[user] {
                    out.extend(self.codeword(user, &s, w));
                }
            }
            out
        }))
    }
}

/// Encoder `i`: transmits `xᵢⁿ(qⁿ, sᵢⁿ, wᵢ)`; never fails.
pub fn mac_case_c_encode(cb: &MacCodebook, user: usize, s: &[usize], w: usize) -> Vec<usize> {
    cb.codeword(user, s, w)
}

/// A decoded tuple `(ŵ1, ŵ2, ŝ1ⁿ, ŝ2ⁿ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacDecoded {
    pub w1: usize,
    pub w2: usize,
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
}

/// Precompiled decoder for one codebook and typicality parameters.
#[derive(Debug)]
pub struct MacDecoder {
    full: TypicalityTest,
    hosts: TypicalityTest,
    /// `(Q, Sᵢ, Xᵢ, Y)` marginals at a slightly inflated ε: joint
    /// typicality implies these, so pruning with them loses nothing.
    single: [TypicalityTest; 2],
    /// Host indices whose `(Q, Sᵢ)` marginal passes, per user.
    admissible: [Vec<usize>; 2],
}

impl MacDecoder {
    pub fn new(cb: &MacCodebook, eps: f64, eps1: f64, budget: u128) -> Result<Self> {
        let hosts = sequence_count(cb.s_size[0], cb.n).saturating_mul(sequence_count(cb.s_size[1], cb.n));
        check_budget("host-pair enumeration", hosts, budget)?;
        let j = &cb.joint;
        let n = cb.n;
        let loose = eps * (1.0 + 1e-9);
        let mut admissible = [Vec::new(), Vec::new()];
        let mut scratch = Vec::new();
        for (user, name) in ["S1", "S2"].into_iter().enumerate() {
            let test = marginal_test(j, &["Q", name], n, loose)?;
            let mut s = vec![0; n];
            for h in 0..sequence_count(cb.s_size[user], n) as usize {
                index_to_seq(h, cb.s_size[user], &mut s);
                if test.accepts(&[&cb.q, &s], &mut scratch) {
                    admissible[user].push(h);
                }
            }
        }
        Ok(MacDecoder {
            full: marginal_test(j, &["Q", "S1", "S2", "X1", "X2", "Y"], n, eps)?,
            hosts: marginal_test(j, &["Q", "S1", "S2"], n, eps1)?,
            single: [
                marginal_test(j, &["Q", "S1", "X1", "Y"], n, loose)?,
                marginal_test(j, &["Q", "S2", "X2", "Y"], n, loose)?,
            ],
            admissible,
        })
    }

    pub fn decode(&self, cb: &MacCodebook, y: &[usize]) -> Result<Decoded<MacDecoded>> {
        let n = cb.n;
        if y.len() != n {
            return Err(Error::LengthMismatch(n, y.len()));
        }
        let q = &cb.q[..];
        let mut scratch = Vec::new();
        // candidates per user: (host, message, codeword offset)
        let mut lists: [Vec<(Vec<usize>, usize, usize)>; 2] = [Vec::new(), Vec::new()];
        for user in 0..2 {
            let table = cb.table(user)?;
            let mut s = vec![0; n];
            for &h in &self.admissible[user] {
                index_to_seq(h, cb.s_size[user], &mut s);
                for w in 0..cb.m[user] {
                    let off = (h * cb.m[user] + w) * n;
                    if self.single[user].accepts(&[q, &s, &table[off..off + n], y], &mut scratch) {
                        lists[user].push((s.clone(), w, off));
                    }
                }
            }
            if lists[user].is_empty() {
                return Ok(Decoded::NoCandidate);
            }
        }
        let t1 = cb.table(0)?;
        let t2 = cb.table(1)?;
        let mut found = Vec::new();
        'outer: for (s1, w1, o1) in &lists[0] {
            let x1 = &t1[*o1..o1 + n];
            for (s2, w2, o2) in &lists[1] {
                if !self.hosts.accepts(&[q, s1, s2], &mut scratch) {
                    continue;
                }
                if self.full.accepts(&[q, s1, s2, x1, &t2[*o2..o2 + n], y], &mut scratch) {
                    found.push(MacDecoded {
                        w1: *w1,
                        w2: *w2,
                        s1: s1.clone(),
                        s2: s2.clone(),
                    });
                    if found.len() > 1 {
                        break 'outer;
                    }
                }
            }
        }
        Ok(Decoded::from_matches(found))
    }
}

/// Decodes `yⁿ` by exhaustive search over messages and host pairs.
pub fn mac_case_c_decode(
    cb: &MacCodebook,
    y: &[usize],
    eps: f64,
    eps1: f64,
    budget: u128,
) -> Result<Decoded<MacDecoded>> {
    MacDecoder::new(cb, eps, eps1, budget)?.decode(cb, y)
}

pub(crate) struct TrialRunner {
    cb: MacCodebook,
    dec: MacDecoder,
    host: CondSampler,
    channel: KernelSampler,
    dist: [DistortionCheck; 2],
    seed: u64,
}

impl TrialRunner {
    pub fn new(p: &MacProblem, cb: MacCodebook, dec: MacDecoder, cfg: &SimConfig) -> Result<Self> {
        let dist = [
            DistortionCheck::new(&cb.joint, p.d1(), cfg.n, cfg.eps)?,
            DistortionCheck::new(&cb.joint, p.d2(), cfg.n, cfg.eps)?,
        ];
        // warm the shared codeword tables before trials fan out
        cb.table(0)?;
        cb.table(1)?;
        Ok(TrialRunner {
            host: CondSampler::new(vec![p.host().probs().to_vec()]),
            channel: KernelSampler::new(p.channel(), &["X1", "S1", "X2", "S2"])?,
            dist,
            seed: cfg.seed,
            cb,
            dec,
        })
    }

    pub fn run(&self, trial: usize) -> TrialOutcome {
        let cb = &self.cb;
        let n = cb.n;
        let mut rng = keyed_rng(self.seed, "trial", &[trial as u64], &[]);
        let s2_size = cb.s_size[1];
        let (mut s1, mut s2) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for _ in 0..n {
            let c = self.host.sample(0, &mut rng);
            s1.push(c / s2_size);
            s2.push(c % s2_size);
        }
        let w1 = rng.random_range(0..cb.m[0]);
        let w2 = rng.random_range(0..cb.m[1]);
        let x1 = mac_case_c_encode(cb, 0, &s1, w1);
        let x2 = mac_case_c_encode(cb, 1, &s2, w2);
        let y = self.channel.sample_cols(&[&x1, &s1, &x2, &s2], &mut rng);
        let mut scratch = Vec::new();
        let (d1, v1) = self.dist[0].measure(&s1, &x1, &mut scratch);
        let (d2, v2) = self.dist[1].measure(&s2, &x2, &mut scratch);
        let event = match self.dec.decode(cb, &y).expect("budget checked at construction") {
            Decoded::NoCandidate => Some(ErrorEvent::NoCandidate),
            Decoded::Ambiguous => Some(ErrorEvent::Ambiguity),
            Decoded::Unique(d) if (d.w1, d.w2) != (w1, w2) => Some(ErrorEvent::MessageError),
            Decoded::Unique(d) if d.s1 != s1 || d.s2 != s2 => Some(ErrorEvent::HostError),
            Decoded::Unique(_) => None,
        };
        TrialOutcome {
            event,
            distortion: vec![d1, d2],
            bound_violations: v1 as usize + v2 as usize,
        }
    }
}
