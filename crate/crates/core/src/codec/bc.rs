//! Degraded broadcast schemes.
//!
//! * B′ — a pool of `uⁿ` sequences split into `M2` bins. The encoder picks
//!   the first `uⁿ` in bin `w2` that is jointly typical with `sⁿ`, then
//!   superimposes `xⁿ(sⁿ, uⁿ, w1)`. Decoder 1 finds `uⁿ` (hence `w2`) and
//!   then `(sⁿ, w1)`; decoder 2 only finds `uⁿ`.
//! * C′/D′ — `uⁿ(sⁿ, w2)` drawn from `∏ p(u|s)` and `xⁿ(sⁿ, w2, w1)` from
//!   `∏ p(x|u,s)`. Both decoders search typical hosts and cloud centres;
//!   decoder 1 then resolves `w1`. In case D′ decoder 1 need not recover
//!   the host.

use std::sync::OnceLock;

use rand::Rng;

use super::{
    check_budget, conditional_sampler, index_to_seq, marginal_test, sequence_count, Decoded,
    DistortionCheck, ErrorEvent, KernelSampler, SimConfig, TrialOutcome, MAX_CODEBOOK_SYMBOLS,
};
use crate::error::{Error, Result};
use crate::prob::{mutual_information, JointPmf};
use crate::regions::{assemble_bc_joint, BcCase, BcFeasibleTuple, BcProblem};
use crate::rng::{keyed_rng, CondSampler};
use crate::typicality::TypicalityTest;

fn bc_joint(problem: &BcProblem, tuple: &BcFeasibleTuple) -> Result<(JointPmf, f64)> {
    let full = assemble_bc_joint(tuple, problem)?;
    if !full.has_axis("U") {
        return Err(Error::AxisMismatch("tuple has no auxiliary `U`".into()));
    }
    let e = crate::prob::expected_distortion(&full, problem.d())?;
    Ok((full.marginalize(&["S", "U", "X", "Y", "Z"])?, e))
}

/// Binned codebook of the B′ scheme.
#[derive(Debug)]
pub struct BcBinnedCodebook {
    seed: u64,
    n: usize,
    m: [usize; 2],
    bin_size: usize,
    /// `M2 · bin_size` sequences, bin `w2` at `[w2·B, (w2+1)·B)`
    pool: Vec<Vec<usize>>,
    s_size: usize,
    u_size: usize,
    /// `p(x | s, u)`, row `s·|U| + u`
    enc: CondSampler,
    joint: JointPmf,
    expected: f64,
}

impl BcBinnedCodebook {
    /// Bin size is `⌈2^{n(I(U;S)+eps)}⌉`.
    pub fn new(
        problem: &BcProblem,
        tuple: &BcFeasibleTuple,
        n: usize,
        m1: usize,
        m2: usize,
        eps: f64,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 || m1 == 0 || m2 == 0 {
            return Err(Error::InvalidParameter("n, M1 and M2 must be positive".into()));
        }
        let (joint, expected) = bc_joint(problem, tuple)?;
        let ius = mutual_information(&joint, &["U"], &["S"])?;
        let bin = 2f64.powf(n as f64 * (ius + eps));
        let pool_len = (bin.ceil() as u128).saturating_mul(m2 as u128);
        check_budget("auxiliary pool", pool_len.saturating_mul(n as u128), MAX_CODEBOOK_SYMBOLS)?;
        let bin_size = bin.ceil() as usize;
        let u_marg = joint.marginalize(&["U"])?;
        let u_sampler = CondSampler::new(vec![u_marg.probs().to_vec()]);
        let pool = (0..pool_len as usize)
            .map(|j| {
                let mut rng = keyed_rng(seed, "bc-pool", &[j as u64], &[]);
                (0..n).map(|_| u_sampler.sample(0, &mut rng)).collect()
            })
            .collect();
        Ok(BcBinnedCodebook {
            seed,
            n,
            m: [m1, m2],
            bin_size,
            pool,
            s_size: joint.axis("S")?.size(),
            u_size: joint.axis("U")?.size(),
            enc: conditional_sampler(&joint, &["S", "U"], "X")?,
            joint,
            expected,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn messages(&self) -> [usize; 2] {
        self.m
    }

    pub fn bin_size(&self) -> usize {
        self.bin_size
    }

    /// Pool entry `j` (bin `j / bin_size`).
    pub fn pool(&self, j: usize) -> &[usize] {
        &self.pool[j]
    }

    pub fn pool_len(&self) -> usize {
        self.pool.len()
    }

    /// Joint of `(S, U, X, Y, Z)` under the tuple.
    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    pub fn expected_distortion(&self) -> f64 {
        self.expected
    }

    /// `xⁿ(sⁿ, uⁿ_j, w1)`
    pub fn codeword(&self, s: &[usize], j: usize, w1: usize) -> Vec<usize> {
        let mut rng = keyed_rng(self.seed, "bc-b-x", &[j as u64, w1 as u64], s);
        s.iter()
            .zip(&self.pool[j])
            .map(|(&si, &ui)| self.enc.sample(si * self.u_size + ui, &mut rng))
            .collect()
    }
}

/// Result of B′ encoding. On failure the encoder still transmits the
/// codeword built on the first entry of the bin, so distortion is defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinnedEncoding {
    pub x: Vec<usize>,
    pub pool_index: usize,
    pub failed: bool,
}

/// B′ encoder at typicality parameter `eps`.
pub fn bc_case_b_encode(cb: &BcBinnedCodebook, s: &[usize], w1: usize, w2: usize, eps: f64) -> Result<BinnedEncoding> {
    let host = marginal_test(&cb.joint, &["S"], cb.n, eps)?;
    let pair = marginal_test(&cb.joint, &["S", "U"], cb.n, eps)?;
    Ok(encode_binned(cb, &host, &pair, s, w1, w2))
}

fn encode_binned(
    cb: &BcBinnedCodebook,
    host: &TypicalityTest,
    pair: &TypicalityTest,
    s: &[usize],
    w1: usize,
    w2: usize,
) -> BinnedEncoding {
    let mut scratch = Vec::new();
    let bin = w2 * cb.bin_size..(w2 + 1) * cb.bin_size;
    let chosen = if host.accepts(&[s], &mut scratch) {
        bin.clone().find(|&j| pair.accepts(&[s, &cb.pool[j]], &mut scratch))
    } else {
        None
    };
    let pool_index = chosen.unwrap_or(bin.start);
    BinnedEncoding {
        x: cb.codeword(s, pool_index, w1),
        pool_index,
        failed: chosen.is_none(),
    }
}

/// Output of B′ decoder 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinnedDecoded {
    pub w1: usize,
    pub w2: usize,
    pub pool_index: usize,
    pub s: Vec<usize>,
}

/// Precompiled B′ decoders.
#[derive(Debug)]
pub struct BcDecoderB {
    uy: TypicalityTest,
    uz: TypicalityTest,
    su: TypicalityTest,
    suxy: TypicalityTest,
    host: TypicalityTest,
}

impl BcDecoderB {
    pub fn new(cb: &BcBinnedCodebook, eps: f64, budget: u128) -> Result<Self> {
        check_budget("host enumeration", sequence_count(cb.s_size, cb.n), budget)?;
        check_budget("auxiliary pool scan", cb.pool.len() as u128, budget)?;
        let (j, n) = (&cb.joint, cb.n);
        Ok(BcDecoderB {
            uy: marginal_test(j, &["U", "Y"], n, eps)?,
            uz: marginal_test(j, &["U", "Z"], n, eps)?,
            su: marginal_test(j, &["S", "U"], n, eps)?,
            suxy: marginal_test(j, &["S", "U", "X", "Y"], n, eps)?,
            host: marginal_test(j, &["S"], n, eps)?,
        })
    }

    /// Unique pool entry jointly typical with `out` under `test`.
    fn find_pool(&self, cb: &BcBinnedCodebook, test: &TypicalityTest, out: &[usize]) -> Decoded<usize> {
        let mut scratch = Vec::new();
        let mut found = Vec::new();
        for (j, u) in cb.pool.iter().enumerate() {
            if test.accepts(&[u, out], &mut scratch) {
                found.push(j);
                if found.len() > 1 {
                    break;
                }
            }
        }
        Decoded::from_matches(found)
    }

    /// Stage 1 finds the unique `uⁿ` typical with `yⁿ`; stage 2 the unique
    /// `(sⁿ, w1)` with `(sⁿ, uⁿ)` typical and `(sⁿ, uⁿ, xⁿ, yⁿ)` typical.
    pub fn decode1(&self, cb: &BcBinnedCodebook, y: &[usize]) -> Decoded<BinnedDecoded> {
        let j = match self.find_pool(cb, &self.uy, y) {
            Decoded::Unique(j) => j,
            Decoded::NoCandidate => return Decoded::NoCandidate,
            Decoded::Ambiguous => return Decoded::Ambiguous,
        };
        let u = &cb.pool[j];
        let n = cb.n;
        let mut scratch = Vec::new();
        let mut found = Vec::new();
        let mut s = vec![0; n];
        'outer: for h in 0..sequence_count(cb.s_size, n) as usize {
            index_to_seq(h, cb.s_size, &mut s);
            if !self.su.accepts(&[&s, u], &mut scratch) {
                continue;
            }
            for w1 in 0..cb.m[0] {
                let x = cb.codeword(&s, j, w1);
                if self.suxy.accepts(&[&s, u, &x, y], &mut scratch) {
                    found.push(BinnedDecoded {
                        w1,
                        w2: j / cb.bin_size,
                        pool_index: j,
                        s: s.clone(),
                    });
                    if found.len() > 1 {
                        break 'outer;
                    }
                }
            }
        }
        Decoded::from_matches(found)
    }

    /// Unique `uⁿ` typical with `zⁿ`; returns `w2`.
    pub fn decode2(&self, cb: &BcBinnedCodebook, z: &[usize]) -> Decoded<usize> {
        match self.find_pool(cb, &self.uz, z) {
            Decoded::Unique(j) => Decoded::Unique(j / cb.bin_size),
            Decoded::NoCandidate => Decoded::NoCandidate,
            Decoded::Ambiguous => Decoded::Ambiguous,
        }
    }

    /// Whether pool entry `j` passes decoder 1's first stage for `yⁿ`.
    pub fn stage1_accepts(&self, cb: &BcBinnedCodebook, j: usize, y: &[usize]) -> bool {
        self.uy.accepts(&[&cb.pool[j], y], &mut Vec::new())
    }
}

pub fn bc_case_b_decode1(cb: &BcBinnedCodebook, y: &[usize], eps: f64, budget: u128) -> Result<Decoded<BinnedDecoded>> {
    Ok(BcDecoderB::new(cb, eps, budget)?.decode1(cb, y))
}

pub fn bc_case_b_decode2(cb: &BcBinnedCodebook, z: &[usize], eps: f64, budget: u128) -> Result<Decoded<usize>> {
    Ok(BcDecoderB::new(cb, eps, budget)?.decode2(cb, z))
}

/// Superposition codebook of the C′/D′ scheme.
#[derive(Debug)]
pub struct BcSuperpositionCodebook {
    seed: u64,
    n: usize,
    m: [usize; 2],
    s_size: usize,
    u_size: usize,
    /// `p(u | s)`
    cloud: CondSampler,
    /// `p(x | s, u)`, row `s·|U| + u`
    enc: CondSampler,
    joint: JointPmf,
    expected: f64,
    /// `uⁿ(sⁿ, w2)` for every host, indexed `(host · M2 + w2) · n`
    table: OnceLock<Vec<usize>>,
}

impl BcSuperpositionCodebook {
    pub fn new(
        problem: &BcProblem,
        tuple: &BcFeasibleTuple,
        n: usize,
        m1: usize,
        m2: usize,
        seed: u64,
    ) -> Result<Self> {
        if n == 0 || m1 == 0 || m2 == 0 {
            return Err(Error::InvalidParameter("n, M1 and M2 must be positive".into()));
        }
        let (joint, expected) = bc_joint(problem, tuple)?;
        Ok(BcSuperpositionCodebook {
            seed,
            n,
            m: [m1, m2],
            s_size: joint.axis("S")?.size(),
            u_size: joint.axis("U")?.size(),
            cloud: conditional_sampler(&joint, &["S"], "U")?,
            enc: conditional_sampler(&joint, &["S", "U"], "X")?,
            joint,
            expected,
            table: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn messages(&self) -> [usize; 2] {
        self.m
    }

    pub fn joint(&self) -> &JointPmf {
        &self.joint
    }

    pub fn expected_distortion(&self) -> f64 {
        self.expected
    }

    /// Cloud centre `uⁿ(sⁿ, w2)`.
    pub fn cloud_centre(&self, s: &[usize], w2: usize) -> Vec<usize> {
        let mut rng = keyed_rng(self.seed, "bc-c-u", &[w2 as u64], s);
        s.iter().map(|&si| self.cloud.sample(si, &mut rng)).collect()
    }

    /// Satellite `xⁿ(sⁿ, w2, w1)` around `u`, which must be
    /// `cloud_centre(s, w2)`.
    fn satellite(&self, s: &[usize], u: &[usize], w2: usize, w1: usize) -> Vec<usize> {
        let mut rng = keyed_rng(self.seed, "bc-c-x", &[w2 as u64, w1 as u64], s);
        s.iter()
            .zip(u)
            .map(|(&si, &ui)| self.enc.sample(si * self.u_size + ui, &mut rng))
            .collect()
    }

    /// `xⁿ(sⁿ, w2, w1)`
    pub fn codeword(&self, s: &[usize], w2: usize, w1: usize) -> Vec<usize> {
        self.satellite(s, &self.cloud_centre(s, w2), w2, w1)
    }

    fn table(&self) -> Result<&[usize]> {
        let hosts = sequence_count(self.s_size, self.n);
        let symbols = hosts
            .saturating_mul(self.m[1] as u128)
            .saturating_mul(self.n as u128);
        check_budget("codebook size", symbols, MAX_CODEBOOK_SYMBOLS)?;
        Ok(self.table.get_or_init(|| {
            let mut out = Vec::with_capacity(symbols as usize);
            let mut s = vec![0; self.n];
            for h in 0..hosts as usize {
                index_to_seq(h, self.s_size, &mut s);
                for w2 in 0..self.m[1] {
                    out.extend(self.cloud_centre(&s, w2));
                }
            }
            out
        }))
    }
}

/// C′/D′ encoder; never fails.
pub fn bc_case_c_encode(cb: &BcSuperpositionCodebook, s: &[usize], w1: usize, w2: usize) -> Vec<usize> {
    cb.codeword(s, w2, w1)
}

/// Output of a C′/D′ decoder; `w1` is `None` for decoder 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperpositionDecoded {
    pub w1: Option<usize>,
    pub w2: usize,
    pub s: Vec<usize>,
}

/// Precompiled C′/D′ decoders.
#[derive(Debug)]
pub struct BcDecoderC {
    /// host indices in `T_eps1[S]`
    typical_hosts: Vec<usize>,
    suy: TypicalityTest,
    suz: TypicalityTest,
    suxy: TypicalityTest,
}

impl BcDecoderC {
    pub fn new(cb: &BcSuperpositionCodebook, eps: f64, eps1: f64, budget: u128) -> Result<Self> {
        let count = sequence_count(cb.s_size, cb.n);
        check_budget("host enumeration", count, budget)?;
        cb.table()?;
        let (j, n) = (&cb.joint, cb.n);
        let host = marginal_test(j, &["S"], n, eps1)?;
        let mut scratch = Vec::new();
        let mut s = vec![0; n];
        let typical_hosts = (0..count as usize)
            .filter(|&h| {
                index_to_seq(h, cb.s_size, &mut s);
                host.accepts(&[&s], &mut scratch)
            })
            .collect();
        Ok(BcDecoderC {
            typical_hosts,
            suy: marginal_test(j, &["S", "U", "Y"], n, eps)?,
            suz: marginal_test(j, &["S", "U", "Z"], n, eps)?,
            suxy: marginal_test(j, &["S", "U", "X", "Y"], n, eps)?,
        })
    }

    fn find_cloud(&self, cb: &BcSuperpositionCodebook, test: &TypicalityTest, out: &[usize]) -> Decoded<(Vec<usize>, usize)> {
        let table = cb.table().expect("size checked at construction");
        let n = cb.n;
        let mut scratch = Vec::new();
        let mut found = Vec::new();
        let mut s = vec![0; n];
        'outer: for &h in &self.typical_hosts {
            index_to_seq(h, cb.s_size, &mut s);
            for w2 in 0..cb.m[1] {
                let off = (h * cb.m[1] + w2) * n;
                if test.accepts(&[&s, &table[off..off + n], out], &mut scratch) {
                    found.push((s.clone(), w2));
                    if found.len() > 1 {
                        break 'outer;
                    }
                }
            }
        }
        Decoded::from_matches(found)
    }

    /// Unique `(sⁿ, w2)` with `(sⁿ, uⁿ, yⁿ)` typical, then unique `w1`
    /// with `(sⁿ, uⁿ, xⁿ, yⁿ)` typical.
    pub fn decode1(&self, cb: &BcSuperpositionCodebook, y: &[usize]) -> Decoded<SuperpositionDecoded> {
        let (s, w2) = match self.find_cloud(cb, &self.suy, y) {
            Decoded::Unique(v) => v,
            Decoded::NoCandidate => return Decoded::NoCandidate,
            Decoded::Ambiguous => return Decoded::Ambiguous,
        };
        let u = cb.cloud_centre(&s, w2);
        let mut scratch = Vec::new();
        let mut found = Vec::new();
        for w1 in 0..cb.m[0] {
            let x = cb.satellite(&s, &u, w2, w1);
            if self.suxy.accepts(&[&s, &u, &x, y], &mut scratch) {
                found.push(w1);
                if found.len() > 1 {
                    break;
                }
            }
        }
        match Decoded::from_matches(found) {
            Decoded::Unique(w1) => Decoded::Unique(SuperpositionDecoded { w1: Some(w1), w2, s }),
            Decoded::NoCandidate => Decoded::NoCandidate,
            Decoded::Ambiguous => Decoded::Ambiguous,
        }
    }

    /// Unique `(sⁿ, w2)` with `(sⁿ, uⁿ, zⁿ)` typical.
    pub fn decode2(&self, cb: &BcSuperpositionCodebook, z: &[usize]) -> Decoded<SuperpositionDecoded> {
        match self.find_cloud(cb, &self.suz, z) {
            Decoded::Unique((s, w2)) => Decoded::Unique(SuperpositionDecoded { w1: None, w2, s }),
            Decoded::NoCandidate => Decoded::NoCandidate,
            Decoded::Ambiguous => Decoded::Ambiguous,
        }
    }
}

pub fn bc_case_c_decode1(
    cb: &BcSuperpositionCodebook,
    y: &[usize],
    eps: f64,
    eps1: f64,
    budget: u128,
) -> Result<Decoded<SuperpositionDecoded>> {
    Ok(BcDecoderC::new(cb, eps, eps1, budget)?.decode1(cb, y))
}

pub fn bc_case_c_decode2(
    cb: &BcSuperpositionCodebook,
    z: &[usize],
    eps: f64,
    eps1: f64,
    budget: u128,
) -> Result<Decoded<SuperpositionDecoded>> {
    Ok(BcDecoderC::new(cb, eps, eps1, budget)?.decode2(cb, z))
}

fn failure<T>(d: &Decoded<T>) -> Option<ErrorEvent> {
    match d {
        Decoded::NoCandidate => Some(ErrorEvent::NoCandidate),
        Decoded::Ambiguous => Some(ErrorEvent::Ambiguity),
        Decoded::Unique(_) => None,
    }
}

/// Host draw, messages and both channel outputs of one trial.
struct Episode {
    s: Vec<usize>,
    w1: usize,
    w2: usize,
}

fn draw_episode<R: Rng>(host: &CondSampler, n: usize, m: [usize; 2], rng: &mut R) -> Episode {
    let s = (0..n).map(|_| host.sample(0, rng)).collect();
    Episode {
        s,
        w1: rng.random_range(0..m[0]),
        w2: rng.random_range(0..m[1]),
    }
}

struct Channels {
    forward: KernelSampler,
    degrade: KernelSampler,
}

impl Channels {
    fn new(p: &BcProblem) -> Result<Self> {
        Ok(Channels {
            forward: KernelSampler::new(p.forward(), &["X", "S"])?,
            degrade: KernelSampler::new(p.degrade(), &["Y"])?,
        })
    }

    fn run<R: Rng>(&self, x: &[usize], s: &[usize], rng: &mut R) -> (Vec<usize>, Vec<usize>) {
        let y = self.forward.sample_cols(&[x, s], rng);
        let z = self.degrade.sample_cols(&[&y], rng);
        (y, z)
    }
}

pub(crate) struct BinnedRunner {
    cb: BcBinnedCodebook,
    dec: BcDecoderB,
    pair: TypicalityTest,
    host: CondSampler,
    channels: Channels,
    dist: DistortionCheck,
    seed: u64,
}

impl BinnedRunner {
    pub fn new(p: &BcProblem, cb: BcBinnedCodebook, dec: BcDecoderB, cfg: &SimConfig) -> Result<Self> {
        Ok(BinnedRunner {
            pair: marginal_test(&cb.joint, &["S", "U"], cfg.n, cfg.eps)?,
            host: CondSampler::new(vec![p.host().probs().to_vec()]),
            channels: Channels::new(p)?,
            dist: DistortionCheck::new(&cb.joint, p.d(), cfg.n, cfg.eps)?,
            seed: cfg.seed,
            cb,
            dec,
        })
    }

    pub fn run(&self, trial: usize) -> TrialOutcome {
        let cb = &self.cb;
        let mut rng = keyed_rng(self.seed, "trial", &[trial as u64], &[]);
        let ep = draw_episode(&self.host, cb.n, cb.m, &mut rng);
        let enc = encode_binned(cb, &self.dec.host, &self.pair, &ep.s, ep.w1, ep.w2);
        let (y, z) = self.channels.run(&enc.x, &ep.s, &mut rng);
        let (d, v) = self.dist.measure(&ep.s, &enc.x, &mut Vec::new());
        let event = if enc.failed {
            Some(ErrorEvent::EncodingFailure)
        } else {
            let d1 = self.dec.decode1(cb, &y);
            failure(&d1)
                .or_else(|| {
                    let d1 = d1.unique().expect("unique");
                    if (d1.w1, d1.w2) != (ep.w1, ep.w2) {
                        Some(ErrorEvent::MessageError)
                    } else if d1.s != ep.s {
                        Some(ErrorEvent::HostError)
                    } else {
                        None
                    }
                })
                .or_else(|| {
                    let d2 = self.dec.decode2(cb, &z);
                    failure(&d2).or_else(|| {
                        (d2.unique() != Some(ep.w2)).then_some(ErrorEvent::MessageError)
                    })
                })
        };
        TrialOutcome {
            event,
            distortion: vec![d],
            bound_violations: v as usize,
        }
    }
}

pub(crate) struct SuperpositionRunner {
    cb: BcSuperpositionCodebook,
    dec: BcDecoderC,
    host: CondSampler,
    channels: Channels,
    dist: DistortionCheck,
    seed: u64,
    /// D′: decoder 1 is judged on messages only
    lossy_decoder1: bool,
}

impl SuperpositionRunner {
    pub fn new(p: &BcProblem, cb: BcSuperpositionCodebook, dec: BcDecoderC, cfg: &SimConfig) -> Result<Self> {
        Ok(SuperpositionRunner {
            host: CondSampler::new(vec![p.host().probs().to_vec()]),
            channels: Channels::new(p)?,
            dist: DistortionCheck::new(&cb.joint, p.d(), cfg.n, cfg.eps)?,
            seed: cfg.seed,
            lossy_decoder1: p.case() == BcCase::D,
            cb,
            dec,
        })
    }

    pub fn run(&self, trial: usize) -> TrialOutcome {
        let cb = &self.cb;
        let mut rng = keyed_rng(self.seed, "trial", &[trial as u64], &[]);
        let ep = draw_episode(&self.host, cb.n, cb.m, &mut rng);
        let x = bc_case_c_encode(cb, &ep.s, ep.w1, ep.w2);
        let (y, z) = self.channels.run(&x, &ep.s, &mut rng);
        let (d, v) = self.dist.measure(&ep.s, &x, &mut Vec::new());
        let judge = |got: Decoded<SuperpositionDecoded>, w1: Option<usize>, host: bool| {
            failure(&got).or_else(|| {
                let got = got.unique().expect("unique");
                if got.w1 != w1 || got.w2 != ep.w2 {
                    Some(ErrorEvent::MessageError)
                } else if host && got.s != ep.s {
                    Some(ErrorEvent::HostError)
                } else {
                    None
                }
            })
        };
        let event = judge(self.dec.decode1(cb, &y), Some(ep.w1), !self.lossy_decoder1)
            .or_else(|| judge(self.dec.decode2(cb, &z), None, true));
        TrialOutcome {
            event,
            distortion: vec![d],
            bound_violations: v as usize,
        }
    }
}
