//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if
//! any fails. Runs without the libtest harness so the lines always show.

mod common;

use std::time::{Duration, Instant};

use common::*;
use embedcap::codec::{
    bc_case_b_encode, bc_case_c_encode, mac_case_c_encode, sample_channel, simulate,
    BcBinnedCodebook, BcDecoderB, BcDecoderC, BcSuperpositionCodebook, BinnedDecoded, Decoded,
    MacCodebook, MacDecoded, MacDecoder, Scheme, SimConfig, SimReport, SuperpositionDecoded,
    DEFAULT_DECODE_BUDGET,
};
use embedcap::prob::{Alphabet, JointPmf, Kernel, Pmf};
use embedcap::regions::verify::{verify_problem, CheckResult, VerifyOptions, VERIFY_TOL};
use embedcap::regions::{
    compute_region, contains, distance_outside, eval_mac_case_a, eval_mac_case_b,
    eval_mac_case_c, region_csv, support_function, BcCase, FeasibleTuple, MacCase,
    MacFeasibleTuple, Problem, RatePoint, SearchConfig,
};
use embedcap::typicality::{
    is_jointly_typical, is_strongly_typical, monte_carlo_coverage, typical_set_stats, Sequence,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, || format!("{what} took {t:.1?}, limit {limit:?}"))
}

// ---------------------------------------------------------------- AC1

/// Full joint over `(Q, S1, S2, U1, X1, U2, X2, Y)` by nested loops.
fn naive_mac_joint(p: &embedcap::regions::MacProblem, q: &[f64], e1: &[f64], e2: &[f64]) -> Table {
    let nq = q.len();
    let mut t = Table::new(vec!["Q", "S1", "S2", "U1", "X1", "U2", "X2", "Y"], vec![nq, 2, 2, 2, 2, 2, 2, 2]);
    let ch = p.channel();
    let names: Vec<&str> = ch.inputs().iter().map(|a| a.name()).collect();
    for i in 0..t.p.len() {
        let d = t.digits(i);
        let (qq, s1, s2, u1, x1, u2, x2, y) = (d[0], d[1], d[2], d[3], d[4], d[5], d[6], d[7]);
        let input: Vec<usize> = names
            .iter()
            .map(|n| match *n {
                "X1" => x1,
                "S1" => s1,
                "X2" => x2,
                _ => s2,
            })
            .collect();
        t.p[i] = q[qq]
            * p.host().prob_at(&[s1, s2])
            * e1[(s1 * nq + qq) * 4 + u1 * 2 + x1]
            * e2[(s2 * nq + qq) * 4 + u2 * 2 + x2]
            * ch.row_for(&input)[y];
    }
    t
}

fn ac1() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let mut r = rng(1000 + seed);
        let p = random_binary_mac(&mut r, MacCase::A, 1.0);
        let nq = 2;
        let q = random_pmf(&mut r, nq);
        let e1 = random_rows(&mut r, 2 * nq, 4);
        let e2 = random_rows(&mut r, 2 * nq, 4);
        let qa = Alphabet::new("Q", nq).unwrap();
        let k1 = Kernel::new(vec![bin("S1"), qa.clone()], vec![bin("U1"), bin("X1")], e1.clone()).unwrap();
        let k2 = Kernel::new(vec![bin("S2"), qa.clone()], vec![bin("U2"), bin("X2")], e2.clone()).unwrap();
        let mut tuple = MacFeasibleTuple::separate(k1, k2);
        tuple.q = Pmf::new(qa, q.clone()).unwrap();

        let t = naive_mac_joint(&p, &q, &e1, &e2);
        let oracle_a = [
            t.mi(&["U1"], &["U2", "Y"], &["Q"]) - t.mi(&["U1"], &["S1"], &["Q"]),
            t.mi(&["U2"], &["U1", "Y"], &["Q"]) - t.mi(&["U2"], &["S2"], &["Q"]),
            t.mi(&["U1", "U2"], &["Y"], &["Q"]) - t.mi(&["U1", "U2"], &["S1", "S2"], &["Q"]),
        ];
        let oracle_b = [
            t.mi(&["U1"], &["Y"], &["X2", "S2", "Q"]) - t.mi(&["U1"], &["S1"], &["X2", "S2", "Q"]),
            t.mi(&["X2", "S2"], &["Y"], &["U1", "Q"]) - t.hc(&["S2"], &["U1", "Q"]),
            t.mi(&["U1", "X2", "S2"], &["Y"], &["Q"]) - t.h(&["S2"])
                - t.mi(&["U1"], &["S1"], &["X2", "S2", "Q"]),
        ];
        let oracle_c = [
            t.mi(&["X1", "S1"], &["Y"], &["X2", "S2", "Q"]) - t.hc(&["S1"], &["S2"]),
            t.mi(&["X2", "S2"], &["Y"], &["X1", "S1", "Q"]) - t.hc(&["S2"], &["S1"]),
            t.mi(&["X1", "S1", "X2", "S2"], &["Y"], &["Q"]) - t.h(&["S1", "S2"]),
        ];
        let got = [
            eval_mac_case_a(&tuple, &p).map_err(|e| e.to_string())?,
            eval_mac_case_b(&tuple, &p).map_err(|e| e.to_string())?,
            eval_mac_case_c(&tuple, &p).map_err(|e| e.to_string())?,
        ];
        for (b, o) in got.iter().zip([oracle_a, oracle_b, oracle_c]) {
            let v = [b.b1, b.b2, b.b12.ok_or("missing sum bound")?];
            for (x, y) in v.iter().zip(o) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:.3e} bits"))?;
    within(start, Duration::from_secs(10), "50 tuples")?;
    Ok(format!("50 tuples x 3 cases, max deviation {worst:.2e} bits"))
}

// ---------------------------------------------------------------- AC2

/// Best support value over separate binary encoders on a 1/16 grid.
fn brute_support(p: &embedcap::regions::MacProblem, lambdas: &[f64]) -> Vec<f64> {
    const M: usize = 16;
    let ch = p.channel();
    let names: Vec<&str> = ch.inputs().iter().map(|a| a.name()).collect();
    let mut best = vec![f64::NEG_INFINITY; lambdas.len()];
    let grid: Vec<f64> = (0..=M).map(|i| i as f64 / M as f64).collect();
    for &a0 in &grid {
        for &a1 in &grid {
            for &c0 in &grid {
                for &c1 in &grid {
                    // P(Xi = 1 | Si = s)
                    let px1 = [a0, a1];
                    let px2 = [c0, c1];
                    let mut t = Table::new(vec!["S1", "S2", "X1", "X2", "Y"], vec![2; 5]);
                    let (mut d1, mut d2) = (0.0, 0.0);
                    for i in 0..32 {
                        let d = t.digits(i);
                        let (s1, s2, x1, x2, y) = (d[0], d[1], d[2], d[3], d[4]);
                        let input: Vec<usize> = names
                            .iter()
                            .map(|n| match *n {
                                "X1" => x1,
                                "S1" => s1,
                                "X2" => x2,
                                _ => s2,
                            })
                            .collect();
                        let f1 = if x1 == 1 { px1[s1] } else { 1.0 - px1[s1] };
                        let f2 = if x2 == 1 { px2[s2] } else { 1.0 - px2[s2] };
                        let v = p.host().prob_at(&[s1, s2]) * f1 * f2 * ch.row_for(&input)[y];
                        t.p[i] = v;
                        d1 += v * p.d1().get(s1, x1);
                        d2 += v * p.d2().get(s2, x2);
                    }
                    if d1 > p.delta1() + 1e-9 || d2 > p.delta2() + 1e-9 {
                        continue;
                    }
                    let b1 = t.mi(&["X1", "S1"], &["Y"], &["X2", "S2"]) - t.hc(&["S1"], &["S2"]);
                    let b2 = t.mi(&["X2", "S2"], &["Y"], &["X1", "S1"]) - t.hc(&["S2"], &["S1"]);
                    let c = t.mi(&["X1", "S1", "X2", "S2"], &["Y"], &[]) - t.h(&["S1", "S2"]);
                    for (k, &l) in lambdas.iter().enumerate() {
                        if let Some(v) = pentagon_support(b1, b2, c, l) {
                            best[k] = best[k].max(v);
                        }
                    }
                }
            }
        }
    }
    best
}

fn ac2() -> Verdict {
    let start = Instant::now();
    let lambdas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let fixtures = ["mac_xor_noisy", "mac_or", "mac_xor_clean", "mac_host_interference", "mac_mixture"];
    let mut worst: f64 = 0.0;
    for name in fixtures {
        let problem = fixture(name);
        let region = compute_region(&problem, &SearchConfig::default().with_step(8)).map_err(|e| format!("{name}: {e}"))?;
        ensure(!region.empty, || format!("{name}: empty region"))?;
        let brute = brute_support(as_mac(&problem), &lambdas);
        for (&l, &b) in lambdas.iter().zip(&brute) {
            let s = support_function(&region, l).map_err(|e| e.to_string())?;
            let d = (s - b).abs();
            worst = worst.max(d);
            ensure(d <= 0.02, || format!("{name} at lambda {l}: region {s:.5} vs sweep {b:.5}"))?;
        }
    }
    within(start, Duration::from_secs(300), "5 fixtures")?;
    Ok(format!("5 fixtures x 5 angles, max gap {worst:.4} bits"))
}

// ---------------------------------------------------------------- AC3

fn ac3() -> Verdict {
    let square = compute_region(&fixture("mac_clean_square"), &SearchConfig::default()).map_err(|e| e.to_string())?;
    let want = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    ensure(square.vertices.len() == 4, || format!("square has vertices {:?}", square.vertices))?;
    for (v, w) in square.vertices.iter().zip(want) {
        ensure((v.r1 - w.0).abs() <= 1e-12 && (v.r2 - w.1).abs() <= 1e-12, || {
            format!("square vertex {v:?}, expected {w:?}")
        })?;
    }
    let bsc = compute_region(&fixture("mac_bsc_single"), &SearchConfig::default()).map_err(|e| e.to_string())?;
    let r = support_function(&bsc, 1.0).map_err(|e| e.to_string())?;
    let cap = 1.0 - h2(0.1);
    ensure((r - cap).abs() <= 0.01, || format!("BSC rate {r:.5} vs {cap:.5}"))?;
    Ok(format!("unit square exact; BSC(0.1) rate {r:.6} vs 1-h(0.1) = {cap:.6}"))
}

// ---------------------------------------------------------------- AC4

fn checks_pass(name: &str, checks: &[CheckResult]) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    for c in checks {
        worst = worst.max(c.max_violation);
        ensure(c.passed && c.max_violation <= VERIFY_TOL, || {
            format!("{name}: {} violated by {:.3e}", c.name, c.max_violation)
        })?;
    }
    Ok(worst)
}

fn ac4() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut coarse = SearchConfig::default().with_step(4);
    coarse.aux.u1 = Some(2);
    coarse.aux.u2 = Some(2);
    coarse.aux.u = Some(2);
    coarse.aux.v = Some(2);
    for seed in 0..20u64 {
        let mut r = rng(2000 + seed);
        let delta = 0.15 + 0.35 * r.random::<f64>();
        let opts = |d: Vec<f64>| VerifyOptions { relaxed_budgets: d, ..Default::default() };

        let mac_c = Problem::Mac(random_binary_mac(&mut r, MacCase::C, delta));
        let checks = verify_problem(&mac_c, &SearchConfig::default(), &opts(vec![delta + 0.1, delta + 0.1]))
            .map_err(|e| format!("seed {seed} mac-c: {e}"))?;
        worst = worst.max(checks_pass(&format!("seed {seed} mac-c"), &checks)?);

        let mac_b = Problem::Mac(random_binary_mac(&mut r, MacCase::B, delta));
        let checks = verify_problem(&mac_b, &coarse, &opts(vec![delta + 0.1, delta + 0.1]))
            .map_err(|e| format!("seed {seed} mac-b: {e}"))?;
        worst = worst.max(checks_pass(&format!("seed {seed} mac-b"), &checks)?);

        let bc = random_binary_bc(&mut r, BcCase::C, delta);
        let rc = compute_region(&Problem::Bc(bc.with_case(BcCase::C)), &coarse).map_err(|e| e.to_string())?;
        let rd = compute_region(&Problem::Bc(bc.with_case(BcCase::D)), &coarse).map_err(|e| e.to_string())?;
        ensure(region_csv(&rc) == region_csv(&rd), || format!("seed {seed}: C′ and D′ CSVs differ"))?;
        let checks = verify_problem(&Problem::Bc(bc), &coarse, &opts(vec![delta + 0.1]))
            .map_err(|e| format!("seed {seed} bc-c: {e}"))?;
        worst = worst.max(checks_pass(&format!("seed {seed} bc-c"), &checks)?);
    }
    Ok(format!("20 seeds x (mac-c, mac-b, bc-c/d), max violation {worst:.2e}"))
}

// ---------------------------------------------------------------- AC5

fn ac5() -> Verdict {
    let p = Pmf::bernoulli("S", 0.1).unwrap();
    let cov = monte_carlo_coverage(&p, 200, 0.1, 10_000, 5);
    ensure(cov >= 0.95, || format!("coverage {cov:.4} < 0.95"))?;

    let n = 12;
    for q in [0.1, 0.3, 0.5] {
        let pmf = Pmf::bernoulli("S", q).unwrap();
        for eps in [0.2, 0.5, 1.0] {
            let st = typical_set_stats(&JointPmf::from_pmf(&pmf), n, eps).map_err(|e| e.to_string())?;
            // independent count over all 4096 sequences
            let (mut size, mut prob, mut spread) = (0usize, 0.0, 0.0f64);
            let h = h2(q);
            for bits in 0..1u32 << n {
                let ones = bits.count_ones() as usize;
                let symbols = (0..n).map(|j| (bits >> j & 1) as usize).collect();
                let seq = Sequence::new(pmf.alphabet().clone(), symbols).unwrap();
                if is_strongly_typical(&seq, &pmf, eps) {
                    size += 1;
                    let lp = ones as f64 * q.log2() + (n - ones) as f64 * (1.0 - q).log2();
                    prob += lp.exp2();
                    spread = spread.max((-lp / n as f64 - h).abs());
                }
            }
            let nf = n as f64;
            let lower = prob * (nf * (h - spread)).exp2();
            let upper = (nf * (h + spread)).exp2();
            let s = size as f64;
            ensure((st.size - s).abs() < 1e-6, || format!("p={q} eps={eps}: size {} vs {size}", st.size))?;
            ensure(lower <= s * (1.0 + 1e-12) && s <= upper * (1.0 + 1e-12), || {
                format!("p={q} eps={eps}: {size} outside [{lower:.2}, {upper:.2}]")
            })?;
            ensure(st.sandwich_holds(), || format!("p={q} eps={eps}: library sandwich fails"))?;
        }
    }
    Ok(format!("coverage {cov:.4} at n=200; sandwich exhaustive at n=12 for 9 (p, eps)"))
}

// ---------------------------------------------------------------- AC6

const EPISODES: usize = 500;

fn seq(a: &Alphabet, s: &[usize]) -> Sequence {
    Sequence::new(a.clone(), s.to_vec()).unwrap()
}

/// Joint typicality of named columns against the marginal of `joint`.
fn typical(joint: &JointPmf, cols: &[(&str, &[usize])], eps: f64) -> bool {
    let names: Vec<&str> = cols.iter().map(|c| c.0).collect();
    let m = joint.marginalize(&names).unwrap();
    let seqs: Vec<Sequence> = cols.iter().map(|(n, s)| seq(m.axis(n).unwrap(), s)).collect();
    let refs: Vec<&Sequence> = seqs.iter().collect();
    is_jointly_typical(&refs, &m, eps).unwrap()
}

fn all_sequences(k: usize, n: usize) -> Vec<Vec<usize>> {
    (0..k.pow(n as u32))
        .map(|mut i| {
            let mut v = vec![0; n];
            for d in v.iter_mut().rev() {
                *d = i % k;
                i /= k;
            }
            v
        })
        .collect()
}

fn verdict<T>(found: Vec<T>) -> Decoded<T> {
    let mut found = found;
    match found.len() {
        0 => Decoded::NoCandidate,
        1 => Decoded::Unique(found.pop().unwrap()),
        _ => Decoded::Ambiguous,
    }
}

fn draw(rng: &mut ChaCha8Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

/// Feeds named columns to a kernel in its input order.
fn through(k: &Kernel, cols: &[(&str, &[usize])], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let seqs: Vec<Sequence> = k
        .inputs()
        .iter()
        .map(|a| seq(a, cols.iter().find(|c| c.0 == a.name()).unwrap().1))
        .collect();
    let refs: Vec<&Sequence> = seqs.iter().collect();
    sample_channel(k, &refs, rng).unwrap().symbols().to_vec()
}

#[derive(Default, Debug)]
struct Tally {
    unique: usize,
    none: usize,
    ambiguous: usize,
}

impl Tally {
    fn add<T>(&mut self, d: &Decoded<T>) {
        match d {
            Decoded::Unique(_) => self.unique += 1,
            Decoded::NoCandidate => self.none += 1,
            Decoded::Ambiguous => self.ambiguous += 1,
        }
    }
}

fn witness(problem: &Problem, cfg: &SearchConfig, pick: impl Fn(&RatePoint) -> f64) -> FeasibleTuple {
    let region = compute_region(problem, cfg).unwrap();
    region
        .witnesses
        .iter()
        .max_by(|a, b| pick(&a.point).total_cmp(&pick(&b.point)))
        .unwrap()
        .tuple
        .clone()
}

fn aux2() -> SearchConfig {
    let mut c = SearchConfig::default();
    c.aux.u = Some(2);
    c
}

fn ac6_mac(name: &str, n: usize, m: usize, eps_set: &[(f64, f64)]) -> Result<Tally, String> {
    let problem = fixture(name);
    let p = as_mac(&problem);
    let FeasibleTuple::Mac(t) = witness(&problem, &SearchConfig::default(), |v| v.r1 + v.r2) else {
        unreachable!()
    };
    let cb = MacCodebook::new(p, &t, n, m, m, 17).map_err(|e| e.to_string())?;
    let joint = cb.joint().clone();
    let q = cb.time_sharing().to_vec();
    let hosts = all_sequences(2, n);
    let mut rng = rng(6001);
    let mut tally = Tally::default();
    for (k, &(eps, eps1)) in eps_set.iter().enumerate() {
        let dec = MacDecoder::new(&cb, eps, eps1, DEFAULT_DECODE_BUDGET).map_err(|e| e.to_string())?;
        let share = EPISODES / eps_set.len() + usize::from(k < EPISODES % eps_set.len());
        for _ in 0..share {
            let (mut s1, mut s2) = (vec![], vec![]);
            for _ in 0..n {
                let c = draw(&mut rng, p.host().probs());
                s1.push(c / 2);
                s2.push(c % 2);
            }
            let (w1, w2) = (rng.random_range(0..m), rng.random_range(0..m));
            let x1 = mac_case_c_encode(&cb, 0, &s1, w1);
            let x2 = mac_case_c_encode(&cb, 1, &s2, w2);
            let y = through(p.channel(), &[("X1", &x1), ("S1", &s1), ("X2", &x2), ("S2", &s2)], &mut rng);
            let got = dec.decode(&cb, &y).map_err(|e| e.to_string())?;

            let mut found = Vec::new();
            'all: for a in &hosts {
                for b in &hosts {
                    if !typical(&joint, &[("Q", &q), ("S1", a), ("S2", b)], eps1) {
                        continue;
                    }
                    for v1 in 0..m {
                        let c1 = cb.codeword(0, a, v1);
                        for v2 in 0..m {
                            let c2 = cb.codeword(1, b, v2);
                            let cols = [("Q", &q[..]), ("S1", a), ("S2", b), ("X1", &c1), ("X2", &c2), ("Y", &y)];
                            if typical(&joint, &cols, eps) {
                                found.push(MacDecoded { w1: v1, w2: v2, s1: a.clone(), s2: b.clone() });
                                if found.len() > 1 {
                                    break 'all;
                                }
                            }
                        }
                    }
                }
            }
            let want = verdict(found);
            ensure(got == want, || format!("mac-c eps {eps}: decoder {got:?} vs oracle {want:?}"))?;
            tally.add(&got);
        }
    }
    Ok(tally)
}

fn ac6_bc_b(n: usize, m2: usize, eps: f64) -> Result<Tally, String> {
    let problem = fixture("bc_b_noisy");
    let p = as_bc(&problem);
    // the sum-rate witness has a constant U, which makes every pool entry equal
    let FeasibleTuple::Bc(t) = witness(&problem, &aux2(), |v| v.r2) else { unreachable!() };
    let cb = BcBinnedCodebook::new(p, &t, n, 2, m2, eps, 23).map_err(|e| e.to_string())?;
    let dec = BcDecoderB::new(&cb, eps, DEFAULT_DECODE_BUDGET).map_err(|e| e.to_string())?;
    let joint = cb.joint().clone();
    let hosts = all_sequences(2, n);
    let mut rng = rng(6002);
    let mut tally = Tally::default();
    let mut failures = 0;
    for _ in 0..EPISODES {
        let s: Vec<usize> = (0..n).map(|_| draw(&mut rng, p.host().probs())).collect();
        let (w1, w2) = (rng.random_range(0..2), rng.random_range(0..m2));
        let enc = bc_case_b_encode(&cb, &s, w1, w2, eps).map_err(|e| e.to_string())?;
        failures += usize::from(enc.failed);
        let y = through(p.forward(), &[("X", &enc.x), ("S", &s)], &mut rng);
        let z = through(p.degrade(), &[("Y", &y)], &mut rng);

        let pool = |test: &[usize], name: &str| {
            verdict(
                (0..cb.pool_len())
                    .filter(|&j| typical(&joint, &[("U", cb.pool(j)), (name, test)], eps))
                    .take(2)
                    .collect(),
            )
        };
        let want1 = match pool(&y, "Y") {
            Decoded::Unique(j) => {
                let u = cb.pool(j);
                let mut found = Vec::new();
                'all: for h in &hosts {
                    if !typical(&joint, &[("S", h), ("U", u)], eps) {
                        continue;
                    }
                    for v1 in 0..2 {
                        let x = cb.codeword(h, j, v1);
                        if typical(&joint, &[("S", h), ("U", u), ("X", &x), ("Y", &y)], eps) {
                            found.push(BinnedDecoded { w1: v1, w2: j / cb.bin_size(), pool_index: j, s: h.clone() });
                            if found.len() > 1 {
                                break 'all;
                            }
                        }
                    }
                }
                verdict(found)
            }
            Decoded::NoCandidate => Decoded::NoCandidate,
            Decoded::Ambiguous => Decoded::Ambiguous,
        };
        let got1 = dec.decode1(&cb, &y);
        ensure(got1 == want1, || format!("bc-b decoder 1: {got1:?} vs oracle {want1:?}"))?;
        let want2 = match pool(&z, "Z") {
            Decoded::Unique(j) => Decoded::Unique(j / cb.bin_size()),
            other => other,
        };
        let got2 = dec.decode2(&cb, &z);
        ensure(got2 == want2, || format!("bc-b decoder 2: {got2:?} vs oracle {want2:?}"))?;
        tally.add(&got1);
        tally.add(&got2);
    }
    ensure(failures < EPISODES, || "every B′ encoding failed".into())?;
    Ok(tally)
}

fn ac6_bc_c(n: usize, eps: f64, eps1: f64) -> Result<Tally, String> {
    let problem = fixture("bc_c_noisy");
    let p = as_bc(&problem);
    let FeasibleTuple::Bc(t) = witness(&problem, &aux2(), |v| v.r1 + v.r2) else { unreachable!() };
    let cb = BcSuperpositionCodebook::new(p, &t, n, 2, 2, 29).map_err(|e| e.to_string())?;
    let dec = BcDecoderC::new(&cb, eps, eps1, DEFAULT_DECODE_BUDGET).map_err(|e| e.to_string())?;
    let joint = cb.joint().clone();
    let typical_hosts: Vec<Vec<usize>> = all_sequences(2, n)
        .into_iter()
        .filter(|h| is_strongly_typical(&seq(p.host().alphabet(), h), p.host(), eps1))
        .collect();
    let mut rng = rng(6003);
    let mut tally = Tally::default();
    for _ in 0..EPISODES {
        let s: Vec<usize> = (0..n).map(|_| draw(&mut rng, p.host().probs())).collect();
        let (w1, w2) = (rng.random_range(0..2), rng.random_range(0..2));
        let x = bc_case_c_encode(&cb, &s, w1, w2);
        let y = through(p.forward(), &[("X", &x), ("S", &s)], &mut rng);
        let z = through(p.degrade(), &[("Y", &y)], &mut rng);

        let clouds = |out: &[usize], name: &str| {
            let mut found = Vec::new();
            'all: for h in &typical_hosts {
                for v2 in 0..2 {
                    if typical(&joint, &[("S", h), ("U", &cb.cloud_centre(h, v2)), (name, out)], eps) {
                        found.push((h.clone(), v2));
                        if found.len() > 1 {
                            break 'all;
                        }
                    }
                }
            }
            verdict(found)
        };
        let want1 = match clouds(&y, "Y") {
            Decoded::Unique((h, v2)) => {
                let u = cb.cloud_centre(&h, v2);
                let found: Vec<usize> = (0..2)
                    .filter(|&v1| {
                        let x = cb.codeword(&h, v2, v1);
                        typical(&joint, &[("S", &h), ("U", &u), ("X", &x), ("Y", &y)], eps)
                    })
                    .collect();
                match verdict(found) {
                    Decoded::Unique(v1) => Decoded::Unique(SuperpositionDecoded { w1: Some(v1), w2: v2, s: h }),
                    Decoded::NoCandidate => Decoded::NoCandidate,
                    Decoded::Ambiguous => Decoded::Ambiguous,
                }
            }
            Decoded::NoCandidate => Decoded::NoCandidate,
            Decoded::Ambiguous => Decoded::Ambiguous,
        };
        let got1 = dec.decode1(&cb, &y);
        ensure(got1 == want1, || format!("bc-c decoder 1: {got1:?} vs oracle {want1:?}"))?;
        let want2 = match clouds(&z, "Z") {
            Decoded::Unique((h, v2)) => Decoded::Unique(SuperpositionDecoded { w1: None, w2: v2, s: h }),
            Decoded::NoCandidate => Decoded::NoCandidate,
            Decoded::Ambiguous => Decoded::Ambiguous,
        };
        let got2 = dec.decode2(&cb, &z);
        ensure(got2 == want2, || format!("bc-c decoder 2: {got2:?} vs oracle {want2:?}"))?;
        tally.add(&got1);
        tally.add(&got2);
    }
    Ok(tally)
}

fn ac6() -> Verdict {
    let start = Instant::now();
    // Small n keeps the oracles exhaustive; eps is large because a cell's
    // count tolerance is n·eps/K.
    let mac = ac6_mac("mac_xor_noisy", 4, 2, &[(8.0, 0.5)])?;
    let bb = ac6_bc_b(4, 2, 0.5)?;
    let bcc = ac6_bc_c(4, 2.0, 1.0)?;
    for (name, t) in [("mac-c", &mac), ("bc-b", &bb), ("bc-c", &bcc)] {
        ensure(t.unique > 0 && t.none + t.ambiguous > 0, || format!("{name} outcomes not varied: {t:?}"))?;
    }
    within(start, Duration::from_secs(120), "decoder-oracle runs")?;
    Ok(format!("500 episodes each; outcomes (unique/none/ambiguous) mac-c {mac:?}, bc-b {bb:?}, bc-c {bcc:?}"))
}

// ---------------------------------------------------------------- AC7

struct Ordering7 {
    fixture: &'static str,
    scheme: Scheme,
    eps: f64,
    eps1: f64,
    aux_u: Option<usize>,
}

fn ac7() -> Verdict {
    let cases = [
        Ordering7 { fixture: "mac_clean_square", scheme: Scheme::MacC, eps: 32.0, eps1: 1.0, aux_u: None },
        Ordering7 { fixture: "mac_bsc_single", scheme: Scheme::MacC, eps: 0.5, eps1: 0.1, aux_u: None },
        Ordering7 { fixture: "bc_c_clean", scheme: Scheme::BcC, eps: 16.0, eps1: 1.0, aux_u: Some(2) },
    ];
    let mut lines = Vec::new();
    for c in cases {
        let problem = fixture(c.fixture);
        let mut cfg = SearchConfig::default();
        cfg.aux.u = c.aux_u;
        let region = compute_region(&problem, &cfg).map_err(|e| e.to_string())?;
        // push along the r1 axis from the rightmost vertex on it
        let w = region
            .witnesses
            .iter()
            .filter(|w| w.point.r2.abs() < 1e-12)
            .max_by(|a, b| a.point.r1.total_cmp(&b.point.r1))
            .ok_or("no vertex on the r1 axis")?;
        let edge = w.point.r1;
        let inside = RatePoint::new(edge - 0.15, 0.0);
        let outside = RatePoint::new(edge + 0.15, 0.0);
        ensure(contains(&region, inside, 1e-9), || format!("{}: {inside:?} not inside", c.fixture))?;
        let gap = distance_outside(&region, outside);
        ensure((gap - 0.15).abs() < 1e-9, || format!("{}: outside point is {gap} away", c.fixture))?;
        let run = |pt: RatePoint| -> Result<SimReport, String> {
            let sim = SimConfig::new(10, pt.r1, pt.r2).with_trials(300).with_eps(c.eps, c.eps1).with_seed(77);
            simulate(&problem, c.scheme, &w.tuple, &sim).map_err(|e| e.to_string())
        };
        let (a, b) = (run(inside)?, run(outside)?);
        ensure(a.empirical_error < b.empirical_error, || {
            format!("{}: inside {:.3} not below outside {:.3}", c.fixture, a.empirical_error, b.empirical_error)
        })?;
        lines.push(format!("{} {:.3}<{:.3}", c.fixture, a.empirical_error, b.empirical_error));
    }
    Ok(lines.join(", "))
}

// ---------------------------------------------------------------- AC8

fn ac8() -> Verdict {
    let jobs = |_: ()| -> Result<(Vec<SimReport>, Vec<String>), String> {
        let mut reports = Vec::new();
        let square = fixture("mac_clean_square");
        let region = compute_region(&square, &SearchConfig::default()).map_err(|e| e.to_string())?;
        let t = region.witnesses[2].tuple.clone();
        let sim = SimConfig::new(8, 0.5, 0.5).with_trials(200).with_eps(32.0, 1.0).with_seed(9);
        reports.push(simulate(&square, Scheme::MacC, &t, &sim).map_err(|e| e.to_string())?);

        let bb = fixture("bc_b_noisy");
        let t = witness(&bb, &aux2(), |v| v.r1 + v.r2);
        let sim = SimConfig::new(4, 0.25, 0.25).with_trials(200).with_eps(1.0, 0.5).with_seed(9);
        reports.push(simulate(&bb, Scheme::BcB, &t, &sim).map_err(|e| e.to_string())?);

        let bc = fixture("bc_c_clean");
        let t = witness(&bc, &aux2(), |v| v.r1);
        let sim = SimConfig::new(10, 0.8, 0.0).with_trials(200).with_eps(16.0, 1.0).with_seed(9);
        reports.push(simulate(&bc, Scheme::BcC, &t, &sim).map_err(|e| e.to_string())?);

        let mut csvs = Vec::new();
        for name in ["mac_xor_noisy", "mac_mixture", "bc_c_noisy"] {
            let r = compute_region(&fixture(name), &aux2()).map_err(|e| e.to_string())?;
            csvs.push(region_csv(&r));
        }
        Ok((reports, csvs))
    };
    let mut outputs = Vec::new();
    for threads in [1, 2, 8] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
        outputs.push(pool.install(|| jobs(()))?);
    }
    for (k, o) in outputs.iter().enumerate().skip(1) {
        ensure(o.0 == outputs[0].0, || format!("SimReports differ between 1 and {} threads", [1, 2, 8][k]))?;
        ensure(o.1 == outputs[0].1, || format!("region CSVs differ between 1 and {} threads", [1, 2, 8][k]))?;
    }
    Ok("3 SimReports and 3 region CSVs identical at 1, 2, 8 threads".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC1", "bound evaluators vs full-joint oracle", ac1),
        ("AC2", "region vs 1/16 brute-force sweep", ac2),
        ("AC3", "closed forms", ac3),
        ("AC4", "structural checks on seeded instances", ac4),
        ("AC5", "typicality coverage and sandwich", ac5),
        ("AC6", "decoders vs exhaustive enumerators", ac6),
        ("AC7", "rate ordering inside vs outside", ac7),
        ("AC8", "determinism across thread counts", ac8),
    ];
    let mut failed = 0;
    for (id, what, f) in criteria {
        let start = Instant::now();
        let v = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let t = start.elapsed().as_secs_f64();
        match v {
            Ok(detail) => println!("PASS {id} {what} ({t:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id} {what} ({t:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 8 criteria failed");
        std::process::exit(1);
    }
    println!("all 8 criteria passed");
}
