//! Helpers shared by the integration tests: fixture loading and a naive
//! dense-table probability model used as an independent oracle.
#![allow(dead_code)]

use std::path::PathBuf;

use embedcap::cli::spec::parse_spec;
use embedcap::prob::{Alphabet, DistortionMeasure, JointPmf, Kernel, Pmf};
use embedcap::regions::{BcCase, BcProblem, MacCase, MacProblem, Problem};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.toml"))
}

pub fn fixture(name: &str) -> Problem {
    parse_spec(&fixture_path(name)).expect("fixture parses").problem
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A pmf with uniform random weights, floored so no cell is exactly 0.
pub fn random_pmf(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.02).collect();
    let t: f64 = w.iter().sum();
    w.into_iter().map(|x| x / t).collect()
}

/// `rows` independent random rows of width `k`, flattened.
pub fn random_rows(rng: &mut ChaCha8Rng, rows: usize, k: usize) -> Vec<f64> {
    (0..rows).flat_map(|_| random_pmf(rng, k)).collect()
}

pub fn bin(name: &str) -> Alphabet {
    Alphabet::new(name, 2).unwrap()
}

/// Random binary MAC with Hamming distortion; `delta = 1` is always feasible.
pub fn random_binary_mac(rng: &mut ChaCha8Rng, case: MacCase, delta: f64) -> MacProblem {
    let host = JointPmf::new(vec![bin("S1"), bin("S2")], random_pmf(rng, 4)).unwrap();
    let channel = Kernel::new(
        vec![bin("X1"), bin("S1"), bin("X2"), bin("S2")],
        vec![bin("Y")],
        random_rows(rng, 16, 2),
    )
    .unwrap();
    MacProblem::new(
        host,
        channel,
        DistortionMeasure::hamming(&bin("S1"), &bin("X1")).unwrap(),
        DistortionMeasure::hamming(&bin("S2"), &bin("X2")).unwrap(),
        delta,
        delta,
        case,
    )
    .unwrap()
}

pub fn random_binary_bc(rng: &mut ChaCha8Rng, case: BcCase, delta: f64) -> BcProblem {
    let p = 0.05 + 0.4 * rng.random::<f64>();
    let forward = Kernel::new(vec![bin("X"), bin("S")], vec![bin("Y")], random_rows(rng, 4, 2)).unwrap();
    let flip = 0.05 + 0.3 * rng.random::<f64>();
    let degrade = Kernel::bsc(&bin("Y"), "Z", flip).unwrap();
    BcProblem::new(
        Pmf::bernoulli("S", p).unwrap(),
        forward,
        degrade,
        DistortionMeasure::hamming(&bin("S"), &bin("X")).unwrap(),
        delta,
        case,
    )
    .unwrap()
}

pub fn as_mac(p: &Problem) -> &MacProblem {
    match p {
        Problem::Mac(m) => m,
        Problem::Bc(_) => panic!("expected a MAC problem"),
    }
}

pub fn as_bc(p: &Problem) -> &BcProblem {
    match p {
        Problem::Bc(b) => b,
        Problem::Mac(_) => panic!("expected a broadcast problem"),
    }
}

/// Dense table over named axes, row-major, built with plain loops.
#[derive(Clone, Debug)]
pub struct Table {
    pub names: Vec<&'static str>,
    pub sizes: Vec<usize>,
    pub p: Vec<f64>,
}

impl Table {
    pub fn new(names: Vec<&'static str>, sizes: Vec<usize>) -> Self {
        let cells = sizes.iter().product();
        Table { names, sizes, p: vec![0.0; cells] }
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.sizes).fold(0, |acc, (d, s)| acc * s + d)
    }

    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for (o, s) in out.iter_mut().zip(&self.sizes).rev() {
            *o = idx % s;
            idx /= s;
        }
        out
    }

    fn pos(&self, name: &str) -> usize {
        self.names.iter().position(|n| *n == name).unwrap_or_else(|| panic!("no axis {name}"))
    }

    /// `H` of the named variables, summing the table into a hash of
    /// projected digits.
    pub fn h(&self, vars: &[&str]) -> f64 {
        let pos: Vec<usize> = vars.iter().map(|v| self.pos(v)).collect();
        let mut acc = std::collections::HashMap::<Vec<usize>, f64>::new();
        for (i, &p) in self.p.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let d = self.digits(i);
            *acc.entry(pos.iter().map(|&k| d[k]).collect()).or_default() += p;
        }
        acc.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
    }

    /// `I(a; b | c)`
    pub fn mi(&self, a: &[&str], b: &[&str], c: &[&str]) -> f64 {
        fn cat<'a>(xs: &[&[&'a str]]) -> Vec<&'a str> {
            xs.iter().flat_map(|x| x.iter().copied()).collect()
        }
        self.h(&cat(&[a, c])) + self.h(&cat(&[b, c])) - self.h(&cat(&[a, b, c])) - self.h(c)
    }

    /// `H(a | c)`
    pub fn hc(&self, a: &[&str], c: &[&str]) -> f64 {
        let ac: Vec<&str> = a.iter().chain(c).copied().collect();
        self.h(&ac) - self.h(c)
    }
}

/// Largest `λ·r1 + (1−λ)·r2` over `{r ≥ 0 : r1 ≤ b1, r2 ≤ b2, r1 + r2 ≤ c}`;
/// `None` when a bound is negative.
pub fn pentagon_support(b1: f64, b2: f64, c: f64, lambda: f64) -> Option<f64> {
    if b1 < -1e-9 || b2 < -1e-9 || c < -1e-9 {
        return None;
    }
    let (b1, b2, c) = (b1.max(0.0), b2.max(0.0), c.max(0.0));
    let a1 = b1.min(c);
    let a2 = b2.min(c);
    let corners = [
        (0.0, 0.0),
        (a1, 0.0),
        (a1, a2.min(c - a1)),
        (a1.min(c - a2), a2),
        (0.0, a2),
    ];
    corners
        .iter()
        .map(|&(x, y)| lambda * x + (1.0 - lambda) * y)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
}

/// Binary entropy in bits.
pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}
