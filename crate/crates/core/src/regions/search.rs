//! Feasible-tuple search.
//!
//! Each (case, bound) pair is compiled into a dense model of the
//! `Q`-free full joint: fixed weights per cell (host × channel laws), a
//! list of free conditional tables ("factors"), the joint-entropy subsets
//! the bounds need, and the distortion constraints as linear functionals
//! of one factor. A candidate assigns one simplex-grid point to every row
//! of every factor; candidates are enumerated by a flat mixed-radix index
//! split into fixed-size chunks, so the outcome does not depend on the
//! number of worker threads. The best candidate for each refinement angle
//! is then improved by pairwise mass moves, and the convex hull of all
//! resulting rate polytopes is the region (the hull plays the role of the
//! time-sharing variable).

use rayon::prelude::*;

use super::hull::{convex_hull, support, Origin, Tagged};
use super::{
    bounds, eval_tuple, trivial_q, BcCase, BcFeasibleTuple, BcProblem, BoundKind, Bounds,
    FeasibleTuple, MacCase, MacFeasibleTuple, MacProblem, Problem, RatePoint, RateRegion, Witness,
    DISTORTION_TOL,
};
use crate::error::{Error, Result};
use crate::prob::{
    checked_cells, projection, unflatten, Alphabet, DistortionMeasure, JointPmf, Kernel,
};
use crate::typicality::for_each_type;

const CHUNK: u128 = 1 << 12;
const MIN_MOVE: f64 = 1e-5;
const MAX_SWEEPS: usize = 200;

/// Optional overrides of auxiliary alphabet sizes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AuxSizes {
    pub u1: Option<usize>,
    pub u2: Option<usize>,
    pub u: Option<usize>,
    pub v: Option<usize>,
    pub w: Option<usize>,
}

/// Search parameters for [`compute_region`].
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub bound: BoundKind,
    /// Grid denominator `m` (step `1/m`); `None` picks 8 for full joints of
    /// at most 256 cells and 4 beyond.
    pub step: Option<u32>,
    pub aux: AuxSizes,
    /// Refuse searches with more grid candidates than this.
    pub max_candidates: u128,
    pub refine: bool,
    /// Angles at which the best grid candidate is locally improved.
    pub refine_lambdas: Vec<f64>,
    /// Angles reported in [`RateRegion::support_samples`].
    pub support_lambdas: Vec<f64>,
    /// Extra tuples whose polytopes join the hull (evaluated exactly,
    /// skipped when they violate the distortion budget).
    pub seeds: Vec<FeasibleTuple>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            bound: BoundKind::Inner,
            step: None,
            aux: AuxSizes::default(),
            max_candidates: 20_000_000,
            refine: true,
            refine_lambdas: (0..=8).map(|i| i as f64 / 8.0).collect(),
            support_lambdas: (0..=20).map(|i| i as f64 / 20.0).collect(),
            seeds: Vec::new(),
        }
    }
}

impl SearchConfig {
    pub fn with_bound(mut self, bound: BoundKind) -> Self {
        self.bound = bound;
        self
    }

    pub fn with_step(mut self, m: u32) -> Self {
        self.step = Some(m);
        self
    }
}

#[derive(Clone, Debug)]
struct FactorDef {
    inputs: Vec<Alphabet>,
    outputs: Vec<Alphabet>,
    rows: usize,
    cols: usize,
}

#[derive(Clone, Debug)]
struct Constraint {
    factor: usize,
    weights: Vec<f64>,
    delta: f64,
}

#[derive(Clone, Copy, Debug)]
enum Shape {
    MacSeparate,
    MacJoint,
    Bc,
}

/// A compiled search model.
struct Family {
    base: Vec<f64>,
    factors: Vec<FactorDef>,
    entries: Vec<Vec<u32>>,
    subsets: Vec<(Vec<u32>, usize)>,
    exprs: Vec<Vec<(f64, Vec<(f64, usize)>)>>,
    constraints: Vec<Constraint>,
    shape: Shape,
    full_cells: usize,
}

struct Scratch {
    probs: Vec<f64>,
    marg: Vec<f64>,
    ent: Vec<f64>,
}

impl Family {
    /// `fixed` tables are given over named axes in row-major order.
    fn build(
        axes: Vec<Alphabet>,
        fixed: Vec<(Vec<&str>, Vec<f64>)>,
        factors: Vec<(Vec<&str>, Vec<&str>)>,
        exprs: &[bounds::BoundExpr],
        constraints: Vec<(usize, &DistortionMeasure, f64, &JointPmf)>,
        shape: Shape,
    ) -> Result<Family> {
        let sizes: Vec<usize> = axes.iter().map(Alphabet::size).collect();
        let full_cells = checked_cells(sizes.iter().copied())?;
        let pos = |name: &str| -> usize {
            axes.iter()
                .position(|a| a.name() == name)
                .expect("family axis")
        };
        let mut base = vec![1.0; full_cells];
        for (names, table) in &fixed {
            let keep: Vec<usize> = names.iter().map(|n| pos(n)).collect();
            let map = projection(&sizes, &keep);
            for (b, &m) in base.iter_mut().zip(&map) {
                *b *= table[m];
            }
        }
        let live: Vec<usize> = (0..full_cells).filter(|&i| base[i] > 0.0).collect();
        let base_live: Vec<f64> = live.iter().map(|&i| base[i]).collect();

        let mut defs = Vec::new();
        let mut entries = Vec::new();
        for (ins, outs) in &factors {
            let keep: Vec<usize> = ins.iter().chain(outs).map(|n| pos(n)).collect();
            let map = projection(&sizes, &keep);
            entries.push(live.iter().map(|&i| map[i] as u32).collect());
            let inputs: Vec<Alphabet> = ins.iter().map(|n| axes[pos(n)].clone()).collect();
            let outputs: Vec<Alphabet> = outs.iter().map(|n| axes[pos(n)].clone()).collect();
            defs.push(FactorDef {
                rows: inputs.iter().map(Alphabet::size).product(),
                cols: outputs.iter().map(Alphabet::size).product(),
                inputs,
                outputs,
            });
        }

        let present = |v: &str| axes.iter().any(|a| a.name() == v);
        let mut subset_keys: Vec<Vec<usize>> = Vec::new();
        let mut compiled = Vec::new();
        for expr in exprs {
            let mut terms = Vec::new();
            for (sign, term) in expr.iter() {
                let mut parts = Vec::new();
                for (coef, vars) in bounds::entropy_sets(term, &present) {
                    let mut key: Vec<usize> = vars.iter().map(|v| pos(v)).collect();
                    key.sort_unstable();
                    key.dedup();
                    let idx = match subset_keys.iter().position(|k| *k == key) {
                        Some(i) => i,
                        None => {
                            subset_keys.push(key);
                            subset_keys.len() - 1
                        }
                    };
                    parts.push((coef, idx));
                }
                terms.push((*sign, parts));
            }
            compiled.push(terms);
        }
        let subsets = subset_keys
            .iter()
            .map(|key| {
                let map = projection(&sizes, key);
                let size: usize = key.iter().map(|&k| sizes[k]).product();
                (live.iter().map(|&i| map[i] as u32).collect(), size)
            })
            .collect();

        let mut cons = Vec::new();
        for (f, d, delta, host) in constraints {
            let def = &defs[f];
            let in_names: Vec<&str> = def.inputs.iter().map(Alphabet::name).collect();
            let p_in = host.marginalize(&in_names)?;
            let in_sizes: Vec<usize> = def.inputs.iter().map(Alphabet::size).collect();
            let out_sizes: Vec<usize> = def.outputs.iter().map(Alphabet::size).collect();
            let s_pos = in_names
                .iter()
                .position(|n| *n == d.host().name())
                .expect("host axis in factor inputs");
            let x_pos = def
                .outputs
                .iter()
                .position(|a| a.name() == d.embed().name())
                .expect("embed axis in factor outputs");
            let mut weights = Vec::with_capacity(def.rows * def.cols);
            for r in 0..def.rows {
                let s = unflatten(r, &in_sizes)[s_pos];
                for c in 0..def.cols {
                    let x = unflatten(c, &out_sizes)[x_pos];
                    weights.push(p_in.probs()[r] * d.get(s, x));
                }
            }
            cons.push(Constraint {
                factor: f,
                weights,
                delta,
            });
        }

        Ok(Family {
            base: base_live,
            factors: defs,
            entries,
            subsets,
            exprs: compiled,
            constraints: cons,
            shape,
            full_cells,
        })
    }

    fn scratch(&self) -> Scratch {
        let max = self.subsets.iter().map(|s| s.1).max().unwrap_or(1);
        Scratch {
            probs: vec![0.0; self.base.len()],
            marg: vec![0.0; max],
            ent: vec![0.0; self.subsets.len()],
        }
    }

    fn evaluate(&self, theta: &[Vec<f64>], sc: &mut Scratch) -> Bounds {
        for (i, p) in sc.probs.iter_mut().enumerate() {
            let mut v = self.base[i];
            for (f, t) in theta.iter().enumerate() {
                v *= t[self.entries[f][i] as usize];
            }
            *p = v;
        }
        for (s, (map, size)) in self.subsets.iter().enumerate() {
            let marg = &mut sc.marg[..*size];
            marg.iter_mut().for_each(|m| *m = 0.0);
            for (&m, &p) in map.iter().zip(&sc.probs) {
                marg[m as usize] += p;
            }
            let h: f64 = marg
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| -p * p.log2())
                .sum();
            sc.ent[s] = h;
        }
        let mut vals = [0.0; 3];
        for (k, expr) in self.exprs.iter().enumerate() {
            let mut total = 0.0;
            for (sign, parts) in expr {
                let t: f64 = parts.iter().map(|(c, s)| c * sc.ent[*s]).sum();
                total += sign * t.max(0.0);
            }
            vals[k] = total;
        }
        Bounds::from_values(&vals[..self.exprs.len()])
    }

    fn feasible(&self, theta: &[Vec<f64>]) -> bool {
        self.constraints.iter().all(|c| {
            let e: f64 = c
                .weights
                .iter()
                .zip(&theta[c.factor])
                .map(|(w, t)| w * t)
                .sum();
            e <= c.delta + DISTORTION_TOL
        })
    }

    fn to_tuple(&self, theta: &[Vec<f64>]) -> Result<FeasibleTuple> {
        let kernel = |f: usize| {
            Kernel::new(
                self.factors[f].inputs.clone(),
                self.factors[f].outputs.clone(),
                theta[f].clone(),
            )
        };
        Ok(match self.shape {
            Shape::MacSeparate => FeasibleTuple::Mac(MacFeasibleTuple {
                q: trivial_q(),
                encoders: super::MacEncoders::Separate {
                    enc1: kernel(0)?,
                    enc2: kernel(1)?,
                },
            }),
            Shape::MacJoint => FeasibleTuple::Mac(MacFeasibleTuple {
                q: trivial_q(),
                encoders: super::MacEncoders::Joint { enc: kernel(0)? },
            }),
            Shape::Bc => FeasibleTuple::Bc(BcFeasibleTuple { enc: kernel(0)? }),
        })
    }
}

fn kernel_table(k: &Kernel) -> (Vec<&str>, Vec<f64>) {
    let names = k
        .inputs()
        .iter()
        .chain(k.outputs())
        .map(Alphabet::name)
        .collect();
    (names, k.probs().to_vec())
}

fn aux(name: &str, size: usize) -> Result<Alphabet> {
    Alphabet::new(name, size)
}

fn mac_family(p: &MacProblem, cfg: &SearchConfig) -> Result<Family> {
    let s1 = p.alphabet("S1")?;
    let s2 = p.alphabet("S2")?;
    let x1 = p.alphabet("X1")?;
    let x2 = p.alphabet("X2")?;
    let y = p.alphabet("Y")?;
    let u1 = cfg.aux.u1.unwrap_or(x1.size() * s1.size());
    let u2 = cfg.aux.u2.unwrap_or(x2.size() * s2.size());
    let host_table = (vec!["S1", "S2"], p.host().probs().to_vec());
    let fixed = vec![host_table, kernel_table(p.channel())];
    let d1 = (p.d1(), p.delta1());
    let d2 = (p.d2(), p.delta2());
    let host = p.host();
    match (p.case(), cfg.bound) {
        (MacCase::A, BoundKind::Inner) => Family::build(
            vec![s1, s2, aux("U1", u1)?, x1, aux("U2", u2)?, x2, y],
            fixed,
            vec![(vec!["S1"], vec!["U1", "X1"]), (vec!["S2"], vec!["U2", "X2"])],
            &bounds::MAC_A,
            vec![(0, d1.0, d1.1, host), (1, d2.0, d2.1, host)],
            Shape::MacSeparate,
        ),
        (MacCase::B, BoundKind::Inner) => Family::build(
            vec![s1, s2, aux("U1", u1)?, x1, x2, y],
            fixed,
            vec![(vec!["S1"], vec!["U1", "X1"]), (vec!["S2"], vec!["X2"])],
            &bounds::MAC_B,
            vec![(0, d1.0, d1.1, host), (1, d2.0, d2.1, host)],
            Shape::MacSeparate,
        ),
        (MacCase::C, BoundKind::Inner) => Family::build(
            vec![s1, s2, x1, x2, y],
            fixed,
            vec![(vec!["S1"], vec!["X1"]), (vec!["S2"], vec!["X2"])],
            &bounds::MAC_C,
            vec![(0, d1.0, d1.1, host), (1, d2.0, d2.1, host)],
            Shape::MacSeparate,
        ),
        (MacCase::C, BoundKind::Outer) => Family::build(
            vec![s1, s2, x1, x2, y],
            fixed,
            vec![(vec!["S1", "S2"], vec!["X1", "X2"])],
            &bounds::MAC_C,
            vec![(0, d1.0, d1.1, host), (0, d2.0, d2.1, host)],
            Shape::MacJoint,
        ),
        (c, BoundKind::Outer) => Err(Error::InvalidParameter(format!(
            "{c} has only an inner bound"
        ))),
    }
}

fn bc_family(p: &BcProblem, cfg: &SearchConfig) -> Result<Family> {
    let s = p.alphabet("S")?;
    let x = p.alphabet("X")?;
    let y = p.alphabet("Y")?;
    let z = p.alphabet("Z")?;
    let k = x.size() * s.size();
    let host = JointPmf::from_pmf(p.host());
    let fixed = vec![
        (vec!["S"], p.host().probs().to_vec()),
        kernel_table(p.forward()),
        kernel_table(p.degrade()),
    ];
    let cons = vec![(0, p.d(), p.delta(), &host)];
    let build = |aux_axes: Vec<Alphabet>, exprs: &[bounds::BoundExpr]| -> Result<Family> {
        let mut axes = vec![s.clone()];
        axes.extend(aux_axes.iter().cloned());
        axes.extend([x.clone(), y.clone(), z.clone()]);
        let mut outs: Vec<&str> = aux_axes.iter().map(Alphabet::name).collect();
        outs.push("X");
        Family::build(
            axes,
            fixed.clone(),
            vec![(vec!["S"], outs)],
            exprs,
            cons.clone(),
            Shape::Bc,
        )
    };
    match (p.case(), cfg.bound) {
        (BcCase::A, BoundKind::Inner) => {
            let u = cfg.aux.u.unwrap_or(k + 1);
            let v = cfg.aux.v.unwrap_or(k * (k + 1));
            build(vec![aux("U", u)?, aux("V", v)?], &bounds::BC_A_INNER)
        }
        (BcCase::A, BoundKind::Outer) => {
            let u = cfg.aux.u.unwrap_or(k + 2);
            let v = cfg.aux.v.unwrap_or(k * (k + 2) + 1);
            let w = cfg.aux.w.unwrap_or((k * (k + 2) + 1) * (k + 2) * k + 1);
            build(
                vec![aux("U", u)?, aux("V", v)?, aux("W", w)?],
                &bounds::BC_A_OUTER,
            )
        }
        (BcCase::B, BoundKind::Inner) => {
            let u = cfg.aux.u.unwrap_or(k + 1);
            build(vec![aux("U", u)?], &bounds::BC_B_INNER)
        }
        (BcCase::B, BoundKind::Outer) => {
            let u = cfg.aux.u.unwrap_or(k + 1);
            let v = cfg.aux.v.unwrap_or(k * (k + 1));
            build(vec![aux("U", u)?, aux("V", v)?], &bounds::BC_B_OUTER)
        }
        (BcCase::C | BcCase::D, _) => {
            let u = cfg.aux.u.unwrap_or(k);
            build(vec![aux("U", u)?], &bounds::BC_C)
        }
    }
}

fn min_distortion(host_marginal: &[f64], d: &DistortionMeasure) -> f64 {
    host_marginal
        .iter()
        .zip(d.row_minima())
        .map(|(p, m)| p * m)
        .sum()
}

fn check_distortion_feasible(problem: &Problem) -> Result<()> {
    let checks: Vec<(String, f64, f64)> = match problem {
        Problem::Mac(p) => {
            let m1 = p.host().marginalize(&["S1"])?;
            let m2 = p.host().marginalize(&["S2"])?;
            vec![
                ("encoder 1".into(), min_distortion(m1.probs(), p.d1()), p.delta1()),
                ("encoder 2".into(), min_distortion(m2.probs(), p.d2()), p.delta2()),
            ]
        }
        Problem::Bc(p) => vec![(
            "the encoder".into(),
            min_distortion(p.host().probs(), p.d()),
            p.delta(),
        )],
    };
    for (which, min, delta) in checks {
        if min > delta + DISTORTION_TOL {
            return Err(Error::InfeasibleDistortion { which, min, delta });
        }
    }
    Ok(())
}

/// Simplex grid of one factor row: every composition of `m` into `cols`.
fn simplex_points(cols: usize, m: u32) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for_each_type(cols, m as usize, |c| {
        out.push(c.iter().map(|&v| v as f64 / m as f64).collect());
    });
    out
}

/// Mixed-radix layout of the candidate index: one digit per factor row,
/// last factor's last row fastest.
struct Grid {
    points: Vec<Vec<Vec<f64>>>,
    digit_factor: Vec<usize>,
    digit_row: Vec<usize>,
    radix: Vec<usize>,
    total: u128,
}

impl Grid {
    fn new(fam: &Family, m: u32) -> Grid {
        let points: Vec<Vec<Vec<f64>>> = fam
            .factors
            .iter()
            .map(|f| simplex_points(f.cols, m))
            .collect();
        let mut digit_factor = Vec::new();
        let mut digit_row = Vec::new();
        let mut radix = Vec::new();
        let mut total: u128 = 1;
        for (fi, f) in fam.factors.iter().enumerate() {
            for r in 0..f.rows {
                digit_factor.push(fi);
                digit_row.push(r);
                radix.push(points[fi].len());
                total = total.saturating_mul(points[fi].len() as u128);
            }
        }
        Grid {
            points,
            digit_factor,
            digit_row,
            radix,
            total,
        }
    }

    fn decode(&self, mut idx: u128) -> Vec<usize> {
        let mut digits = vec![0; self.radix.len()];
        for d in (0..self.radix.len()).rev() {
            let r = self.radix[d] as u128;
            digits[d] = (idx % r) as usize;
            idx /= r;
        }
        digits
    }

    fn write_digit(&self, fam: &Family, theta: &mut [Vec<f64>], d: usize, value: usize) {
        let f = self.digit_factor[d];
        let cols = fam.factors[f].cols;
        let row = self.digit_row[d];
        theta[f][row * cols..(row + 1) * cols].copy_from_slice(&self.points[f][value]);
    }

    fn theta(&self, fam: &Family, digits: &[usize]) -> Vec<Vec<f64>> {
        let mut theta: Vec<Vec<f64>> = fam
            .factors
            .iter()
            .map(|f| vec![0.0; f.rows * f.cols])
            .collect();
        for (d, &v) in digits.iter().enumerate() {
            self.write_digit(fam, &mut theta, d, v);
        }
        theta
    }
}

struct ChunkResult {
    hull: Vec<Tagged>,
    best: Vec<Option<(f64, u128)>>,
}

fn push_polytope(buf: &mut Vec<Tagged>, b: &Bounds, origin: Origin) -> bool {
    match b.polytope() {
        Some(v) => {
            buf.extend(v.into_iter().map(|p| Tagged { p, origin }));
            true
        }
        None => false,
    }
}

fn better(new: f64, old: &Option<(f64, u128)>) -> bool {
    match old {
        None => new > f64::NEG_INFINITY,
        Some((s, _)) => new > *s,
    }
}

fn run_chunk(fam: &Family, grid: &Grid, lambdas: &[f64], start: u128, end: u128) -> ChunkResult {
    let mut sc = fam.scratch();
    let mut digits = grid.decode(start);
    let mut theta = grid.theta(fam, &digits);
    let mut buf: Vec<Tagged> = Vec::new();
    let mut best: Vec<Option<(f64, u128)>> = vec![None; lambdas.len()];
    let mut idx = start;
    while idx < end {
        if fam.feasible(&theta) {
            let b = fam.evaluate(&theta, &mut sc);
            if push_polytope(&mut buf, &b, Origin::Grid(idx)) {
                for (k, &l) in lambdas.iter().enumerate() {
                    let s = b.support(l);
                    if better(s, &best[k]) {
                        best[k] = Some((s, idx));
                    }
                }
            }
        }
        idx += 1;
        if idx >= end {
            break;
        }
        // odometer step, rewriting only the rows whose digit changed
        for d in (0..digits.len()).rev() {
            digits[d] += 1;
            if digits[d] < grid.radix[d] {
                grid.write_digit(fam, &mut theta, d, digits[d]);
                break;
            }
            digits[d] = 0;
            grid.write_digit(fam, &mut theta, d, 0);
        }
    }
    ChunkResult {
        hull: convex_hull(buf),
        best,
    }
}

/// Pairwise mass moves within factor rows, halving the step until it
/// falls below `MIN_MOVE`. Returns the improved tuple and its bounds.
fn refine(
    fam: &Family,
    mut theta: Vec<Vec<f64>>,
    lambda: f64,
    initial_step: f64,
) -> (Vec<Vec<f64>>, Bounds) {
    let mut sc = fam.scratch();
    let score = |t: &[Vec<f64>], sc: &mut Scratch| -> (f64, Bounds) {
        let b = fam.evaluate(t, sc);
        if !fam.feasible(t) {
            return (f64::NEG_INFINITY, b);
        }
        (b.support(lambda), b)
    };
    let (mut cur, mut cur_b) = score(&theta, &mut sc);
    let mut delta = initial_step;
    while delta >= MIN_MOVE {
        let mut sweeps = 0;
        loop {
            let mut improved = false;
            for f in 0..fam.factors.len() {
                let cols = fam.factors[f].cols;
                for r in 0..fam.factors[f].rows {
                    for i in 0..cols {
                        for j in 0..cols {
                            let (a, b) = (r * cols + i, r * cols + j);
                            if i == j || theta[f][a] < delta {
                                continue;
                            }
                            let (old_a, old_b) = (theta[f][a], theta[f][b]);
                            theta[f][a] = old_a - delta;
                            theta[f][b] = old_b + delta;
                            let (s, bnds) = score(&theta, &mut sc);
                            if s > cur + 1e-12 {
                                cur = s;
                                cur_b = bnds;
                                improved = true;
                            } else {
                                theta[f][a] = old_a;
                                theta[f][b] = old_b;
                            }
                        }
                    }
                }
            }
            sweeps += 1;
            if !improved || sweeps >= MAX_SWEEPS {
                break;
            }
        }
        delta /= 2.0;
    }
    (theta, cur_b)
}

fn default_step(fam: &Family) -> u32 {
    if fam.full_cells <= 256 {
        8
    } else {
        4
    }
}

/// Computes the region of `problem` for `cfg.bound` (capacity cases ignore
/// the bound kind).
pub fn compute_region(problem: &Problem, cfg: &SearchConfig) -> Result<RateRegion> {
    check_distortion_feasible(problem)?;
    let fam = match problem {
        Problem::Mac(p) => mac_family(p, cfg)?,
        Problem::Bc(p) => bc_family(p, cfg)?,
    };
    let m = cfg.step.unwrap_or_else(|| default_step(&fam));
    if m == 0 {
        return Err(Error::InvalidParameter("grid denominator must be positive".into()));
    }
    let grid = Grid::new(&fam, m);
    if grid.total > cfg.max_candidates {
        return Err(Error::BudgetExceeded {
            what: format!("grid search at step 1/{m}"),
            needed: grid.total,
            budget: cfg.max_candidates,
        });
    }
    for l in cfg.refine_lambdas.iter().chain(&cfg.support_lambdas) {
        if !(0.0..=1.0).contains(l) {
            return Err(Error::InvalidParameter(format!("lambda {l} outside [0, 1]")));
        }
    }

    let lambdas = &cfg.refine_lambdas;
    let chunks = grid.total.div_ceil(CHUNK);
    let results: Vec<ChunkResult> = (0..chunks as u64)
        .into_par_iter()
        .map(|c| {
            let start = c as u128 * CHUNK;
            let end = (start + CHUNK).min(grid.total);
            run_chunk(&fam, &grid, lambdas, start, end)
        })
        .collect();

    let mut points = Vec::new();
    let mut best: Vec<Option<(f64, u128)>> = vec![None; lambdas.len()];
    for r in results {
        points.extend(r.hull);
        for (k, b) in r.best.into_iter().enumerate() {
            if let Some((s, i)) = b {
                if better(s, &best[k]) {
                    best[k] = Some((s, i));
                }
            }
        }
    }

    let mut refined: Vec<(Vec<Vec<f64>>, Bounds)> = Vec::new();
    if cfg.refine {
        let starts: Vec<(usize, u128)> = best
            .iter()
            .enumerate()
            .filter_map(|(k, b)| b.map(|(_, i)| (k, i)))
            .collect();
        let out: Vec<(Vec<Vec<f64>>, Bounds)> = starts
            .par_iter()
            .map(|&(k, idx)| {
                let theta = grid.theta(&fam, &grid.decode(idx));
                refine(&fam, theta, lambdas[k], 0.5 / m as f64)
            })
            .collect();
        for (j, (theta, b)) in out.into_iter().enumerate() {
            push_polytope(&mut points, &b, Origin::Refined(j));
            refined.push((theta, b));
        }
    }

    let mut seed_bounds = Vec::with_capacity(cfg.seeds.len());
    for (i, seed) in cfg.seeds.iter().enumerate() {
        match eval_tuple(problem, cfg.bound, seed) {
            Ok(b) => {
                push_polytope(&mut points, &b, Origin::Seed(i));
                seed_bounds.push(Some(b));
            }
            Err(Error::InfeasibleTuple(_)) => seed_bounds.push(None),
            Err(e) => return Err(e),
        }
    }

    let hull = convex_hull(points);
    let empty = hull.is_empty();
    let vertices: Vec<RatePoint> = hull.iter().map(|t| t.p).collect();
    let mut witnesses = Vec::with_capacity(hull.len());
    let mut sc = fam.scratch();
    for t in &hull {
        let (tuple, bounds) = match t.origin {
            Origin::Seed(i) => (cfg.seeds[i].clone(), seed_bounds[i].expect("admitted seed")),
            Origin::Grid(idx) => {
                let theta = grid.theta(&fam, &grid.decode(idx));
                let b = fam.evaluate(&theta, &mut sc);
                (fam.to_tuple(&theta)?, b)
            }
            Origin::Refined(j) => (fam.to_tuple(&refined[j].0)?, refined[j].1),
        };
        witnesses.push(Witness {
            point: t.p,
            bounds,
            tuple,
        });
    }
    let support_samples = if empty {
        Vec::new()
    } else {
        cfg.support_lambdas
            .iter()
            .map(|&l| (l, support(&vertices, l)))
            .collect()
    };
    Ok(RateRegion {
        vertices,
        support_samples,
        empty,
        witnesses,
    })
}
