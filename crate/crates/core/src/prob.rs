//! Finite probability tables and the information measures built on them.
//!
//! Every table is dense and row-major (the last axis varies fastest). Axes
//! are identified by name, so a joint over `(S1, S2, X1, X2, Y)` can be
//! marginalized or extended by a [`Kernel`] without positional bookkeeping.
//! All quantities are in bits.

use std::collections::HashSet;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Construction-time tolerance on the total mass of a table (and on each
/// conditional row of a kernel).
pub const NORMALIZATION_TOL: f64 = 1e-9;

const DEFAULT_CELL_LIMIT: usize = 10_000_000;

static CELL_LIMIT: AtomicUsize = AtomicUsize::new(DEFAULT_CELL_LIMIT);

/// Largest number of cells any dense table may hold.
pub fn cell_limit() -> usize {
    CELL_LIMIT.load(Ordering::Relaxed)
}

/// Changes the process-wide cell limit (default 10⁷).
pub fn set_cell_limit(limit: usize) {
    CELL_LIMIT.store(limit.max(1), Ordering::Relaxed);
}

pub(crate) fn checked_cells<I: IntoIterator<Item = usize>>(sizes: I) -> Result<usize> {
    let limit = cell_limit();
    let mut cells: u128 = 1;
    for s in sizes {
        cells = cells.saturating_mul(s as u128);
    }
    if cells > limit as u128 {
        return Err(Error::TableTooLarge { cells, limit });
    }
    Ok(cells as usize)
}

/// Row-major strides for the given axis sizes.
pub(crate) fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![1; sizes.len()];
    for i in (0..sizes.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * sizes[i + 1];
    }
    out
}

/// For every cell of a table with `sizes`, the flat index of the same cell
/// in the sub-table spanned by `keep` (in the order given by `keep`).
pub(crate) fn projection(sizes: &[usize], keep: &[usize]) -> Vec<usize> {
    let total: usize = sizes.iter().product();
    let kept_sizes: Vec<usize> = keep.iter().map(|&k| sizes[k]).collect();
    let kept_strides = strides(&kept_sizes);
    let mut weight = vec![0usize; sizes.len()];
    for (pos, &axis) in keep.iter().enumerate() {
        weight[axis] = kept_strides[pos];
    }
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0usize; sizes.len()];
    let mut current = 0usize;
    for _ in 0..total {
        out.push(current);
        // odometer increment, last axis fastest
        for axis in (0..sizes.len()).rev() {
            digits[axis] += 1;
            current += weight[axis];
            if digits[axis] < sizes[axis] {
                break;
            }
            current -= weight[axis] * sizes[axis];
            digits[axis] = 0;
        }
    }
    out
}

pub(crate) fn entropy_of_probs(probs: &[f64]) -> f64 {
    let h: f64 = probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

fn validate_mass(what: &str, probs: &[f64]) -> Result<()> {
    if let Some((i, p)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p < 0.0)
    {
        return Err(Error::dist(what, format!("entry {i} is {p}")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::dist(what, format!("entries sum to {sum}, expected 1")));
    }
    Ok(())
}

/// A named finite alphabet; symbols are the indices `0..size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    name: String,
    size: usize,
}

impl Alphabet {
    pub fn new(name: impl Into<String>, size: usize) -> Result<Self> {
        let name = name.into();
        if size == 0 {
            return Err(Error::InvalidAlphabet {
                name,
                reason: "size must be at least 1".into(),
            });
        }
        if name.is_empty() {
            return Err(Error::InvalidAlphabet {
                name,
                reason: "name must not be empty".into(),
            });
        }
        Ok(Alphabet { name, size })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Same size, different name.
    pub fn renamed(&self, name: impl Into<String>) -> Result<Self> {
        Alphabet::new(name, self.size)
    }
}

/// A probability mass function on one alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pmf {
    alphabet: Alphabet,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(alphabet: Alphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.size() {
            return Err(Error::dist(
                format!("on `{}`", alphabet.name()),
                format!("{} entries for an alphabet of size {}", probs.len(), alphabet.size()),
            ));
        }
        validate_mass(&format!("on `{}`", alphabet.name()), &probs)?;
        Ok(Pmf { alphabet, probs })
    }

    /// Builds a pmf from nonnegative weights, dividing by their sum.
    pub fn normalized(alphabet: Alphabet, weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::dist(
                format!("on `{}`", alphabet.name()),
                "weights must be nonnegative with a positive sum",
            ));
        }
        Pmf::new(alphabet, weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(alphabet: Alphabet) -> Self {
        let k = alphabet.size();
        Pmf {
            alphabet,
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn point_mass(alphabet: Alphabet, symbol: usize) -> Result<Self> {
        if symbol >= alphabet.size() {
            return Err(Error::dist(
                format!("on `{}`", alphabet.name()),
                format!("symbol {symbol} out of range"),
            ));
        }
        let mut probs = vec![0.0; alphabet.size()];
        probs[symbol] = 1.0;
        Ok(Pmf { alphabet, probs })
    }

    /// Binary pmf `(1 - p, p)`.
    pub fn bernoulli(name: impl Into<String>, p: f64) -> Result<Self> {
        Pmf::new(Alphabet::new(name, 2)?, vec![1.0 - p, p])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, symbol: usize) -> f64 {
        self.probs[symbol]
    }
}

/// A joint pmf over an ordered list of distinctly named axes.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPmf {
    axes: Vec<Alphabet>,
    probs: Vec<f64>,
}

impl JointPmf {
    pub fn new(axes: Vec<Alphabet>, probs: Vec<f64>) -> Result<Self> {
        let mut seen = HashSet::new();
        for a in &axes {
            if !seen.insert(a.name()) {
                return Err(Error::AxisMismatch(format!("axis `{}` appears twice", a.name())));
            }
        }
        let cells = checked_cells(axes.iter().map(Alphabet::size))?;
        if probs.len() != cells {
            return Err(Error::dist(
                "joint",
                format!("{} entries for a table of {} cells", probs.len(), cells),
            ));
        }
        validate_mass("joint", &probs)?;
        Ok(JointPmf { axes, probs })
    }

    pub fn from_pmf(p: &Pmf) -> Self {
        JointPmf {
            axes: vec![p.alphabet.clone()],
            probs: p.probs.clone(),
        }
    }

    /// Product joint of two independent tables; axes of `a` come first.
    pub fn independent(a: &JointPmf, b: &JointPmf) -> Result<Self> {
        let mut axes = a.axes.clone();
        axes.extend(b.axes.iter().cloned());
        let mut probs = Vec::with_capacity(a.probs.len() * b.probs.len());
        for &pa in &a.probs {
            for &pb in &b.probs {
                probs.push(pa * pb);
            }
        }
        JointPmf::new(axes, probs)
    }

    pub fn axes(&self) -> &[Alphabet] {
        &self.axes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Alphabet::size).collect()
    }

    pub fn num_cells(&self) -> usize {
        self.probs.len()
    }

    pub fn has_axis(&self, name: &str) -> bool {
        self.axes.iter().any(|a| a.name() == name)
    }

    pub fn axis(&self, name: &str) -> Result<&Alphabet> {
        self.axes
            .iter()
            .find(|a| a.name() == name)
            .ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    pub fn axis_position(&self, name: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.name() == name)
            .ok_or_else(|| Error::UnknownAxis(name.to_string()))
    }

    fn positions(&self, names: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(names.len());
        for n in names {
            let p = self.axis_position(n)?;
            if out.contains(&p) {
                return Err(Error::AxisMismatch(format!("axis `{n}` listed twice")));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Probability of one cell given a full multi-index.
    pub fn prob_at(&self, index: &[usize]) -> f64 {
        let st = strides(&self.shape());
        let flat: usize = index.iter().zip(&st).map(|(i, s)| i * s).sum();
        self.probs[flat]
    }

    /// Sums out every axis not in `keep`; the result's axes follow `keep`.
    pub fn marginalize(&self, keep: &[&str]) -> Result<JointPmf> {
        let pos = self.positions(keep)?;
        let sizes = self.shape();
        let map = projection(&sizes, &pos);
        let out_cells: usize = pos.iter().map(|&p| sizes[p]).product();
        let mut probs = vec![0.0; out_cells];
        for (cell, &p) in self.probs.iter().enumerate() {
            probs[map[cell]] += p;
        }
        Ok(JointPmf {
            axes: pos.iter().map(|&p| self.axes[p].clone()).collect(),
            probs,
        })
    }

    /// Joint entropy of the named axes (0 for the empty set).
    pub fn entropy_of(&self, names: &[&str]) -> Result<f64> {
        if names.is_empty() {
            return Ok(0.0);
        }
        Ok(entropy_of_probs(&self.marginalize(names)?.probs))
    }

    /// Reorders axes; `order` must name every axis exactly once.
    pub fn permuted(&self, order: &[&str]) -> Result<JointPmf> {
        if order.len() != self.axes.len() {
            return Err(Error::AxisMismatch(format!(
                "permutation names {} axes, table has {}",
                order.len(),
                self.axes.len()
            )));
        }
        self.marginalize(order)
    }

    /// Extends the table by the kernel's output axes:
    /// `p(a, o) = p(a) · k(o | inputs(a))`.
    pub fn chain(&self, kernel: &Kernel) -> Result<JointPmf> {
        let mut input_pos = Vec::with_capacity(kernel.inputs.len());
        for inp in &kernel.inputs {
            let p = self.axis_position(inp.name())?;
            if self.axes[p].size() != inp.size() {
                return Err(Error::AxisMismatch(format!(
                    "kernel input `{}` has size {}, joint axis has size {}",
                    inp.name(),
                    inp.size(),
                    self.axes[p].size()
                )));
            }
            input_pos.push(p);
        }
        for out in &kernel.outputs {
            if self.has_axis(out.name()) {
                return Err(Error::AxisMismatch(format!(
                    "kernel output `{}` already present in joint",
                    out.name()
                )));
            }
        }
        let out_size = kernel.out_size();
        checked_cells([self.probs.len(), out_size])?;
        let map = projection(&self.shape(), &input_pos);
        let mut probs = Vec::with_capacity(self.probs.len() * out_size);
        for (cell, &p) in self.probs.iter().enumerate() {
            let row = kernel.row(map[cell]);
            probs.extend(row.iter().map(|k| p * k));
        }
        let mut axes = self.axes.clone();
        axes.extend(kernel.outputs.iter().cloned());
        Ok(JointPmf { axes, probs })
    }

    /// Collapses a single-axis joint into a [`Pmf`].
    pub fn to_pmf(&self) -> Result<Pmf> {
        if self.axes.len() != 1 {
            return Err(Error::AxisMismatch(format!(
                "expected one axis, found {}",
                self.axes.len()
            )));
        }
        Ok(Pmf {
            alphabet: self.axes[0].clone(),
            probs: self.probs.clone(),
        })
    }
}

/// A conditional pmf `p(outputs | inputs)` stored as one row per input
/// multi-index.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    inputs: Vec<Alphabet>,
    outputs: Vec<Alphabet>,
    probs: Vec<f64>,
}

impl Kernel {
    pub fn new(inputs: Vec<Alphabet>, outputs: Vec<Alphabet>, probs: Vec<f64>) -> Result<Self> {
        if outputs.is_empty() {
            return Err(Error::AxisMismatch("kernel needs at least one output axis".into()));
        }
        let mut seen = HashSet::new();
        for a in inputs.iter().chain(&outputs) {
            if !seen.insert(a.name()) {
                return Err(Error::AxisMismatch(format!(
                    "axis `{}` appears twice in kernel",
                    a.name()
                )));
            }
        }
        let rows = checked_cells(inputs.iter().map(Alphabet::size))?;
        let cols = checked_cells(outputs.iter().map(Alphabet::size))?;
        checked_cells([rows, cols])?;
        if probs.len() != rows * cols {
            return Err(Error::dist(
                "kernel",
                format!("{} entries for {} rows of {} outputs", probs.len(), rows, cols),
            ));
        }
        for r in 0..rows {
            validate_mass(&format!("kernel row {r}"), &probs[r * cols..(r + 1) * cols])?;
        }
        Ok(Kernel {
            inputs,
            outputs,
            probs,
        })
    }

    /// Fills the table from `f(input_symbols, output_symbols)`.
    pub fn from_fn<F>(inputs: Vec<Alphabet>, outputs: Vec<Alphabet>, f: F) -> Result<Self>
    where
        F: Fn(&[usize], &[usize]) -> f64,
    {
        let in_sizes: Vec<usize> = inputs.iter().map(Alphabet::size).collect();
        let out_sizes: Vec<usize> = outputs.iter().map(Alphabet::size).collect();
        let rows = checked_cells(in_sizes.iter().copied())?;
        let cols = checked_cells(out_sizes.iter().copied())?;
        let mut probs = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            let a = unflatten(r, &in_sizes);
            for c in 0..cols {
                probs.push(f(&a, &unflatten(c, &out_sizes)));
            }
        }
        Kernel::new(inputs, outputs, probs)
    }

    /// A kernel putting all mass on `f(inputs)`.
    pub fn deterministic<F>(inputs: Vec<Alphabet>, outputs: Vec<Alphabet>, f: F) -> Result<Self>
    where
        F: Fn(&[usize]) -> Vec<usize>,
    {
        Kernel::from_fn(inputs, outputs, |a, o| if f(a) == o { 1.0 } else { 0.0 })
    }

    /// Copies `input` onto a new axis called `output_name`.
    pub fn identity(input: &Alphabet, output_name: &str) -> Result<Self> {
        Kernel::deterministic(
            vec![input.clone()],
            vec![input.renamed(output_name)?],
            |a| a.to_vec(),
        )
    }

    /// Binary symmetric channel with crossover probability `flip`.
    pub fn bsc(input: &Alphabet, output_name: &str, flip: f64) -> Result<Self> {
        if input.size() != 2 {
            return Err(Error::AxisMismatch(format!(
                "BSC needs a binary input, `{}` has size {}",
                input.name(),
                input.size()
            )));
        }
        Kernel::from_fn(
            vec![input.clone()],
            vec![Alphabet::new(output_name, 2)?],
            |a, o| if a[0] == o[0] { 1.0 - flip } else { flip },
        )
    }

    pub fn inputs(&self) -> &[Alphabet] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Alphabet] {
        &self.outputs
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn in_size(&self) -> usize {
        self.inputs.iter().map(Alphabet::size).product()
    }

    pub fn out_size(&self) -> usize {
        self.outputs.iter().map(Alphabet::size).product()
    }

    /// Conditional slice for the flat input index `row`.
    pub fn row(&self, row: usize) -> &[f64] {
        let c = self.out_size();
        &self.probs[row * c..(row + 1) * c]
    }

    /// Conditional slice for an input multi-index.
    pub fn row_for(&self, input: &[usize]) -> &[f64] {
        let sizes: Vec<usize> = self.inputs.iter().map(Alphabet::size).collect();
        self.row(flatten(input, &sizes))
    }
}

pub(crate) fn unflatten(mut flat: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for i in (0..sizes.len()).rev() {
        out[i] = flat % sizes[i];
        flat /= sizes[i];
    }
    out
}

pub(crate) fn flatten(index: &[usize], sizes: &[usize]) -> usize {
    index
        .iter()
        .zip(sizes)
        .fold(0, |acc, (&i, &s)| acc * s + i)
}

/// A per-letter distortion `d(s, x)` between a host symbol and its
/// embedded replacement.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionMeasure {
    host: Alphabet,
    embed: Alphabet,
    table: Vec<f64>,
    d_max: f64,
}

impl DistortionMeasure {
    /// `table[s * |X| + x] = d(s, x)`.
    pub fn new(host: Alphabet, embed: Alphabet, table: Vec<f64>) -> Result<Self> {
        if table.len() != host.size() * embed.size() {
            return Err(Error::dist(
                "distortion",
                format!(
                    "{} entries for a {}x{} table",
                    table.len(),
                    host.size(),
                    embed.size()
                ),
            ));
        }
        if let Some(v) = table.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::dist("distortion", format!("entry {v} is not a finite nonnegative value")));
        }
        let d_max = table.iter().cloned().fold(0.0, f64::max);
        Ok(DistortionMeasure {
            host,
            embed,
            table,
            d_max,
        })
    }

    /// `d(s, x) = 1` if the indices differ, else 0.
    pub fn hamming(host: &Alphabet, embed: &Alphabet) -> Result<Self> {
        let mut table = Vec::with_capacity(host.size() * embed.size());
        for s in 0..host.size() {
            for x in 0..embed.size() {
                table.push(if s == x { 0.0 } else { 1.0 });
            }
        }
        DistortionMeasure::new(host.clone(), embed.clone(), table)
    }

    pub fn host(&self) -> &Alphabet {
        &self.host
    }

    pub fn embed(&self) -> &Alphabet {
        &self.embed
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    pub fn get(&self, s: usize, x: usize) -> f64 {
        self.table[s * self.embed.size() + x]
    }

    /// `min_x d(s, x)` for each host symbol.
    pub fn row_minima(&self) -> Vec<f64> {
        self.table
            .chunks(self.embed.size())
            .map(|row| row.iter().cloned().fold(f64::INFINITY, f64::min))
            .collect()
    }
}

/// `H(p) = -Σ p(a) log₂ p(a)`.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_of_probs(p.probs())
}

fn check_groups(joint: &JointPmf, groups: &[&[&str]]) -> Result<()> {
    let mut seen = HashSet::new();
    for g in groups {
        if g.is_empty() {
            return Err(Error::AxisMismatch("an axis group is empty".into()));
        }
        for name in g.iter() {
            joint.axis_position(name)?;
            if !seen.insert(*name) {
                return Err(Error::AxisMismatch(format!(
                    "axis `{name}` designated in more than one group"
                )));
            }
        }
    }
    Ok(())
}

fn union<'a>(groups: &[&[&'a str]]) -> Vec<&'a str> {
    groups.iter().flat_map(|g| g.iter().copied()).collect()
}

/// `I(A;B) = H(A) + H(B) - H(A,B)`, clamped at zero.
pub fn mutual_information(joint: &JointPmf, a: &[&str], b: &[&str]) -> Result<f64> {
    check_groups(joint, &[a, b])?;
    let i = joint.entropy_of(a)? + joint.entropy_of(b)? - joint.entropy_of(&union(&[a, b]))?;
    Ok(i.max(0.0))
}

/// `I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)`, clamped at zero.
pub fn conditional_mutual_information(
    joint: &JointPmf,
    a: &[&str],
    b: &[&str],
    c: &[&str],
) -> Result<f64> {
    if c.is_empty() {
        return mutual_information(joint, a, b);
    }
    check_groups(joint, &[a, b, c])?;
    let i = joint.entropy_of(&union(&[a, c]))? + joint.entropy_of(&union(&[b, c]))?
        - joint.entropy_of(&union(&[a, b, c]))?
        - joint.entropy_of(c)?;
    Ok(i.max(0.0))
}

/// `H(A|C) = H(A,C) - H(C)`, clamped at zero.
pub fn conditional_entropy(joint: &JointPmf, a: &[&str], c: &[&str]) -> Result<f64> {
    if c.is_empty() {
        check_groups(joint, &[a])?;
        return joint.entropy_of(a);
    }
    check_groups(joint, &[a, c])?;
    Ok((joint.entropy_of(&union(&[a, c]))? - joint.entropy_of(c)?).max(0.0))
}

/// Free-function form of [`JointPmf::marginalize`].
pub fn marginalize(joint: &JointPmf, keep: &[&str]) -> Result<JointPmf> {
    joint.marginalize(keep)
}

/// Free-function form of [`JointPmf::chain`].
pub fn chain(joint: &JointPmf, kernel: &Kernel) -> Result<JointPmf> {
    joint.chain(kernel)
}

/// `Σ p(s, x) d(s, x)` using the axes named after the measure's alphabets.
pub fn expected_distortion(joint: &JointPmf, d: &DistortionMeasure) -> Result<f64> {
    for a in [d.host(), d.embed()] {
        let axis = joint.axis(a.name())?;
        if axis.size() != a.size() {
            return Err(Error::AxisMismatch(format!(
                "distortion alphabet `{}` has size {}, joint axis has size {}",
                a.name(),
                a.size(),
                axis.size()
            )));
        }
    }
    let m = joint.marginalize(&[d.host().name(), d.embed().name()])?;
    Ok(m.probs().iter().zip(d.table()).map(|(p, v)| p * v).sum())
}
