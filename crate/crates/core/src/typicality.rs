//! ε-strong typicality.
//!
//! A tuple of sequences of length `n` is typical for a table with `K` cells
//! when every cell count `N` satisfies `|N/n − p| < ε/K` and cells with
//! `p = 0` never occur. The test is evaluated as `|N·K − n·p·K| < n·ε`, so
//! integer counts meet a single floating multiply.
//!
//! [`TypicalityTest`] precomputes the admissible count interval of each cell
//! and is what the decoders use; the free functions are the reference
//! interface. The set-statistics helpers enumerate types exactly and report the
//! probability/cardinality windows of the typical set.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::prob::{entropy_of_probs, strides, Alphabet, JointPmf, Pmf};

/// A finite sequence over an alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sequence {
    alphabet: Alphabet,
    symbols: Vec<usize>,
}

impl Sequence {
    pub fn new(alphabet: Alphabet, symbols: Vec<usize>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParameter("sequence length must be at least 1".into()));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >= alphabet.size()) {
            return Err(Error::InvalidParameter(format!(
                "symbol {s} outside alphabet `{}` of size {}",
                alphabet.name(),
                alphabet.size()
            )));
        }
        Ok(Sequence { alphabet, symbols })
    }

    /// Parses a string of decimal digits, e.g. `"0101"`.
    pub fn from_digits(alphabet: Alphabet, digits: &str) -> Result<Self> {
        let symbols = digits
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::InvalidParameter(format!("`{c}` is not a digit")))
            })
            .collect::<Result<Vec<_>>>()?;
        Sequence::new(alphabet, symbols)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn symbols(&self) -> &[usize] {
        &self.symbols
    }

    pub fn n(&self) -> usize {
        self.symbols.len()
    }
}

/// Decoder tolerances; `eps1` governs host-candidate typicality and must
/// be strictly below `eps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypicalityParams {
    eps: f64,
    eps1: f64,
}

impl TypicalityParams {
    pub fn new(eps: f64, eps1: f64) -> Result<Self> {
        if !(eps1 > 0.0 && eps1 < eps && eps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < eps1 < eps, got eps = {eps}, eps1 = {eps1}"
            )));
        }
        Ok(TypicalityParams { eps, eps1 })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn eps1(&self) -> f64 {
        self.eps1
    }
}

impl Default for TypicalityParams {
    fn default() -> Self {
        TypicalityParams { eps: 0.1, eps1: 0.05 }
    }
}

/// The per-cell deviation test shared by every entry point.
#[inline]
pub(crate) fn cell_ok(count: usize, n: usize, p: f64, cells: usize, eps: f64) -> bool {
    if p <= 0.0 {
        return count == 0;
    }
    let k = cells as f64;
    ((count as f64) * k - (n as f64) * p * k).abs() < (n as f64) * eps
}

/// Counts over the product alphabet of `seqs`, row-major in the order given.
pub fn empirical_counts(seqs: &[&Sequence]) -> Result<Vec<usize>> {
    let first = seqs
        .first()
        .ok_or_else(|| Error::InvalidParameter("no sequences given".into()))?;
    let n = first.n();
    if let Some(s) = seqs.iter().find(|s| s.n() != n) {
        return Err(Error::LengthMismatch(n, s.n()));
    }
    let sizes: Vec<usize> = seqs.iter().map(|s| s.alphabet().size()).collect();
    let st = strides(&sizes);
    let mut counts = vec![0usize; sizes.iter().product()];
    for j in 0..n {
        let cell: usize = seqs.iter().zip(&st).map(|(s, w)| s.symbols[j] * w).sum();
        counts[cell] += 1;
    }
    Ok(counts)
}

/// Strong typicality of a single sequence. Returns false when the
/// alphabet sizes disagree.
pub fn is_strongly_typical(x: &Sequence, p: &Pmf, eps: f64) -> bool {
    let k = p.alphabet().size();
    if x.alphabet().size() != k {
        return false;
    }
    let counts = empirical_counts(&[x]).expect("single sequence");
    counts
        .iter()
        .zip(p.probs())
        .all(|(&c, &q)| cell_ok(c, x.n(), q, k, eps))
}

fn check_axes(seqs: &[&Sequence], joint: &JointPmf) -> Result<()> {
    if seqs.len() != joint.axes().len() {
        return Err(Error::AxisMismatch(format!(
            "{} sequences for a joint with {} axes",
            seqs.len(),
            joint.axes().len()
        )));
    }
    for (s, a) in seqs.iter().zip(joint.axes()) {
        if s.alphabet() != a {
            return Err(Error::AxisMismatch(format!(
                "sequence over `{}` ({}) does not match axis `{}` ({})",
                s.alphabet().name(),
                s.alphabet().size(),
                a.name(),
                a.size()
            )));
        }
    }
    Ok(())
}

/// Joint strong typicality; `seqs` follow the joint's axis order.
pub fn is_jointly_typical(seqs: &[&Sequence], joint: &JointPmf, eps: f64) -> Result<bool> {
    check_axes(seqs, joint)?;
    let counts = empirical_counts(seqs)?;
    let n = seqs[0].n();
    let k = joint.num_cells();
    Ok(counts
        .iter()
        .zip(joint.probs())
        .all(|(&c, &q)| cell_ok(c, n, q, k, eps)))
}

/// All sequences `b` for which `(fixed, b)` is jointly typical, in
/// lexicographic order. `joint` has exactly two axes, one of which carries
/// the fixed sequence's alphabet.
pub fn conditional_typical_candidates(
    joint: &JointPmf,
    fixed: &Sequence,
    eps: f64,
    n_limit: u128,
) -> Result<Vec<Sequence>> {
    if joint.axes().len() != 2 {
        return Err(Error::AxisMismatch(format!(
            "expected a two-axis joint, found {} axes",
            joint.axes().len()
        )));
    }
    let fixed_pos = joint.axis_position(fixed.alphabet().name())?;
    if joint.axes()[fixed_pos] != *fixed.alphabet() {
        return Err(Error::AxisMismatch(format!(
            "fixed sequence alphabet `{}` has the wrong size",
            fixed.alphabet().name()
        )));
    }
    let other = joint.axes()[1 - fixed_pos].clone();
    let n = fixed.n();
    let needed = (other.size() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > n_limit {
        return Err(Error::BudgetExceeded {
            what: "conditional candidate enumeration".into(),
            needed,
            budget: n_limit,
        });
    }
    let test = TypicalityTest::new(joint, n, eps);
    let mut out = Vec::new();
    let mut cand = vec![0usize; n];
    let mut scratch = Vec::new();
    loop {
        let cols: [&[usize]; 2] = if fixed_pos == 0 {
            [fixed.symbols(), &cand]
        } else {
            [&cand, fixed.symbols()]
        };
        if test.accepts(&cols, &mut scratch) {
            out.push(Sequence {
                alphabet: other.clone(),
                symbols: cand.clone(),
            });
        }
        if !odometer(&mut cand, other.size()) {
            break;
        }
    }
    Ok(out)
}

/// Advances `digits` (last position fastest); false after the last value.
pub(crate) fn odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Precompiled typicality test for a fixed table, length and tolerance.
#[derive(Clone, Debug)]
pub struct TypicalityTest {
    n: usize,
    strides: Vec<usize>,
    lo: Vec<u32>,
    hi: Vec<u32>,
    empty: bool,
}

impl TypicalityTest {
    pub fn new(joint: &JointPmf, n: usize, eps: f64) -> Self {
        Self::from_table(&joint.shape(), joint.probs(), n, eps)
    }

    pub(crate) fn from_table(shape: &[usize], probs: &[f64], n: usize, eps: f64) -> Self {
        let k = probs.len();
        let mut lo = Vec::with_capacity(k);
        let mut hi = Vec::with_capacity(k);
        let mut empty = false;
        for &p in probs {
            // the admissible set is an interval of integers; scan it out
            let ok: Vec<usize> = (0..=n).filter(|&c| cell_ok(c, n, p, k, eps)).collect();
            match (ok.first(), ok.last()) {
                (Some(&a), Some(&b)) => {
                    lo.push(a as u32);
                    hi.push(b as u32);
                }
                _ => {
                    empty = true;
                    lo.push(1);
                    hi.push(0);
                }
            }
        }
        let lo_sum: usize = lo.iter().map(|&v| v as usize).sum();
        let hi_sum: usize = hi.iter().map(|&v| v as usize).sum();
        if lo_sum > n || hi_sum < n {
            empty = true;
        }
        TypicalityTest {
            n,
            strides: strides(shape),
            lo,
            hi,
            empty,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// True when no sequence tuple of this length can pass.
    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Checks a count table (cells row-major as in the joint).
    pub fn accepts_counts(&self, counts: &[u32]) -> bool {
        !self.empty
            && counts
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(c, (l, h))| c >= l && c <= h)
    }

    /// Checks symbol columns, one slice per axis, each of length `n`.
    pub fn accepts(&self, cols: &[&[usize]], scratch: &mut Vec<u32>) -> bool {
        if self.empty {
            return false;
        }
        scratch.clear();
        scratch.resize(self.lo.len(), 0);
        for j in 0..self.n {
            let mut cell = 0;
            for (col, w) in cols.iter().zip(&self.strides) {
                cell += col[j] * w;
            }
            scratch[cell] += 1;
            if scratch[cell] > self.hi[cell] {
                return false;
            }
        }
        scratch.iter().zip(&self.lo).all(|(c, l)| c >= l)
    }
}

/// Calls `f` with every composition of `n` into `k` nonnegative parts.
pub fn for_each_type<F: FnMut(&[usize])>(k: usize, n: usize, mut f: F) {
    fn rec<F: FnMut(&[usize])>(buf: &mut Vec<usize>, k: usize, left: usize, f: &mut F) {
        if buf.len() + 1 == k {
            buf.push(left);
            f(buf);
            buf.pop();
            return;
        }
        for c in 0..=left {
            buf.push(c);
            rec(buf, k, left - c, f);
            buf.pop();
        }
    }
    if k == 0 {
        return;
    }
    let mut buf = Vec::with_capacity(k);
    rec(&mut buf, k, n, &mut f);
}

fn log2_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).log2()).sum()
}

fn log2_multinomial(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    log2_factorial(n) - counts.iter().map(|&c| log2_factorial(c)).sum::<f64>()
}

/// Exact size/probability window of a strongly typical set.
///
/// `eps1` is the largest deviation of `−(1/n)·log₂ P(xⁿ)` from the entropy
/// over typical sequences, so the probability sandwich holds with equality
/// at its extremes; `probability` plays the role of `1 − ε₂`.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct TypicalSetStats {
    pub n: usize,
    pub eps: f64,
    pub entropy: f64,
    pub eps1: f64,
    pub size: f64,
    pub probability: f64,
    pub size_lower: f64,
    pub size_upper: f64,
}

impl TypicalSetStats {
    /// `probability · 2^{n(H−ε₁)} ≤ |T| ≤ 2^{n(H+ε₁)}` and `probability ≤ 1`.
    pub fn sandwich_holds(&self) -> bool {
        let slack = 1e-9 * self.size.max(1.0);
        self.size_lower <= self.size + slack
            && self.size <= self.size_upper + slack
            && self.probability <= 1.0 + 1e-12
    }
}

/// Typical-set statistics for `n` draws from `joint` (any number of axes),
/// computed by exact type enumeration.
pub fn typical_set_stats(joint: &JointPmf, n: usize, eps: f64) -> Result<TypicalSetStats> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let probs = joint.probs();
    let k = probs.len();
    let h = entropy_of_probs(probs);
    let mut size = 0.0;
    let mut prob = 0.0;
    let mut spread: f64 = 0.0;
    for_each_type(k, n, |counts| {
        if !counts
            .iter()
            .zip(probs)
            .all(|(&c, &p)| cell_ok(c, n, p, k, eps))
        {
            return;
        }
        let log_p: f64 = counts
            .iter()
            .zip(probs)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &p)| c as f64 * p.log2())
            .sum();
        let log_count = log2_multinomial(counts);
        size += log_count.exp2();
        prob += (log_count + log_p).exp2();
        spread = spread.max((-log_p / n as f64 - h).abs());
    });
    let nf = n as f64;
    Ok(TypicalSetStats {
        n,
        eps,
        entropy: h,
        eps1: spread,
        size,
        probability: prob,
        size_lower: prob * (nf * (h - spread)).exp2(),
        size_upper: (nf * (h + spread)).exp2(),
    })
}

/// Conditional typical-set statistics: the typical continuations of
/// `fixed` under a two-axis `joint`, with entropies and probabilities
/// taken conditionally on `fixed`.
pub fn conditional_typical_set_stats(
    joint: &JointPmf,
    fixed: &Sequence,
    eps: f64,
    n_limit: u128,
) -> Result<TypicalSetStats> {
    let fixed_pos = joint.axis_position(fixed.alphabet().name())?;
    let other_pos = 1 - fixed_pos;
    let other_name = joint.axes()[other_pos].name().to_string();
    let h_joint = joint.entropy_of(&[fixed.alphabet().name(), &other_name])?;
    let h_fixed = joint.entropy_of(&[fixed.alphabet().name()])?;
    let h = (h_joint - h_fixed).max(0.0);
    let ordered = joint.marginalize(&[fixed.alphabet().name(), &other_name])?;
    let b = joint.axes()[other_pos].size();
    let marginal = joint.marginalize(&[fixed.alphabet().name()])?;
    let cands = conditional_typical_candidates(joint, fixed, eps, n_limit)?;
    let n = fixed.n();
    let mut prob = 0.0;
    let mut spread: f64 = 0.0;
    for c in &cands {
        let mut log_p = 0.0;
        for (a, y) in fixed.symbols().iter().zip(c.symbols()) {
            log_p += (ordered.probs()[a * b + y] / marginal.probs()[*a]).log2();
        }
        prob += log_p.exp2();
        spread = spread.max((-log_p / n as f64 - h).abs());
    }
    let nf = n as f64;
    let size = cands.len() as f64;
    Ok(TypicalSetStats {
        n,
        eps,
        entropy: h,
        eps1: spread,
        size,
        probability: prob,
        size_lower: prob * (nf * (h - spread)).exp2(),
        size_upper: (nf * (h + spread)).exp2(),
    })
}

/// Fraction of `samples` i.i.d. sequences of length `n` drawn from `p`
/// that land in the typical set.
pub fn monte_carlo_coverage(p: &Pmf, n: usize, eps: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = p.alphabet().size();
    let cdf = cumulative(p.probs());
    let mut hits = 0usize;
    let mut counts = vec![0usize; k];
    for _ in 0..samples {
        counts.iter_mut().for_each(|c| *c = 0);
        for _ in 0..n {
            counts[sample_cdf(&cdf, rng.random::<f64>())] += 1;
        }
        if counts
            .iter()
            .zip(p.probs())
            .all(|(&c, &q)| cell_ok(c, n, q, k, eps))
        {
            hits += 1;
        }
    }
    hits as f64 / samples as f64
}

pub(crate) fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

/// Inverse-CDF draw; never returns a zero-probability index.
pub(crate) fn sample_cdf(cdf: &[f64], u: f64) -> usize {
    let total = *cdf.last().expect("nonempty cdf");
    let target = u * total;
    let mut idx = cdf.partition_point(|&c| c <= target);
    if idx >= cdf.len() {
        idx = cdf.len() - 1;
    }
    // step back over trailing zero-mass cells (only reachable by rounding)
    while idx > 0 && cdf[idx] == cdf[idx - 1] {
        idx -= 1;
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Kernel;

    fn bin(name: &str) -> Alphabet {
        Alphabet::new(name, 2).unwrap()
    }

    fn seq(name: &str, digits: &str) -> Sequence {
        Sequence::from_digits(bin(name), digits).unwrap()
    }

    fn diag() -> JointPmf {
        JointPmf::new(vec![bin("A"), bin("B")], vec![0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    #[test]
    fn counts_examples() {
        assert_eq!(empirical_counts(&[&seq("A", "0101")]).unwrap(), vec![2, 2]);
        let c = empirical_counts(&[&seq("A", "01"), &seq("B", "01")]).unwrap();
        assert_eq!(c, vec![1, 0, 0, 1]);
        assert!(matches!(
            empirical_counts(&[&seq("A", "01"), &seq("B", "011")]),
            Err(Error::LengthMismatch(2, 3))
        ));
    }

    #[test]
    fn single_sequence_examples() {
        let p = Pmf::uniform(bin("A"));
        assert!(is_strongly_typical(&seq("A", "0101"), &p, 0.1));
        assert!(!is_strongly_typical(&seq("A", "0000"), &p, 0.1));
        let skew = Pmf::new(bin("A"), vec![1.0, 0.0]).unwrap();
        assert!(!is_strongly_typical(&seq("A", "0001"), &skew, 100.0));
        assert!(is_strongly_typical(&seq("A", "0000"), &skew, 0.01));
    }

    #[test]
    fn strict_inequality_at_boundary() {
        // counts (3,1) at n = 4: |3·2 − 4·0.5·2| = 2, n·ε = 4ε
        let p = Pmf::uniform(bin("A"));
        assert!(!is_strongly_typical(&seq("A", "0001"), &p, 0.5));
        assert!(is_strongly_typical(&seq("A", "0001"), &p, 0.5000001));
    }

    #[test]
    fn joint_examples() {
        let j = diag();
        assert!(is_jointly_typical(&[&seq("A", "01"), &seq("B", "01")], &j, 0.2).unwrap());
        assert!(!is_jointly_typical(&[&seq("A", "01"), &seq("B", "10")], &j, 0.2).unwrap());
        assert!(is_jointly_typical(&[&seq("B", "01"), &seq("A", "01")], &j, 0.2).is_err());
    }

    #[test]
    fn candidates_examples() {
        let a = bin("A");
        let det = JointPmf::from_pmf(&Pmf::uniform(a.clone()))
            .chain(&Kernel::identity(&a, "B").unwrap())
            .unwrap();
        let fixed = seq("A", "0110");
        let c = conditional_typical_candidates(&det, &fixed, 0.5, 1 << 20).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].symbols(), fixed.symbols());

        let indep = JointPmf::new(vec![bin("A"), bin("B")], vec![0.25; 4]).unwrap();
        let c = conditional_typical_candidates(&indep, &seq("A", "01"), 10.0, 1 << 20).unwrap();
        assert_eq!(c.len(), 4);

        assert!(matches!(
            conditional_typical_candidates(&indep, &seq("A", "0101"), 10.0, 15),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn precompiled_test_agrees_on_all_pairs() {
        let j = JointPmf::new(vec![bin("A"), bin("B")], vec![0.4, 0.1, 0.2, 0.3]).unwrap();
        let n = 6;
        let test = TypicalityTest::new(&j, n, 0.3);
        let mut scratch = Vec::new();
        let mut a = vec![0; n];
        loop {
            let mut b = vec![0; n];
            loop {
                let slow = is_jointly_typical(
                    &[
                        &Sequence::new(bin("A"), a.clone()).unwrap(),
                        &Sequence::new(bin("B"), b.clone()).unwrap(),
                    ],
                    &j,
                    0.3,
                )
                .unwrap();
                assert_eq!(slow, test.accepts(&[&a, &b], &mut scratch));
                if !odometer(&mut b, 2) {
                    break;
                }
            }
            if !odometer(&mut a, 2) {
                break;
            }
        }
    }

    #[test]
    fn type_enumeration_counts() {
        let mut total = 0.0;
        let mut types = 0;
        for_each_type(3, 5, |c| {
            types += 1;
            total += log2_multinomial(c).exp2();
        });
        assert_eq!(types, 21);
        assert!((total - 243.0).abs() < 1e-9);
    }

    #[test]
    fn stats_window() {
        let p = JointPmf::from_pmf(&Pmf::bernoulli("A", 0.3).unwrap());
        let s = typical_set_stats(&p, 12, 0.3).unwrap();
        assert!(s.sandwich_holds(), "{s:?}");
        assert!(s.probability > 0.0 && s.probability <= 1.0);
    }

    #[test]
    fn sampler_skips_zero_mass() {
        let cdf = cumulative(&[0.5, 0.0, 0.5]);
        assert_eq!(sample_cdf(&cdf, 0.0), 0);
        assert_eq!(sample_cdf(&cdf, 0.5), 2);
        assert_eq!(sample_cdf(&cdf, 0.9999), 2);
        let cdf = cumulative(&[0.5, 0.5, 0.0]);
        assert_eq!(sample_cdf(&cdf, 0.99999999999), 1);
    }
}
