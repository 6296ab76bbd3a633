//! Symbolic rate-bound expressions.
//!
//! Each bound is a signed sum of conditional mutual informations and
//! conditional entropies over named variables. The same definitions drive
//! the public evaluators (on an assembled joint that may contain `Q`) and
//! the compiled search kernels (which drop `Q`, since the hull supplies
//! time sharing).

/// One information term.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Term {
    /// `I(a; b | c)`
    Mi(&'static [&'static str], &'static [&'static str], &'static [&'static str]),
    /// `H(a | c)`
    Ent(&'static [&'static str], &'static [&'static str]),
}

/// `Σ sign · term`
pub(crate) type BoundExpr = &'static [(f64, Term)];

use Term::{Ent, Mi};

pub(crate) const MAC_A: [BoundExpr; 3] = [
    &[(1.0, Mi(&["U1"], &["U2", "Y"], &["Q"])), (-1.0, Mi(&["U1"], &["S1"], &["Q"]))],
    &[(1.0, Mi(&["U2"], &["U1", "Y"], &["Q"])), (-1.0, Mi(&["U2"], &["S2"], &["Q"]))],
    &[
        (1.0, Mi(&["U1", "U2"], &["Y"], &["Q"])),
        (-1.0, Mi(&["U1", "U2"], &["S1", "S2"], &["Q"])),
    ],
];

pub(crate) const MAC_B: [BoundExpr; 3] = [
    &[
        (1.0, Mi(&["U1"], &["Y"], &["X2", "S2", "Q"])),
        (-1.0, Mi(&["U1"], &["S1"], &["X2", "S2", "Q"])),
    ],
    &[
        (1.0, Mi(&["X2", "S2"], &["Y"], &["U1", "Q"])),
        (-1.0, Ent(&["S2"], &["U1", "Q"])),
    ],
    &[
        (1.0, Mi(&["U1", "X2", "S2"], &["Y"], &["Q"])),
        (-1.0, Ent(&["S2"], &[])),
        (-1.0, Mi(&["U1"], &["S1"], &["X2", "S2", "Q"])),
    ],
];

pub(crate) const MAC_C: [BoundExpr; 3] = [
    &[
        (1.0, Mi(&["X1", "S1"], &["Y"], &["X2", "S2", "Q"])),
        (-1.0, Ent(&["S1"], &["S2"])),
    ],
    &[
        (1.0, Mi(&["X2", "S2"], &["Y"], &["X1", "S1", "Q"])),
        (-1.0, Ent(&["S2"], &["S1"])),
    ],
    &[
        (1.0, Mi(&["X1", "S1", "X2", "S2"], &["Y"], &["Q"])),
        (-1.0, Ent(&["S1", "S2"], &[])),
    ],
];

pub(crate) const BC_A_INNER: [BoundExpr; 2] = [
    &[(1.0, Mi(&["V"], &["Y"], &["U"])), (-1.0, Mi(&["V"], &["S"], &["U"]))],
    &[(1.0, Mi(&["U"], &["Z"], &[])), (-1.0, Mi(&["U"], &["S"], &[]))],
];

pub(crate) const BC_A_OUTER: [BoundExpr; 3] = [
    &[(1.0, Mi(&["V"], &["Y"], &["U", "W"])), (-1.0, Mi(&["V"], &["S"], &["U", "W"]))],
    &[(1.0, Mi(&["U"], &["Z"], &[])), (-1.0, Mi(&["U"], &["S"], &[]))],
    &[
        (1.0, Mi(&["U", "V", "W"], &["Y"], &[])),
        (-1.0, Mi(&["U", "V", "W"], &["S"], &[])),
    ],
];

pub(crate) const BC_B_INNER: [BoundExpr; 2] = [
    &[(1.0, Mi(&["X", "S"], &["Y"], &["U"])), (-1.0, Ent(&["S"], &["U"]))],
    &[(1.0, Mi(&["U"], &["Z"], &[])), (-1.0, Mi(&["U"], &["S"], &[]))],
];

pub(crate) const BC_B_OUTER: [BoundExpr; 2] = [
    &[(1.0, Mi(&["X", "S"], &["Y"], &["U"])), (-1.0, Ent(&["S"], &["U"]))],
    &[(1.0, Mi(&["U", "V"], &["Z"], &[])), (-1.0, Mi(&["U", "V"], &["S"], &[]))],
];

pub(crate) const BC_C: [BoundExpr; 2] = [
    &[(1.0, Mi(&["X"], &["Y"], &["U", "S"]))],
    &[(1.0, Mi(&["X", "S"], &["Z"], &[])), (-1.0, Ent(&["S"], &[]))],
];

/// Keeps only the variables for which `present` holds.
pub(crate) fn filter<'a>(vars: &[&'a str], present: &dyn Fn(&str) -> bool) -> Vec<&'a str> {
    vars.iter().copied().filter(|v| present(v)).collect()
}

/// Every variable set whose joint entropy a term needs, with signs.
/// `I(a;b|c) = H(ac) + H(bc) − H(abc) − H(c)`, `H(a|c) = H(ac) − H(c)`.
pub(crate) fn entropy_sets(
    term: &Term,
    present: &dyn Fn(&str) -> bool,
) -> Vec<(f64, Vec<&'static str>)> {
    let cat = |parts: &[&[&'static str]]| -> Vec<&'static str> {
        parts.iter().flat_map(|p| filter(p, present)).collect()
    };
    match *term {
        Mi(a, b, c) => vec![
            (1.0, cat(&[a, c])),
            (1.0, cat(&[b, c])),
            (-1.0, cat(&[a, b, c])),
            (-1.0, cat(&[c])),
        ],
        Ent(a, c) => vec![(1.0, cat(&[a, c])), (-1.0, cat(&[c]))],
    }
}
