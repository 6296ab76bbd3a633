mod common;

use common::{h2, random_pmf, random_rows, rng, Table};
use embedcap::prob::{
    chain, conditional_entropy, conditional_mutual_information, entropy, expected_distortion,
    mutual_information, Alphabet, DistortionMeasure, JointPmf, Kernel, Pmf,
};
use proptest::prelude::*;

fn table_of(j: &JointPmf, names: Vec<&'static str>) -> Table {
    let mut t = Table::new(names, j.shape());
    t.p = j.probs().to_vec();
    t
}

fn random_joint(seed: u64, sizes: &[usize]) -> JointPmf {
    let names = ["A", "B", "C", "D"];
    let axes = sizes.iter().zip(names).map(|(&k, n)| Alphabet::new(n, k).unwrap()).collect();
    let mut r = rng(seed);
    JointPmf::new(axes, random_pmf(&mut r, sizes.iter().product())).unwrap()
}

#[test]
fn binary_entropy_closed_form() {
    for p in [0.0, 0.1, 0.25, 0.5, 0.9, 1.0] {
        let h = entropy(&Pmf::bernoulli("S", p).unwrap());
        assert!((h - h2(p)).abs() < 1e-12, "p={p}: {h}");
    }
    assert!((h2(0.1) - 0.468_995_593_589_281).abs() < 1e-12);
}

#[test]
fn information_matches_naive_table() {
    for seed in 0..30 {
        let j = random_joint(seed, &[2, 3, 2, 2]);
        let t = table_of(&j, vec!["A", "B", "C", "D"]);
        let i = mutual_information(&j, &["A"], &["B", "C"]).unwrap();
        assert!((i - t.mi(&["A"], &["B", "C"], &[])).abs() < 1e-12);
        let ci = conditional_mutual_information(&j, &["A", "D"], &["B"], &["C"]).unwrap();
        assert!((ci - t.mi(&["A", "D"], &["B"], &["C"])).abs() < 1e-12);
        let ch = conditional_entropy(&j, &["B"], &["A", "D"]).unwrap();
        assert!((ch - t.hc(&["B"], &["A", "D"])).abs() < 1e-12);
    }
}

#[test]
fn chain_matches_hand_product() {
    let mut r = rng(3);
    let x = JointPmf::from_pmf(&Pmf::new(Alphabet::new("X", 3).unwrap(), random_pmf(&mut r, 3)).unwrap());
    let k = Kernel::new(vec![Alphabet::new("X", 3).unwrap()], vec![Alphabet::new("Y", 2).unwrap()], random_rows(&mut r, 3, 2))
        .unwrap();
    let j = chain(&x, &k).unwrap();
    for a in 0..3 {
        for b in 0..2 {
            let want = x.probs()[a] * k.row(a)[b];
            assert!((j.prob_at(&[a, b]) - want).abs() < 1e-15);
        }
    }
}

#[test]
fn hamming_distortion_is_flip_probability() {
    let s = JointPmf::from_pmf(&Pmf::bernoulli("S", 0.3).unwrap());
    let k = Kernel::bsc(&Alphabet::new("S", 2).unwrap(), "X", 0.2).unwrap();
    let j = chain(&s, &k).unwrap();
    let d = DistortionMeasure::hamming(&Alphabet::new("S", 2).unwrap(), &Alphabet::new("X", 2).unwrap()).unwrap();
    assert!((expected_distortion(&j, &d).unwrap() - 0.2).abs() < 1e-12);
}

#[test]
fn malformed_pmfs_are_rejected() {
    let a = Alphabet::new("S", 2).unwrap();
    assert!(Pmf::new(a.clone(), vec![0.5, 0.6]).is_err());
    assert!(Pmf::new(a.clone(), vec![1.2, -0.2]).is_err());
    assert!(Pmf::new(a.clone(), vec![1.0]).is_err());
    assert!(Kernel::new(vec![a.clone()], vec![Alphabet::new("Y", 2).unwrap()], vec![1.0, 0.0, 0.3, 0.3]).is_err());
    assert!(Alphabet::new("S", 0).is_err());
}

proptest! {
    #[test]
    fn entropy_within_log_bounds(seed in 0u64..10_000, k in 1usize..7) {
        let p = Pmf::new(Alphabet::new("S", k).unwrap(), random_pmf(&mut rng(seed), k)).unwrap();
        let h = entropy(&p);
        prop_assert!(h >= -1e-12);
        prop_assert!(h <= (k as f64).log2() + 1e-12);
    }

    #[test]
    fn information_is_nonnegative_and_symmetric(seed in 0u64..10_000) {
        let j = random_joint(seed, &[2, 3, 2]);
        let ab = conditional_mutual_information(&j, &["A"], &["B"], &["C"]).unwrap();
        let ba = conditional_mutual_information(&j, &["B"], &["A"], &["C"]).unwrap();
        prop_assert!(ab >= -1e-12);
        prop_assert!((ab - ba).abs() < 1e-12);
    }

    #[test]
    fn chain_rule_holds(seed in 0u64..10_000) {
        // I(A; B,C) = I(A; B) + I(A; C | B)
        let j = random_joint(seed, &[3, 2, 2]);
        let lhs = mutual_information(&j, &["A"], &["B", "C"]).unwrap();
        let rhs = mutual_information(&j, &["A"], &["B"]).unwrap()
            + conditional_mutual_information(&j, &["A"], &["C"], &["B"]).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn marginalize_keeps_mass_and_order(seed in 0u64..10_000) {
        let j = random_joint(seed, &[2, 3, 2, 2]);
        let m = j.marginalize(&["C", "A"]).unwrap();
        prop_assert_eq!(m.axes()[0].name(), "C");
        prop_assert!((m.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for c in 0..2 {
            for a in 0..2 {
                let mut want = 0.0;
                for b in 0..3 {
                    for d in 0..2 {
                        want += j.prob_at(&[a, b, c, d]);
                    }
                }
                prop_assert!((m.prob_at(&[c, a]) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn conditioning_reduces_entropy(seed in 0u64..10_000) {
        let j = random_joint(seed, &[3, 3]);
        let h = j.entropy_of(&["A"]).unwrap();
        prop_assert!(conditional_entropy(&j, &["A"], &["B"]).unwrap() <= h + 1e-12);
    }
}
