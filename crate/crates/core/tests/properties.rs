use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;

use glat::cohomology::{h1, h1_profile};
use glat::gallery::{torus_pi_group, torus_pi_lattice, torus_w_lattice, trepalin_lattice};
use glat::groups::{generate, subgroups, FiniteMatrixGroup, Subgroup};
use glat::lattices::{
    augmentation_ideal, direct_sum, dual, equivariant_iso_search, permutation_lattice, GLattice, IsoOutcome,
};
use glat::resolutions::{flasque_resolution, stably_permutation_verdict, StableSearchBounds, Verdict};
use glat::zlinalg::IntMatrix;

fn c2() -> Arc<FiniteMatrixGroup> {
    generate(1, vec![("t".into(), IntMatrix::scalar(1, -1))]).unwrap()
}

fn catalog() -> Vec<GLattice> {
    let g = c2();
    let sign = GLattice::from_generator_action("sign", Arc::clone(&g), vec![IntMatrix::scalar(1, -1)], None).unwrap();
    let reg = permutation_lattice(&g, &Subgroup::trivial(&g)).unwrap();
    let mixed = direct_sum(&sign, &reg).unwrap();
    vec![
        sign,
        mixed,
        augmentation_ideal(&torus_pi_group()),
        torus_pi_lattice(),
        torus_w_lattice(),
        trepalin_lattice(1).unwrap(),
    ]
}

/// Unimodular matrix as a product of elementary operations `(i, j, c)`: add `c` times row `j` to row `i`.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
    let mut p = IntMatrix::identity(n);
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        let mut e = IntMatrix::identity(n);
        e.set(i, j, BigInt::from(c));
        p = &e * &p;
    }
    p
}

fn conjugate(n: &GLattice, p: &IntMatrix) -> GLattice {
    let inv = p.unimodular_inverse().unwrap();
    let action = n.action_table().iter().map(|a| &(p * a) * &inv).collect();
    GLattice::from_element_action(format!("{}^P", n.name()), Arc::clone(n.group()), action, None).unwrap()
}

fn ops() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0usize..16, 0usize..16, -2i64..=2), 0..8)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn profiles_are_basis_independent(which in 0usize..6, ops in ops()) {
        let n = catalog().swap_remove(which);
        let p = unimodular(n.rank(), &ops);
        let m = conjugate(&n, &p);
        prop_assert_eq!(h1_profile(&n).unwrap().entries, h1_profile(&m).unwrap().entries);
        prop_assert_eq!(h1_profile(&dual(&n)).unwrap().entries, h1_profile(&dual(&m)).unwrap().entries);
    }

    #[test]
    fn conjugates_are_found_isomorphic(which in 0usize..4, ops in prop::collection::vec((0usize..4, 0usize..4, -1i64..=1), 0..3)) {
        let n = catalog().swap_remove(which);
        let p = unimodular(n.rank(), &ops);
        let m = conjugate(&n, &p);
        match equivariant_iso_search(&n, &m, 3).unwrap() {
            IsoOutcome::Proven(x) => prop_assert!(x.is_unimodular()),
            IsoOutcome::Refuted(r) => prop_assert!(false, "conjugate refuted: {}", r),
            IsoOutcome::Unknown(_) => {}
        }
    }

    #[test]
    fn resolutions_of_conjugates_are_exact_with_equal_flasque_profiles(which in 0usize..5, ops in ops()) {
        let n = catalog().swap_remove(which);
        let m = conjugate(&n, &unimodular(n.rank(), &ops));
        let (rn, rm) = (flasque_resolution(&n).unwrap(), flasque_resolution(&m).unwrap());
        rm.verify().unwrap();
        prop_assert_eq!(rn.m.rank() + rn.f.rank(), rn.s.rank());
        prop_assert_eq!(h1_profile(&rn.f).unwrap().entries, h1_profile(&rm.f).unwrap().entries);
    }
}

#[test]
fn flasque_part_is_stable_under_permutation_padding() {
    for m in catalog() {
        let g = Arc::clone(m.group());
        let f = flasque_resolution(&m).unwrap().f;
        let base = h1_profile(&f).unwrap().entries;
        for u in subgroups(&g) {
            let padded = direct_sum(&m, &permutation_lattice(&g, &u).unwrap()).unwrap();
            let fp = flasque_resolution(&padded).unwrap().f;
            assert_eq!(h1_profile(&fp).unwrap().entries, base, "{} + Z[G/{}]", m.name(), u.label());
        }
    }
}

#[test]
fn verdicts_are_deterministic_and_sound() {
    for m in catalog() {
        let bounds = StableSearchBounds::default_for(m.rank());
        let a = stably_permutation_verdict(&m, &bounds).unwrap();
        let b = stably_permutation_verdict(&m, &bounds).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.search, b.search);
        if matches!(a.verdict, Verdict::NotStablyPermutation { .. }) {
            assert!(!a.profile_n.is_trivial() || !a.profile_dual.is_trivial());
        }
    }
}

#[test]
fn h1_of_direct_sums_adds() {
    let lats = catalog();
    for a in &lats {
        for b in &lats {
            if !Arc::ptr_eq(a.group(), b.group()) && **a.group() != **b.group() {
                continue;
            }
            let sum = h1(&direct_sum(a, b).unwrap()).unwrap();
            let parts = h1(a).unwrap().direct_sum(&h1(b).unwrap());
            assert_eq!(sum, parts, "{} + {}", a.name(), b.name());
        }
    }
}
