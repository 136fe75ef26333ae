//! H^0 and H^1 of G-lattices.
//!
//! `h1` works on the inhomogeneous bar complex truncated at degree 2:
//! cochains `f: G -> N` are vectors indexed by `(element, coordinate)`, the
//! cocycle condition `f(gh) = f(g) + g.f(h)` is imposed for every pair, and
//! coboundaries are `g -> g.n - n`. `h1_cyclic` is an independent route for
//! cyclic groups, `ker(norm) / im(g - 1)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::groups::{subgroups, Subgroup};
use crate::lattices::{fixed_vectors, restrict, GLattice};
use crate::zlinalg::{kernel_basis, quotient_structure, FiniteAbelianGroup, IntMatrix, KernelBuilder, SparseRow};

/// Rank of the sublattice fixed by the whole group.
pub fn h0(n: &GLattice) -> usize {
    let all: Vec<usize> = (0..n.group().order()).collect();
    fixed_vectors(n, &all).cols()
}

/// Basis of the 1-cocycles, as columns of length `|G| * rank`.
pub fn cocycle_basis(n: &GLattice) -> IntMatrix {
    let g = n.group();
    let r = n.rank();
    let order = g.order();
    let mut kb = KernelBuilder::new(order * r);
    let gens = g.generator_indices();
    // pairs (x, generator) pin the cocycle down quickly; the rest are then cheap
    let mut pairs: Vec<(usize, usize)> = (0..order).flat_map(|x| gens.iter().map(move |&s| (x, s))).collect();
    for x in 0..order {
        for y in 0..order {
            if !gens.contains(&y) {
                pairs.push((x, y));
            }
        }
    }
    for (x, y) in pairs {
        let xy = g.mul(x, y);
        let a = n.action(x);
        for t in 0..r {
            // f(xy)_t - f(x)_t - sum_j a[t, j] f(y)_j
            let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
            *acc.entry(xy * r + t).or_default() += 1;
            *acc.entry(x * r + t).or_default() -= 1;
            for j in 0..r {
                let v = a.get(t, j);
                if !v.is_zero() {
                    *acc.entry(y * r + j).or_default() -= v;
                }
            }
            let row: SparseRow = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            if !row.is_empty() {
                kb.add_row(&row);
            }
        }
    }
    kb.finish()
}

/// Generators of the 1-coboundaries: for each basis vector `e_j`, the
/// cochain `x -> (x - 1) e_j`.
pub fn coboundary_generators(n: &GLattice) -> IntMatrix {
    let g = n.group();
    let r = n.rank();
    let cols: Vec<Vec<BigInt>> = (0..r)
        .map(|j| {
            let mut v = vec![BigInt::zero(); g.order() * r];
            for x in 0..g.order() {
                let a = n.action(x);
                for t in 0..r {
                    let mut e = a.get(t, j).clone();
                    if t == j {
                        e -= 1;
                    }
                    v[x * r + t] = e;
                }
            }
            v
        })
        .collect();
    IntMatrix::from_columns(g.order() * r, &cols)
}

pub fn h1(n: &GLattice) -> Result<FiniteAbelianGroup> {
    if n.rank() == 0 || n.group().order() == 1 {
        return Ok(FiniteAbelianGroup::trivial());
    }
    let z1 = cocycle_basis(n);
    let b1 = coboundary_generators(n);
    let q = quotient_structure(&z1, &b1).map_err(|e| match e {
        Error::SubNotContained { .. } => Error::invariant("coboundary is not a cocycle"),
        other => other,
    })?;
    if !q.is_finite() {
        return Err(Error::invariant("H1 of a lattice has positive rank"));
    }
    Ok(q)
}

/// `ker(N) / im(s - 1)` where `s` is the element with index `generator` and
/// `N` the norm; the group must be cyclic generated by `s`.
pub fn h1_cyclic(n: &GLattice, generator: usize) -> Result<FiniteAbelianGroup> {
    let g = n.group();
    if generator >= g.order() || g.element_order(generator) != g.order() {
        return Err(Error::NotCyclic(generator));
    }
    let r = n.rank();
    if r == 0 {
        return Ok(FiniteAbelianGroup::trivial());
    }
    let mut norm = IntMatrix::zeros(r, r);
    for a in n.action_table() {
        norm = &norm - &a.neg();
    }
    let ker = kernel_basis(&norm);
    let diff = n.action(generator) - &IntMatrix::identity(r);
    quotient_structure(&ker, &diff).map_err(|e| match e {
        Error::SubNotContained { .. } => Error::invariant("(s - 1)N is not in the kernel of the norm"),
        other => other,
    })
}

/// H^1 of the restriction to every subgroup, in the canonical subgroup order.
#[derive(Clone)]
pub struct CohomologyProfile {
    pub lattice: String,
    pub subgroups: Vec<Subgroup>,
    pub entries: Vec<FiniteAbelianGroup>,
}

impl fmt::Debug for CohomologyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.subgroups.iter().zip(&self.entries).map(|(u, e)| (u.label(), e.to_string())))
            .finish()
    }
}

impl PartialEq for CohomologyProfile {
    fn eq(&self, other: &Self) -> bool {
        self.subgroups == other.subgroups && self.entries == other.entries
    }
}

impl CohomologyProfile {
    pub fn is_trivial(&self) -> bool {
        self.entries.iter().all(FiniteAbelianGroup::is_trivial)
    }

    /// Largest subgroup (last in canonical order) with nontrivial H^1.
    pub fn top_nontrivial(&self) -> Option<usize> {
        (0..self.entries.len()).rev().find(|&i| !self.entries[i].is_trivial())
    }

    pub fn entry_for(&self, u: &Subgroup) -> Option<&FiniteAbelianGroup> {
        self.subgroups.iter().position(|s| s == u).map(|i| &self.entries[i])
    }

    /// The entry for the whole group.
    pub fn whole(&self) -> &FiniteAbelianGroup {
        self.entries.last().expect("profile always contains the whole group")
    }
}

pub fn h1_profile(n: &GLattice) -> Result<CohomologyProfile> {
    let subs = subgroups(n.group());
    h1_profile_over(n, subs)
}

pub fn h1_profile_over(n: &GLattice, subs: Vec<Subgroup>) -> Result<CohomologyProfile> {
    let entries: Vec<FiniteAbelianGroup> = subs
        .par_iter()
        .map(|u| h1(&restrict(n, u)?))
        .collect::<Result<_>>()?;
    for (u, e) in subs.iter().zip(&entries) {
        if u.is_trivial() && !e.is_trivial() {
            return Err(Error::invariant("H1 of the trivial group is nonzero"));
        }
        let ord = BigInt::from(u.order());
        if e.invariant_factors.iter().any(|d| !(&ord % d).is_zero()) {
            return Err(Error::invariant(format!(
                "H1 over {} = {e} is not killed by the subgroup order",
                u.label()
            )));
        }
    }
    Ok(CohomologyProfile {
        lattice: n.name().to_string(),
        subgroups: subs,
        entries,
    })
}

/// H^1 of the restriction to one subgroup.
pub fn h1_over(n: &GLattice, u: &Subgroup) -> Result<FiniteAbelianGroup> {
    if !Arc::ptr_eq(n.group(), u.parent()) && **n.group() != **u.parent() {
        return Err(Error::GroupMismatch);
    }
    h1(&restrict(n, u)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{generate, FiniteMatrixGroup};
    use crate::lattices::{augmentation_ideal, direct_sum, dual, permutation_lattice};

    fn c2() -> Arc<FiniteMatrixGroup> {
        generate(1, vec![("t".into(), IntMatrix::scalar(1, -1))]).unwrap()
    }

    fn factors(v: &[i64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup {
            invariant_factors: v.iter().map(|&x| BigInt::from(x)).collect(),
            free_rank: 0,
        }
    }

    fn sign(g: &Arc<FiniteMatrixGroup>) -> GLattice {
        GLattice::from_generator_action("sign", Arc::clone(g), vec![IntMatrix::scalar(1, -1)], None).unwrap()
    }

    fn klein() -> Arc<FiniteMatrixGroup> {
        generate(
            3,
            vec![
                ("rho".into(), IntMatrix::from_rows(&[[0, 0, 1], [-1, -1, -1], [1, 0, 0]])),
                ("sigma".into(), IntMatrix::from_rows(&[[-1, -1, -1], [0, 0, 1], [0, 1, 0]])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn h0_examples() {
        let g = c2();
        let triv = GLattice::from_generator_action("Z3", Arc::clone(&g), vec![IntMatrix::identity(3)], None).unwrap();
        assert_eq!(h0(&triv), 3);
        assert_eq!(h0(&sign(&g)), 0);
    }

    #[test]
    fn h1_sign_lattice() {
        let g = c2();
        assert_eq!(h1(&sign(&g)).unwrap(), factors(&[2]));
        assert_eq!(h1_cyclic(&sign(&g), 1).unwrap(), factors(&[2]));
    }

    #[test]
    fn h1_trivial_and_regular() {
        let g = c2();
        let triv = GLattice::from_generator_action("Z", Arc::clone(&g), vec![IntMatrix::identity(1)], None).unwrap();
        assert!(h1(&triv).unwrap().is_trivial());
        assert!(h1_cyclic(&triv, 1).unwrap().is_trivial());
        let reg = permutation_lattice(&g, &Subgroup::trivial(&g)).unwrap();
        assert!(h1(&reg).unwrap().is_trivial());
        assert!(h1_cyclic(&reg, 1).unwrap().is_trivial());
    }

    #[test]
    fn h1_cyclic_rejects_non_generator() {
        let k = klein();
        let m = GLattice::tautological("M", Arc::clone(&k));
        assert_eq!(h1_cyclic(&m, 1), Err(Error::NotCyclic(1)));
        assert_eq!(h1_cyclic(&sign(&c2()), 0), Err(Error::NotCyclic(0)));
    }

    #[test]
    fn augmentation_ideal_of_klein_four() {
        // 0 -> I -> Z[G] -> Z -> 0 gives H^1(G, I) = Z / |G|
        let k = klein();
        assert_eq!(h1(&augmentation_ideal(&k)).unwrap(), factors(&[4]));
    }

    #[test]
    fn h1_of_cyclic_augmentation_ideal() {
        // C3 acting on the A2 root lattice = augmentation ideal of Z[C3]
        let c3 = generate(2, vec![("r".into(), IntMatrix::from_rows(&[[0, -1], [1, -1]]))]).unwrap();
        let m = GLattice::tautological("A2", Arc::clone(&c3));
        assert_eq!(h1(&m).unwrap(), factors(&[3]));
        assert_eq!(h1_cyclic(&m, 1).unwrap(), factors(&[3]));
        assert!(h1(&dual(&m)).is_ok());
    }

    #[test]
    fn h1_is_additive() {
        let g = c2();
        let s = sign(&g);
        let ss = direct_sum(&s, &s).unwrap();
        assert_eq!(h1(&ss).unwrap(), factors(&[2, 2]));
    }

    #[test]
    fn rank_zero_is_trivial() {
        let g = c2();
        assert!(h1(&GLattice::zero(g)).unwrap().is_trivial());
    }

    #[test]
    fn permutation_profiles_vanish() {
        let k = klein();
        for h in subgroups(&k) {
            let p = permutation_lattice(&k, &h).unwrap();
            assert!(h1_profile(&p).unwrap().is_trivial());
        }
    }
}
