//! Coflasque covers, flasque resolutions `0 -> M -> S -> F -> 0`, and the
//! H^1 obstruction to being stably permutation.
//!
//! A `NotStablyPermutation` verdict is a certificate: a nonzero H^1 of the
//! lattice or of its dual over an explicit subgroup. The converse direction
//! is only ever a bounded search, reported as `Proven` or `Unknown`.

use std::fmt;
use std::sync::Arc;

use num_traits::One;

use crate::cohomology::{h1_profile, CohomologyProfile};
use crate::error::{Error, Result};
use crate::groups::{conjugacy_classes, subgroups, FiniteMatrixGroup, Subgroup};
use crate::lattices::{
    direct_sum, dual, equivariant_iso_search_with, fixed_vectors, is_equivariant_map, is_permutation_in_basis,
    kernel_lattice, permutation_lattice_named, same_group, GLattice, IsoOutcome, Refutations, SearchLimits,
};
use crate::zlinalg::{column_hermite, kernel_basis, quotient_structure, smith_diagonal, FiniteAbelianGroup, IntMatrix};

/// `p -> m` surjective on fixed points of every subgroup; `kernel` is coflasque.
#[derive(Clone, Debug)]
pub struct CoflasqueCover {
    pub p: GLattice,
    /// `rank(m) x rank(p)`
    pub cover: IntMatrix,
    pub kernel: GLattice,
    /// `rank(p) x rank(kernel)`
    pub kernel_embedding: IntMatrix,
    /// Summands of `p` as (subgroup, vector of `m` fixed by it).
    pub summands: Vec<(Subgroup, Vec<num_bigint::BigInt>)>,
}

fn cover_image_of_fixed(p: &GLattice, cover: &IntMatrix, u: &Subgroup) -> IntMatrix {
    let fixed = fixed_vectors(p, u.members());
    cover * &fixed
}

fn contains_vector(generators: &IntMatrix, v: &[num_bigint::BigInt]) -> bool {
    let target = IntMatrix::from_columns(v.len(), &[v.to_vec()]);
    if generators.cols() == 0 {
        return v.iter().all(num_traits::Zero::is_zero);
    }
    quotient_structure(generators, &target).is_ok()
}

/// Builds the permutation cover summand by summand: subgroup classes are
/// visited from the largest down, and `Z[G/U] (x) v` is added for each
/// Hermite basis vector `v` of `M^U` not yet hit by the fixed points of the
/// cover built so far.
pub fn coflasque_cover(m: &GLattice) -> Result<CoflasqueCover> {
    let g = Arc::clone(m.group());
    let subs = subgroups(&g);
    let classes = conjugacy_classes(&subs);
    let r = m.rank();

    let mut p = GLattice::zero(Arc::clone(&g));
    let mut cover_cols: Vec<Vec<num_bigint::BigInt>> = Vec::new();
    let mut summands = Vec::new();
    for class in classes.iter().rev() {
        let pos = class[0];
        let u = &subs[pos];
        let mu = fixed_vectors(m, u.members());
        for j in 0..mu.cols() {
            let v = mu.column(j);
            let cover = IntMatrix::from_columns(r, &cover_cols);
            let image = cover_image_of_fixed(&p, &cover, u);
            if contains_vector(&image, &v) {
                continue;
            }
            let block = permutation_lattice_named(&g, u, &format!("*U{pos}#{}", summands.len() + 1))?;
            // coset x U maps to x . v; the representative is the first column's source
            for c in 0..block.rank() {
                let rep = (0..g.order())
                    .find(|&x| block.action(x).get(c, 0).is_one())
                    .ok_or_else(|| Error::invariant("coset without representative"))?;
                cover_cols.push(m.action(rep).mul_vec(&v));
            }
            p = direct_sum(&p, &block)?;
            summands.push((u.clone(), v));
        }
    }
    let p = p.with_name(format!("P({})", m.name()));
    let cover = IntMatrix::from_columns(r, &cover_cols);

    if !is_equivariant_map(&p, m, &cover) {
        return Err(Error::invariant("cover is not equivariant"));
    }
    for u in &subs {
        let mu = fixed_vectors(m, u.members());
        let image = cover_image_of_fixed(&p, &cover, u);
        let q = if mu.cols() == 0 {
            FiniteAbelianGroup::trivial()
        } else {
            quotient_structure(&mu, &image).map_err(|_| Error::invariant("cover image leaves the fixed lattice"))?
        };
        if !q.is_trivial() {
            return Err(Error::invariant(format!("cover is not surjective on fixed points of {}", u.label())));
        }
    }
    let (kernel, emb) = kernel_lattice(&p, &cover, format!("K({})", m.name()))?;
    let kernel = kernel.with_labels(numbered("k", emb.cols()))?;
    let check = is_coflasque(&kernel)?;
    if !check.holds() {
        return Err(Error::invariant("kernel of the coflasque cover is not coflasque"));
    }
    Ok(CoflasqueCover {
        p,
        cover,
        kernel,
        kernel_embedding: emb,
        summands,
    })
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

#[derive(Clone, Debug)]
pub struct FlasqueResolution {
    pub m: GLattice,
    pub s: GLattice,
    pub f: GLattice,
    /// `rank(s) x rank(m)`
    pub inject: IntMatrix,
    /// `rank(f) x rank(s)`
    pub project: IntMatrix,
}

impl FlasqueResolution {
    /// Re-derives every structural property of the sequence; errors name the first failure.
    pub fn verify(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::invariant(format!("flasque resolution: {what}")));
        if self.m.rank() + self.f.rank() != self.s.rank() {
            return fail("ranks do not add up");
        }
        if !is_permutation_in_basis(&self.s) {
            return fail("middle term is not a permutation lattice");
        }
        if !is_equivariant_map(&self.m, &self.s, &self.inject) || !is_equivariant_map(&self.s, &self.f, &self.project) {
            return fail("maps are not equivariant");
        }
        if !(&self.project * &self.inject).is_zero() {
            return fail("composite is nonzero");
        }
        let di = smith_diagonal(&self.inject);
        if di.len() != self.m.rank() || !di.iter().all(One::is_one) {
            return fail("injection is not injective with saturated image");
        }
        let dp = smith_diagonal(&self.project);
        if dp.len() != self.f.rank() || !dp.iter().all(One::is_one) {
            return fail("projection is not surjective");
        }
        if column_hermite(&kernel_basis(&self.project)) != column_hermite(&self.inject) {
            return fail("image of the injection differs from the kernel of the projection");
        }
        if !is_flasque(&self.f)?.holds() {
            return fail("F is not flasque");
        }
        Ok(())
    }
}

/// Dualizes a coflasque cover of `M°`; permutation lattices resolve trivially.
pub fn flasque_resolution(m: &GLattice) -> Result<FlasqueResolution> {
    let res = if is_permutation_in_basis(m) {
        FlasqueResolution {
            m: m.clone(),
            s: m.clone(),
            f: GLattice::zero(Arc::clone(m.group())).with_name(format!("F({})", m.name())),
            inject: IntMatrix::identity(m.rank()),
            project: IntMatrix::zeros(0, m.rank()),
        }
    } else {
        let cc = coflasque_cover(&dual(m))?;
        FlasqueResolution {
            m: m.clone(),
            s: dual(&cc.p).with_name(format!("S({})", m.name())),
            f: dual(&cc.kernel)
                .with_name(format!("F({})", m.name()))
                .with_labels(numbered("f", cc.kernel.rank()))?,
            inject: cc.cover.transpose(),
            project: cc.kernel_embedding.transpose(),
        }
    };
    res.verify()?;
    Ok(res)
}

/// Outcome of a flasque/coflasque test; on failure, the largest subgroup
/// with nonzero H^1 and that group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HTrivialCheck {
    pub witness: Option<(Subgroup, FiniteAbelianGroup)>,
}

impl HTrivialCheck {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }

    fn from_profile(p: &CohomologyProfile) -> Self {
        HTrivialCheck {
            witness: p
                .top_nontrivial()
                .map(|i| (p.subgroups[i].clone(), p.entries[i].clone())),
        }
    }
}

pub fn is_coflasque(n: &GLattice) -> Result<HTrivialCheck> {
    Ok(HTrivialCheck::from_profile(&h1_profile(n)?))
}

pub fn is_flasque(n: &GLattice) -> Result<HTrivialCheck> {
    is_coflasque(&dual(n))
}

/// Bounds for the stable-isomorphism search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StableSearchBounds {
    /// Largest rank of `n + P` (equivalently of `Q`) tried.
    pub rank_bound: usize,
    pub limits: SearchLimits,
    /// Largest number of `(P, Q)` pairs handed to the isomorphism search.
    pub max_pairs: usize,
}

pub const DEFAULT_RANK_SLACK: usize = 8;
pub const DEFAULT_MAX_PAIRS: usize = 200;

impl StableSearchBounds {
    /// `rank_bound = rank + 8`, default coefficient bound and limits.
    pub fn default_for(rank: usize) -> Self {
        StableSearchBounds {
            rank_bound: rank + DEFAULT_RANK_SLACK,
            limits: SearchLimits::default(),
            max_pairs: DEFAULT_MAX_PAIRS,
        }
    }
}

impl fmt::Display for StableSearchBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rank_bound={} max_pairs={} {}", self.rank_bound, self.max_pairs, self.limits)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    /// `a + P ~ b + Q` via `witness`; summands are listed as `Z[G/U]` labels.
    Proven {
        p: Vec<String>,
        q: Vec<String>,
        witness: IntMatrix,
    },
    Unknown {
        pairs_tried: usize,
        reason: String,
    },
}

impl SearchOutcome {
    pub fn is_proven(&self) -> bool {
        matches!(self, SearchOutcome::Proven { .. })
    }
}

struct CosetType {
    label: String,
    lattice: GLattice,
    fixed: Vec<usize>,
}

fn coset_types(g: &Arc<FiniteMatrixGroup>, subs: &[Subgroup]) -> Result<Vec<CosetType>> {
    let classes = conjugacy_classes(subs);
    // larger subgroups first: small summands are tried first
    classes
        .iter()
        .rev()
        .map(|class| {
            let u = &subs[class[0]];
            let lattice = permutation_lattice_named(g, u, &format!("*U{}", class[0]))?;
            let fixed = subs.iter().map(|v| lattice.fixed_rank(v)).collect();
            Ok(CosetType {
                label: format!("Z[G/{}]", u.label()),
                lattice,
                fixed,
            })
        })
        .collect()
}

/// Multisets (nondecreasing index lists) of types whose ranks sum to `total`.
fn multisets_of_rank(types: &[CosetType], total: usize) -> Vec<Vec<usize>> {
    fn rec(types: &[CosetType], start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for t in start..types.len() {
            let r = types[t].lattice.rank();
            if r <= left {
                cur.push(t);
                rec(types, t, left - r, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(types, 0, total, &mut Vec::new(), &mut out);
    out
}

/// Multisets whose fixed-rank vectors sum exactly to `target`.
fn multisets_with_fixed(types: &[CosetType], target: &[i64]) -> Vec<Vec<usize>> {
    fn rec(types: &[CosetType], start: usize, left: &mut Vec<i64>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left.iter().all(|&x| x == 0) {
            out.push(cur.clone());
            return;
        }
        for t in start..types.len() {
            let fits = types[t].fixed.iter().zip(left.iter()).all(|(&f, &l)| f as i64 <= l);
            if !fits {
                continue;
            }
            for (l, &f) in left.iter_mut().zip(&types[t].fixed) {
                *l -= f as i64;
            }
            cur.push(t);
            rec(types, t, left, cur, out);
            cur.pop();
            for (l, &f) in left.iter_mut().zip(&types[t].fixed) {
                *l += f as i64;
            }
        }
    }
    if target.iter().any(|&x| x < 0) {
        return Vec::new();
    }
    let mut out = Vec::new();
    rec(types, 0, &mut target.to_vec(), &mut Vec::new(), &mut out);
    out
}

fn assemble(base: &GLattice, types: &[CosetType], picks: &[usize]) -> Result<GLattice> {
    picks
        .iter()
        .try_fold(base.clone(), |acc, &t| direct_sum(&acc, &types[t].lattice))
}

/// Searches for `a + P ~ b + Q` with `P`, `Q` sums of `Z[G/U]`, trying
/// paddings `P` in order of rank and, for each, every `Q` with matching fixed ranks.
pub fn stable_isomorphism_search(a: &GLattice, b: &GLattice, bounds: &StableSearchBounds) -> Result<SearchOutcome> {
    if !same_group(a.group(), b.group()) {
        return Err(Error::GroupMismatch);
    }
    let g = Arc::clone(a.group());
    let subs = subgroups(&g);
    let types = coset_types(&g, &subs)?;
    let fa: Vec<i64> = subs.iter().map(|u| a.fixed_rank(u) as i64).collect();
    let fb: Vec<i64> = subs.iter().map(|u| b.fixed_rank(u) as i64).collect();
    let mut pairs = 0usize;
    let mut last_reason = String::from("no padding with matching fixed ranks within the rank bound");
    if a.rank() > bounds.rank_bound {
        return Ok(SearchOutcome::Unknown {
            pairs_tried: 0,
            reason: format!("rank {} exceeds the rank bound", a.rank()),
        });
    }
    for prank in 0..=bounds.rank_bound - a.rank() {
        for ps in multisets_of_rank(&types, prank) {
            let mut target: Vec<i64> = fa.iter().zip(&fb).map(|(x, y)| x - y).collect();
            for &t in &ps {
                for (acc, &f) in target.iter_mut().zip(&types[t].fixed) {
                    *acc += f as i64;
                }
            }
            for qs in multisets_with_fixed(&types, &target) {
                if pairs >= bounds.max_pairs {
                    return Ok(SearchOutcome::Unknown {
                        pairs_tried: pairs,
                        reason: format!("pair budget of {} exhausted; last: {last_reason}", bounds.max_pairs),
                    });
                }
                pairs += 1;
                let left = assemble(a, &types, &ps)?;
                let right = assemble(b, &types, &qs)?;
                match equivariant_iso_search_with(&left, &right, &bounds.limits, Refutations::Skip)? {
                    IsoOutcome::Proven(witness) => {
                        return Ok(SearchOutcome::Proven {
                            p: ps.iter().map(|&t| types[t].label.clone()).collect(),
                            q: qs.iter().map(|&t| types[t].label.clone()).collect(),
                            witness,
                        })
                    }
                    IsoOutcome::Unknown(reason) => last_reason = reason,
                    IsoOutcome::Refuted(r) => last_reason = r.to_string(),
                }
            }
        }
    }
    Ok(SearchOutcome::Unknown {
        pairs_tried: pairs,
        reason: last_reason,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Lattice,
    Dual,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Lattice => "N",
            Side::Dual => "N°",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    NotStablyPermutation {
        witness: Subgroup,
        side: Side,
        obstruction: FiniteAbelianGroup,
    },
    ConsistentWithStablyPermutation,
}

#[derive(Clone, Debug)]
pub struct ObstructionReport {
    pub lattice: String,
    pub rank: usize,
    pub group_order: usize,
    pub profile_n: CohomologyProfile,
    pub profile_dual: CohomologyProfile,
    pub verdict: Verdict,
    pub bounds: StableSearchBounds,
    pub search: Option<SearchOutcome>,
}

/// The largest subgroup with a nonzero entry on either side (lattice first on ties).
fn top_witness(pn: &CohomologyProfile, pd: &CohomologyProfile) -> Option<(usize, Side)> {
    (0..pn.entries.len()).rev().find_map(|i| {
        if !pn.entries[i].is_trivial() {
            Some((i, Side::Lattice))
        } else if !pd.entries[i].is_trivial() {
            Some((i, Side::Dual))
        } else {
            None
        }
    })
}

pub fn stably_permutation_verdict(n: &GLattice, bounds: &StableSearchBounds) -> Result<ObstructionReport> {
    let profile_n = h1_profile(n)?;
    let profile_dual = h1_profile(&dual(n))?;
    let (verdict, search) = match top_witness(&profile_n, &profile_dual) {
        Some((i, side)) => {
            let obstruction = match side {
                Side::Lattice => profile_n.entries[i].clone(),
                Side::Dual => profile_dual.entries[i].clone(),
            };
            (
                Verdict::NotStablyPermutation {
                    witness: profile_n.subgroups[i].clone(),
                    side,
                    obstruction,
                },
                None,
            )
        }
        None => {
            let search = if is_permutation_in_basis(n) {
                SearchOutcome::Proven {
                    p: Vec::new(),
                    q: vec![n.name().to_string()],
                    witness: IntMatrix::identity(n.rank()),
                }
            } else {
                stable_isomorphism_search(n, &GLattice::zero(Arc::clone(n.group())), bounds)?
            };
            (Verdict::ConsistentWithStablyPermutation, Some(search))
        }
    };
    if let Verdict::NotStablyPermutation { obstruction, .. } = &verdict {
        if obstruction.is_trivial() {
            return Err(Error::invariant("obstruction verdict without a nonzero H1"));
        }
    }
    Ok(ObstructionReport {
        lattice: n.name().to_string(),
        rank: n.rank(),
        group_order: n.group().order(),
        profile_n,
        profile_dual,
        verdict,
        bounds: *bounds,
        search,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimilarityVerdict {
    Similar {
        p: Vec<String>,
        q: Vec<String>,
        witness: IntMatrix,
    },
    NotSimilar {
        subgroup: Subgroup,
        side: Side,
        left: FiniteAbelianGroup,
        right: FiniteAbelianGroup,
    },
    Unknown {
        pairs_tried: usize,
        reason: String,
    },
}

/// Similarity `a + P ~ b + Q`; per-subgroup H^1 of the lattices and their
/// duals are similarity invariants and are compared first, largest subgroup first.
pub fn similarity_verdict(a: &GLattice, b: &GLattice, bounds: &StableSearchBounds) -> Result<SimilarityVerdict> {
    if !same_group(a.group(), b.group()) {
        return Err(Error::GroupMismatch);
    }
    let (pa, pb) = (h1_profile(a)?, h1_profile(b)?);
    let (da, db) = (h1_profile(&dual(a))?, h1_profile(&dual(b))?);
    for i in (0..pa.entries.len()).rev() {
        for (side, x, y) in [(Side::Lattice, &pa, &pb), (Side::Dual, &da, &db)] {
            if x.entries[i] != y.entries[i] {
                return Ok(SimilarityVerdict::NotSimilar {
                    subgroup: pa.subgroups[i].clone(),
                    side,
                    left: x.entries[i].clone(),
                    right: y.entries[i].clone(),
                });
            }
        }
    }
    Ok(match stable_isomorphism_search(a, b, bounds)? {
        SearchOutcome::Proven { p, q, witness } => SimilarityVerdict::Similar { p, q, witness },
        SearchOutcome::Unknown { pairs_tried, reason } => SimilarityVerdict::Unknown { pairs_tried, reason },
    })
}

/// Re-expresses `b` over the group of `a` through an element map
/// `a-index -> b-index` (e.g. from `identify_by_generators`).
pub fn transport_lattice(b: &GLattice, target: &Arc<FiniteMatrixGroup>, map: &[usize]) -> Result<GLattice> {
    if map.len() != target.order() || map.iter().any(|&y| y >= b.group().order()) {
        return Err(Error::GroupMismatch);
    }
    let action = map.iter().map(|&y| b.action(y).clone()).collect();
    GLattice::from_element_action(b.name(), Arc::clone(target), action, Some(b.labels().to_vec()))
}
