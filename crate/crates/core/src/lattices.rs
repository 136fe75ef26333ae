//! G-lattices: free Z-modules of finite rank with a chosen basis, on which a
//! [`FiniteMatrixGroup`] acts by unimodular matrices.
//!
//! Action matrices act on column vectors: column `j` of `action(x)` holds the
//! coordinates of `x . e_j`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::cohomology;
use crate::error::{Error, Result};
use crate::groups::{subgroups, FiniteMatrixGroup, Subgroup};
use crate::zlinalg::{kernel_basis, solve_in_basis, IntMatrix, KernelBuilder, SparseRow};

#[derive(Clone)]
pub struct GLattice {
    name: String,
    group: Arc<FiniteMatrixGroup>,
    rank: usize,
    action: Vec<IntMatrix>,
    labels: Vec<String>,
}

impl fmt::Debug for GLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GLattice")
            .field("name", &self.name)
            .field("rank", &self.rank)
            .field("group_order", &self.group.order())
            .field("labels", &self.labels)
            .finish()
    }
}

impl PartialEq for GLattice {
    /// Equal action tables over the same group; names and labels are ignored.
    fn eq(&self, other: &Self) -> bool {
        same_group(&self.group, &other.group) && self.rank == other.rank && self.action == other.action
    }
}

pub fn same_group(a: &Arc<FiniteMatrixGroup>, b: &Arc<FiniteMatrixGroup>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn default_labels(rank: usize) -> Vec<String> {
    (1..=rank).map(|i| format!("e{i}")).collect()
}

impl GLattice {
    /// Extends the generator images along the group's element words and
    /// checks that the result is a homomorphism.
    pub fn from_generator_action(
        name: impl Into<String>,
        group: Arc<FiniteMatrixGroup>,
        generator_action: Vec<IntMatrix>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let k = group.generators().len();
        if generator_action.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "{} generator images for {k} generators",
                generator_action.len()
            )));
        }
        let rank = match generator_action.first() {
            Some(m) => m.rows(),
            None => labels.as_ref().map_or(0, Vec::len),
        };
        for (i, m) in generator_action.iter().enumerate() {
            if m.rows() != rank || m.cols() != rank {
                return Err(Error::DimensionMismatch(format!(
                    "image of generator `{}` is not {rank}x{rank}",
                    group.generators()[i].0
                )));
            }
            if !m.is_unimodular() {
                return Err(Error::NotUnimodular {
                    name: group.generators()[i].0.clone(),
                    det: m.determinant()?.to_string(),
                });
            }
        }
        let action: Vec<IntMatrix> = (0..group.order())
            .map(|x| {
                group
                    .word(x)
                    .iter()
                    .fold(IntMatrix::identity(rank), |acc, &g| &acc * &generator_action[g])
            })
            .collect();
        for (i, &x) in group.generator_indices().iter().enumerate() {
            if action[x] != generator_action[i] {
                return Err(Error::NotAHomomorphism(format!(
                    "image of generator `{}` disagrees with the relations of the group",
                    group.generators()[i].0
                )));
            }
        }
        Self::from_element_action(name, group, action, labels)
    }

    pub fn from_element_action(
        name: impl Into<String>,
        group: Arc<FiniteMatrixGroup>,
        action: Vec<IntMatrix>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::DimensionMismatch("one action matrix per group element required".into()));
        }
        let rank = action.first().map_or(0, IntMatrix::rows);
        let labels = labels.unwrap_or_else(|| default_labels(rank));
        if labels.len() != rank {
            return Err(Error::DimensionMismatch(format!("{} labels for rank {rank}", labels.len())));
        }
        let lat = GLattice {
            name: name.into(),
            group,
            rank,
            action,
            labels,
        };
        lat.check_homomorphism()?;
        Ok(lat)
    }

    /// The group acting on Z^degree through its own matrices.
    pub fn tautological(name: impl Into<String>, group: Arc<FiniteMatrixGroup>) -> Self {
        let action = group.elements().to_vec();
        let rank = group.degree();
        GLattice {
            name: name.into(),
            group,
            rank,
            action,
            labels: default_labels(rank),
        }
    }

    /// The zero lattice over `group`.
    pub fn zero(group: Arc<FiniteMatrixGroup>) -> Self {
        let action = vec![IntMatrix::zeros(0, 0); group.order()];
        GLattice {
            name: "0".into(),
            group,
            rank: 0,
            action,
            labels: Vec::new(),
        }
    }

    /// `action(x) * action(g) == action(x g)` for every element `x` and
    /// generator `g`, which together with `action(1) = I` makes the table a
    /// homomorphism.
    fn check_homomorphism(&self) -> Result<()> {
        if !self.action[0].is_identity() {
            return Err(Error::NotAHomomorphism("identity does not act trivially".into()));
        }
        let gens = self.group.generator_indices();
        for x in 0..self.group.order() {
            if !self.action[x].is_unimodular() {
                return Err(Error::NotAHomomorphism(format!(
                    "element {} does not act unimodularly",
                    self.group.word_label(x)
                )));
            }
            for &g in &gens {
                if &self.action[x] * &self.action[g] != self.action[self.group.mul(x, g)] {
                    return Err(Error::NotAHomomorphism(format!(
                        "action({}) * action({}) != action of the product",
                        self.group.word_label(x),
                        self.group.word_label(g)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Verifies the homomorphism property on the full multiplication table.
    pub fn check_full_table(&self) -> Result<()> {
        let n = self.group.order();
        for a in 0..n {
            for b in 0..n {
                if &self.action[a] * &self.action[b] != self.action[self.group.mul(a, b)] {
                    return Err(Error::NotAHomomorphism(format!("table entry ({a}, {b})")));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.rank {
            return Err(Error::DimensionMismatch(format!("{} labels for rank {}", labels.len(), self.rank)));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn group(&self) -> &Arc<FiniteMatrixGroup> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self, x: usize) -> &IntMatrix {
        &self.action[x]
    }

    pub fn action_table(&self) -> &[IntMatrix] {
        &self.action
    }

    pub fn generator_action(&self) -> Vec<IntMatrix> {
        self.group
            .generator_indices()
            .into_iter()
            .map(|x| self.action[x].clone())
            .collect()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Renders an integer vector in this lattice's basis labels.
    pub fn render_vector(&self, v: &[BigInt]) -> String {
        render_combination(v, &self.labels)
    }

    /// The Q-dimension of the fixed space of each element's action, i.e. the character.
    pub fn character(&self) -> Vec<BigInt> {
        self.action
            .iter()
            .map(|m| (0..self.rank).map(|i| m.get(i, i).clone()).sum())
            .collect()
    }

    /// Rank of the sublattice fixed by `u`.
    pub fn fixed_rank(&self, u: &Subgroup) -> usize {
        fixed_basis(self, u.members()).cols()
    }

    /// The action on a saturated invariant sublattice with the given basis
    /// (columns). Labels render each basis vector in the ambient labels.
    pub fn induced_on_sublattice(&self, name: impl Into<String>, basis: &IntMatrix) -> Result<GLattice> {
        if basis.rows() != self.rank {
            return Err(Error::DimensionMismatch("sublattice basis has wrong length".into()));
        }
        let gens: Vec<IntMatrix> = self
            .group
            .generator_indices()
            .into_iter()
            .map(|g| solve_in_basis(basis, &(&self.action[g] * basis)))
            .collect::<Result<_>>()
            .map_err(|_| Error::InvalidParameter("sublattice is not invariant".into()))?;
        let labels = (0..basis.cols()).map(|j| self.render_vector(&basis.column(j))).collect();
        if basis.cols() == 0 {
            return Ok(GLattice::zero(Arc::clone(&self.group)).with_name(name));
        }
        GLattice::from_generator_action(name, Arc::clone(&self.group), gens, Some(labels))
    }
}

/// Renders `sum v_i * label_i` as e.g. `2*s - l_1 + l_-1`.
pub fn render_combination(v: &[BigInt], labels: &[String]) -> String {
    let mut out = String::new();
    for (c, l) in v.iter().zip(labels) {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let a = c.abs();
        if !a.is_one() {
            out.push_str(&format!("{a}*"));
        }
        out.push_str(l);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Saturated Hermite basis of the vectors fixed by the given elements.
fn fixed_basis(n: &GLattice, elements: &[usize]) -> IntMatrix {
    let mut kb = KernelBuilder::new(n.rank);
    let id = IntMatrix::identity(n.rank);
    for &x in elements {
        if x == 0 {
            continue;
        }
        let d = n.action(x) - &id;
        for i in 0..n.rank {
            kb.add_dense_row(d.row(i));
        }
    }
    kb.finish()
}

/// Z[G/H] with basis the left cosets `xH`, ordered by their smallest element index.
pub fn permutation_lattice(g: &Arc<FiniteMatrixGroup>, h: &Subgroup) -> Result<GLattice> {
    permutation_lattice_named(g, h, "H")
}

pub(crate) fn permutation_lattice_named(g: &Arc<FiniteMatrixGroup>, h: &Subgroup, hname: &str) -> Result<GLattice> {
    if !same_group(g, h.parent()) {
        return Err(Error::GroupMismatch);
    }
    let mut coset_of = vec![usize::MAX; g.order()];
    let mut reps = Vec::new();
    for x in 0..g.order() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        for &y in h.members() {
            coset_of[g.mul(x, y)] = c;
        }
    }
    let rank = reps.len();
    let action = (0..g.order())
        .map(|a| {
            let mut m = IntMatrix::zeros(rank, rank);
            for (j, &r) in reps.iter().enumerate() {
                m.set(coset_of[g.mul(a, r)], j, BigInt::one());
            }
            m
        })
        .collect();
    let labels = reps
        .iter()
        .map(|&r| format!("{}{}", bracket_word(g, r), hname))
        .collect();
    GLattice::from_element_action(format!("Z[G/{hname}]"), Arc::clone(g), action, Some(labels))
}

fn bracket_word(g: &FiniteMatrixGroup, x: usize) -> String {
    let w = g.word_label(x);
    if w.contains('*') {
        format!("({w})")
    } else {
        w
    }
}

/// The kernel of Z[G] -> Z in the basis `e_x - e_1`, `x != 1`.
pub fn augmentation_ideal(g: &Arc<FiniteMatrixGroup>) -> GLattice {
    let n = g.order();
    let rank = n - 1;
    // basis vector b_x (x >= 1) sits at position x - 1; g.b_x = b_{gx} - b_g
    let action = (0..n)
        .map(|a| {
            let mut m = IntMatrix::zeros(rank, rank);
            for x in 1..n {
                let gx = g.mul(a, x);
                if gx != 0 {
                    let v = m.get(gx - 1, x - 1) + BigInt::one();
                    m.set(gx - 1, x - 1, v);
                }
                if a != 0 {
                    let v = m.get(a - 1, x - 1) - BigInt::one();
                    m.set(a - 1, x - 1, v);
                }
            }
            m
        })
        .collect();
    let labels = (1..n).map(|x| format!("e[{}]-e[1]", g.word_label(x))).collect();
    GLattice::from_element_action("I_G", Arc::clone(g), action, Some(labels)).expect("augmentation ideal is a G-lattice")
}

/// Hom(N, Z) with the contragredient action in the dual basis.
pub fn dual(n: &GLattice) -> GLattice {
    let action = (0..n.group.order())
        .map(|x| n.action[n.group.inverse(x)].transpose())
        .collect();
    let name = match n.name.strip_suffix('°') {
        Some(base) => base.to_string(),
        None => format!("{}°", n.name),
    };
    let labels = n
        .labels
        .iter()
        .map(|l| match l.strip_suffix('*') {
            Some(base) => base.to_string(),
            None => format!("{l}*"),
        })
        .collect();
    GLattice {
        name,
        group: Arc::clone(&n.group),
        rank: n.rank,
        action,
        labels,
    }
}

pub fn direct_sum(a: &GLattice, b: &GLattice) -> Result<GLattice> {
    if !same_group(&a.group, &b.group) {
        return Err(Error::GroupMismatch);
    }
    let action = a.action.iter().zip(&b.action).map(|(x, y)| x.block_diag(y)).collect();
    let mut labels = a.labels.clone();
    labels.extend(b.labels.iter().cloned());
    let name = match (a.rank, b.rank) {
        (_, 0) => a.name.clone(),
        (0, _) => b.name.clone(),
        _ => format!("{} + {}", a.name, b.name),
    };
    Ok(GLattice {
        name,
        group: Arc::clone(&a.group),
        rank: a.rank + b.rank,
        action,
        labels,
    })
}

/// Same lattice, with the group replaced by `u` re-enumerated from its own generators.
pub fn restrict(n: &GLattice, u: &Subgroup) -> Result<GLattice> {
    if !same_group(&n.group, u.parent()) {
        return Err(Error::GroupMismatch);
    }
    let (h, map) = u.to_group()?;
    let action = map.iter().map(|&p| n.action[p].clone()).collect();
    Ok(GLattice {
        name: format!("{}|{}", n.name, u.label()),
        group: h,
        rank: n.rank,
        action,
        labels: n.labels.clone(),
    })
}

/// `N^u` for a normal subgroup `u`, with the action of the whole group
/// (which factors through the quotient) and the embedding into `N`.
pub fn fixed_sublattice(n: &GLattice, u: &Subgroup) -> Result<(GLattice, IntMatrix)> {
    if !same_group(&n.group, u.parent()) {
        return Err(Error::GroupMismatch);
    }
    if !u.is_normal() {
        return Err(Error::NotNormal);
    }
    let basis = fixed_basis(n, u.members());
    let lat = n.induced_on_sublattice(format!("{}^{}", n.name, u.label()), &basis)?;
    Ok((lat, basis))
}

pub fn is_permutation_in_basis(n: &GLattice) -> bool {
    n.action.iter().all(IntMatrix::is_permutation)
}

/// All equivariant maps `source -> target`, i.e. integer matrices `X` with
/// `X * source(g) = target(g) * X`.
#[derive(Clone, Debug)]
pub struct LatticeMorphismSpace {
    pub source: GLattice,
    pub target: GLattice,
    pub basis: Vec<IntMatrix>,
}

impl LatticeMorphismSpace {
    pub fn compute(source: &GLattice, target: &GLattice) -> Result<Self> {
        if !same_group(&source.group, &target.group) {
            return Err(Error::GroupMismatch);
        }
        let (ra, rb) = (source.rank, target.rank);
        let mut kb = KernelBuilder::new(ra * rb);
        for g in source.group.generator_indices() {
            let a = source.action(g);
            let b = target.action(g);
            for i in 0..rb {
                for j in 0..ra {
                    // sum_k X[i,k] a[k,j] - sum_k b[i,k] X[k,j]
                    let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
                    for k in 0..ra {
                        let v = a.get(k, j);
                        if !v.is_zero() {
                            *acc.entry(i * ra + k).or_default() += v;
                        }
                    }
                    for k in 0..rb {
                        let v = b.get(i, k);
                        if !v.is_zero() {
                            *acc.entry(k * ra + j).or_default() -= v;
                        }
                    }
                    let row: SparseRow = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                    if !row.is_empty() {
                        kb.add_row(&row);
                    }
                }
            }
        }
        let k = kb.finish();
        let basis = (0..k.cols())
            .map(|c| IntMatrix::from_vec(rb, ra, k.column(c)).expect("shape"))
            .collect();
        Ok(LatticeMorphismSpace {
            source: source.clone(),
            target: target.clone(),
            basis,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_equivariant(&self, x: &IntMatrix) -> bool {
        is_equivariant_map(&self.source, &self.target, x)
    }
}

pub fn is_equivariant_map(source: &GLattice, target: &GLattice, x: &IntMatrix) -> bool {
    x.rows() == target.rank
        && x.cols() == source.rank
        && (0..source.group.order()).all(|g| x * source.action(g) == target.action(g) * x)
}

/// Dimension of the rational space of equivariant maps, from characters.
pub fn morphism_dimension(a: &GLattice, b: &GLattice) -> usize {
    let (ca, cb) = (a.character(), b.character());
    let total: BigInt = ca.iter().zip(&cb).map(|(x, y)| x * y).sum();
    let d = total / BigInt::from(a.group.order());
    d.try_into().unwrap_or(usize::MAX)
}

pub const DEFAULT_COEFF_BOUND: u32 = 3;

/// Knobs for the bounded isomorphism search. All of them are echoed in
/// reports so an `Unknown` outcome is reproducible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub coeff_bound: u32,
    /// Candidate intertwiners tried before giving up.
    pub max_candidates: u64,
    /// Largest morphism-space dimension worth enumerating.
    pub max_morphism_dim: usize,
    /// Largest `rank(a) * rank(b)` for which the morphism space is solved.
    pub max_unknowns: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            coeff_bound: DEFAULT_COEFF_BOUND,
            max_candidates: 250_000,
            max_morphism_dim: 16,
            max_unknowns: 1024,
        }
    }
}

impl SearchLimits {
    pub fn with_coeff_bound(coeff_bound: u32) -> Self {
        SearchLimits {
            coeff_bound,
            ..Self::default()
        }
    }
}

impl fmt::Display for SearchLimits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "coeff_bound={} max_candidates={} max_morphism_dim={} max_unknowns={}",
            self.coeff_bound, self.max_candidates, self.max_morphism_dim, self.max_unknowns
        )
    }
}

/// Why two lattices cannot be isomorphic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub invariant: String,
    pub left: String,
    pub right: String,
}

impl fmt::Display for Refutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} vs {}", self.invariant, self.left, self.right)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoOutcome {
    /// A unimodular equivariant `X : a -> b`.
    Proven(IntMatrix),
    Refuted(Refutation),
    Unknown(String),
}

impl IsoOutcome {
    pub fn is_proven(&self) -> bool {
        matches!(self, IsoOutcome::Proven(_))
    }
}

/// Which refutation certificates to try before searching.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refutations {
    /// Caller already knows all invariants agree.
    Skip,
    /// Rank and fixed ranks.
    Cheap,
    /// Rank, fixed ranks, and H^1 profiles of the lattices and their duals.
    Full,
}

pub fn equivariant_iso_search(a: &GLattice, b: &GLattice, coeff_bound: u32) -> Result<IsoOutcome> {
    equivariant_iso_search_with(a, b, &SearchLimits::with_coeff_bound(coeff_bound), Refutations::Full)
}

/// Cheap certificates first: rank, fixed ranks per subgroup, then (when
/// `use_cohomology`) H^1 of the lattice and of its dual per subgroup.
pub fn refute_isomorphism(a: &GLattice, b: &GLattice, use_cohomology: bool) -> Result<Option<Refutation>> {
    if !same_group(&a.group, &b.group) {
        return Err(Error::GroupMismatch);
    }
    if a.rank != b.rank {
        return Ok(Some(Refutation {
            invariant: "rank".into(),
            left: a.rank.to_string(),
            right: b.rank.to_string(),
        }));
    }
    let subs = subgroups(&a.group);
    for u in &subs {
        let (fa, fb) = (a.fixed_rank(u), b.fixed_rank(u));
        if fa != fb {
            return Ok(Some(Refutation {
                invariant: format!("fixed rank under {}", u.label()),
                left: fa.to_string(),
                right: fb.to_string(),
            }));
        }
    }
    if use_cohomology {
        for (side, la, lb) in [("H1", a.clone(), b.clone()), ("H1 of dual", dual(a), dual(b))] {
            let pa = cohomology::h1_profile(&la)?;
            let pb = cohomology::h1_profile(&lb)?;
            for (i, u) in pa.subgroups.iter().enumerate() {
                if pa.entries[i] != pb.entries[i] {
                    return Ok(Some(Refutation {
                        invariant: format!("{side} over {}", u.label()),
                        left: pa.entries[i].to_string(),
                        right: pb.entries[i].to_string(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

pub fn equivariant_iso_search_with(
    a: &GLattice,
    b: &GLattice,
    limits: &SearchLimits,
    refutations: Refutations,
) -> Result<IsoOutcome> {
    if !same_group(&a.group, &b.group) {
        return Err(Error::GroupMismatch);
    }
    if refutations != Refutations::Skip {
        if let Some(r) = refute_isomorphism(a, b, refutations == Refutations::Full)? {
            return Ok(IsoOutcome::Refuted(r));
        }
    } else if a.rank != b.rank {
        return Err(Error::InvalidParameter("isomorphism search between lattices of different rank".into()));
    }
    if a.action == b.action {
        return Ok(IsoOutcome::Proven(IntMatrix::identity(a.rank)));
    }
    let dim = morphism_dimension(a, b);
    if dim > limits.max_morphism_dim {
        return Ok(IsoOutcome::Unknown(format!(
            "morphism space has dimension {dim} > {}",
            limits.max_morphism_dim
        )));
    }
    if a.rank * b.rank > limits.max_unknowns {
        return Ok(IsoOutcome::Unknown(format!(
            "{} unknowns exceed the limit of {}",
            a.rank * b.rank,
            limits.max_unknowns
        )));
    }
    let space = LatticeMorphismSpace::compute(a, b)?;
    if space.dim() != dim {
        return Err(Error::invariant("morphism space dimension disagrees with characters"));
    }
    match search_unimodular(&space, limits) {
        Some(x) => {
            if !x.is_unimodular() || !space.is_equivariant(&x) {
                return Err(Error::invariant("isomorphism witness failed re-verification"));
            }
            Ok(IsoOutcome::Proven(x))
        }
        None => Ok(IsoOutcome::Unknown(format!(
            "no unimodular intertwiner with coefficients in [-{0}, {0}] among the first {1} candidates",
            limits.coeff_bound, limits.max_candidates
        ))),
    }
}

const SIEVE_PRIME: i64 = 2_147_483_629;

fn residue(x: &BigInt) -> i64 {
    let p = BigInt::from(SIEVE_PRIME);
    let r = ((x % &p) + &p) % &p;
    i64::try_from(r).expect("residue fits")
}

#[allow(clippy::needless_range_loop)]
fn det_mod_p(m: &mut [Vec<i64>]) -> i64 {
    let n = m.len();
    let p = SIEVE_PRIME as i128;
    let mut det: i128 = 1;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| m[r][c] != 0) else {
            return 0;
        };
        if piv != c {
            m.swap(piv, c);
            det = (p - det) % p;
        }
        let pv = m[c][c] as i128;
        det = det * pv % p;
        let inv = mod_pow(pv, p - 2, p);
        for r in c + 1..n {
            if m[r][c] == 0 {
                continue;
            }
            let f = (m[r][c] as i128) * inv % p;
            for k in c..n {
                let v = (m[r][k] as i128 - f * m[c][k] as i128) % p;
                m[r][k] = ((v + p) % p) as i64;
            }
        }
    }
    det as i64
}

fn mod_pow(mut b: i128, mut e: i128, p: i128) -> i128 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Coefficient vectors in shells of growing sup-norm, each shell in
/// odometer order over the values `0, 1, -1, 2, -2, ...`.
fn search_unimodular(space: &LatticeMorphismSpace, limits: &SearchLimits) -> Option<IntMatrix> {
    let m = space.dim();
    let r = space.source.rank;
    if m == 0 {
        return (r == 0).then(|| IntMatrix::zeros(0, 0));
    }
    let basis_mod: Vec<Vec<i64>> = space
        .basis
        .iter()
        .map(|b| b.entries().iter().map(residue).collect())
        .collect();
    let p = SIEVE_PRIME;
    let mut tried: u64 = 0;
    for bound in 1..=limits.coeff_bound as i64 {
        let values: Vec<i64> = std::iter::once(0)
            .chain((1..=bound).flat_map(|v| [v, -v]))
            .collect();
        let mut digits = vec![0usize; m];
        'odometer: loop {
            let coeffs: Vec<i64> = digits.iter().map(|&d| values[d]).collect();
            if coeffs.iter().any(|c| c.abs() == bound) {
                tried += 1;
                if tried > limits.max_candidates {
                    return None;
                }
                let mut mat = vec![vec![0i64; r]; r];
                for (c, bm) in coeffs.iter().zip(&basis_mod) {
                    if *c == 0 {
                        continue;
                    }
                    let cm = ((*c % p) + p) % p;
                    for (idx, v) in bm.iter().enumerate() {
                        if *v != 0 {
                            let cell = &mut mat[idx / r][idx % r];
                            *cell = ((*cell as i128 + cm as i128 * *v as i128) % p as i128) as i64;
                        }
                    }
                }
                let d = det_mod_p(&mut mat);
                if d == 1 || d == p - 1 {
                    let mut x = IntMatrix::zeros(r, r);
                    for (c, bm) in coeffs.iter().zip(&space.basis) {
                        if *c != 0 {
                            x = add(&x, &(&IntMatrix::scalar(r, *c) * bm));
                        }
                    }
                    if x.is_unimodular() {
                        return Some(x);
                    }
                }
            }
            // last digit fastest
            let mut pos = m;
            loop {
                if pos == 0 {
                    break 'odometer;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < values.len() {
                    continue 'odometer;
                }
                digits[pos] = 0;
            }
        }
    }
    None
}

fn add(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    a - &b.neg()
}

/// Kernel of the stacked `action(x) - I` over the given elements.
pub fn fixed_vectors(n: &GLattice, elements: &[usize]) -> IntMatrix {
    fixed_basis(n, elements)
}

/// Kernel of an equivariant map as a G-lattice (saturated).
pub fn kernel_lattice(source: &GLattice, map: &IntMatrix, name: impl Into<String>) -> Result<(GLattice, IntMatrix)> {
    let k = kernel_basis(map);
    let lat = source.induced_on_sublattice(name, &k)?;
    Ok((lat, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::generate;

    fn c2() -> Arc<FiniteMatrixGroup> {
        generate(1, vec![("t".into(), IntMatrix::scalar(1, -1))]).unwrap()
    }

    fn sign(g: &Arc<FiniteMatrixGroup>) -> GLattice {
        GLattice::from_generator_action("sign", Arc::clone(g), vec![IntMatrix::scalar(1, -1)], None).unwrap()
    }

    fn trivial1(g: &Arc<FiniteMatrixGroup>) -> GLattice {
        GLattice::from_generator_action("Z", Arc::clone(g), vec![IntMatrix::identity(1)], None).unwrap()
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
    fn generator_images_must_respect_relations() {
        let g = generate(1, vec![("t".into(), IntMatrix::identity(1))]).unwrap();
        let err = GLattice::from_generator_action("bad", g, vec![IntMatrix::scalar(1, -1)], None).unwrap_err();
        assert!(matches!(err, Error::NotAHomomorphism(_)));
        let sq = generate(2, vec![("j".into(), IntMatrix::from_rows(&[[0, -1], [1, 0]]))]).unwrap();
        // order 4 maps onto order 2 or 1
        assert!(GLattice::from_generator_action("ok", Arc::clone(&sq), vec![IntMatrix::scalar(1, -1)], None).is_ok());
        assert!(GLattice::from_generator_action("ok", sq, vec![IntMatrix::identity(1)], None).is_ok());
    }

    #[test]
    fn permutation_lattice_basics() {
        let g = c2();
        let whole = Subgroup::whole(&g);
        let z = permutation_lattice(&g, &whole).unwrap();
        assert_eq!(z.rank(), 1);
        assert!(z.action(1).is_identity());

        let reg = permutation_lattice(&g, &Subgroup::trivial(&g)).unwrap();
        assert_eq!(reg.rank(), 2);
        assert_eq!(reg.action(1), &IntMatrix::from_rows(&[[0, 1], [1, 0]]));

        let k = klein();
        let subs = subgroups(&k);
        let c = &subs[1];
        assert_eq!(c.order(), 2);
        let p = permutation_lattice(&k, c).unwrap();
        assert_eq!(p.rank(), 2);
        assert!(is_permutation_in_basis(&p));
        p.check_full_table().unwrap();
    }

    #[test]
    fn augmentation_ideal_small_cases() {
        let g = c2();
        let i = augmentation_ideal(&g);
        assert_eq!(i.rank(), 1);
        assert_eq!(i.action(1), &IntMatrix::scalar(1, -1));

        let t = Arc::new(FiniteMatrixGroup::trivial(2));
        assert_eq!(augmentation_ideal(&t).rank(), 0);

        let k = klein();
        let ik = augmentation_ideal(&k);
        assert_eq!(ik.rank(), 3);
        ik.check_full_table().unwrap();
    }

    #[test]
    fn dual_properties() {
        let k = klein();
        let m = GLattice::tautological("M", Arc::clone(&k));
        assert_eq!(dual(&dual(&m)).action_table(), m.action_table());
        assert_eq!(dual(&dual(&m)).name(), "M");
        let p = permutation_lattice(&k, &Subgroup::trivial(&k)).unwrap();
        assert_eq!(dual(&p).action_table(), p.action_table());
        let g = c2();
        assert_eq!(dual(&sign(&g)).action_table(), sign(&g).action_table());
    }

    #[test]
    fn direct_sum_properties() {
        let g = c2();
        let s = sign(&g);
        let ss = direct_sum(&s, &s).unwrap();
        assert_eq!(ss.action(1), &IntMatrix::scalar(2, -1));
        let z0 = GLattice::zero(Arc::clone(&g));
        assert_eq!(direct_sum(&s, &z0).unwrap(), s);
        let other = c2();
        let foreign = GLattice::from_generator_action("x", generate(2, vec![("u".into(), IntMatrix::scalar(2, -1))]).unwrap(), vec![IntMatrix::scalar(1, -1)], None).unwrap();
        assert_eq!(direct_sum(&s, &foreign).unwrap_err(), Error::GroupMismatch);
        // structurally equal groups are accepted
        assert!(direct_sum(&s, &sign(&other)).is_ok());
    }

    #[test]
    fn restrict_to_trivial_and_whole() {
        let k = klein();
        let m = GLattice::tautological("M", Arc::clone(&k));
        let r = restrict(&m, &Subgroup::trivial(&k)).unwrap();
        assert_eq!(r.group().order(), 1);
        assert!(r.action(0).is_identity());
        let w = restrict(&m, &Subgroup::whole(&k)).unwrap();
        assert_eq!(w.group().order(), 4);
        assert!(w.action_table().iter().all(|a| m.action_table().contains(a)));
    }

    #[test]
    fn fixed_sublattice_cases() {
        let g = c2();
        let (f, emb) = fixed_sublattice(&sign(&g), &Subgroup::whole(&g)).unwrap();
        assert_eq!(f.rank(), 0);
        assert_eq!(emb.cols(), 0);

        let k = klein();
        let m = GLattice::tautological("M", Arc::clone(&k));
        let (f, emb) = fixed_sublattice(&m, &Subgroup::trivial(&k)).unwrap();
        assert_eq!(f.rank(), 3);
        assert!(emb.is_identity());
    }

    #[test]
    fn fixed_sublattice_requires_normal() {
        let s3 = generate(
            2,
            vec![
                ("r".into(), IntMatrix::from_rows(&[[0, -1], [1, -1]])),
                ("s".into(), IntMatrix::from_rows(&[[0, 1], [1, 0]])),
            ],
        )
        .unwrap();
        let m = GLattice::tautological("A2", Arc::clone(&s3));
        let refl = subgroups(&s3).into_iter().find(|u| u.order() == 2).unwrap();
        assert_eq!(fixed_sublattice(&m, &refl).unwrap_err(), Error::NotNormal);
    }

    #[test]
    fn fixed_rank_of_permutation_lattice_counts_orbits() {
        let mut gens = klein().generators().to_vec();
        gens.push(("g".into(), IntMatrix::scalar(3, -1)));
        let w = generate(3, gens).unwrap();
        let subs = subgroups(&w);
        for h in &subs {
            let p = permutation_lattice(&w, h).unwrap();
            for u in &subs {
                // orbits of u on cosets, counted directly
                let mut seen = vec![false; p.rank()];
                let mut orbits = 0;
                for start in 0..p.rank() {
                    if seen[start] {
                        continue;
                    }
                    orbits += 1;
                    for &x in u.members() {
                        let col = p.action(x).column(start);
                        let tgt = col.iter().position(|v| v.is_one()).unwrap();
                        seen[tgt] = true;
                    }
                }
                assert_eq!(p.fixed_rank(u), orbits);
            }
        }
    }

    #[test]
    fn iso_search_identity_and_refutation() {
        let g = c2();
        let s = sign(&g);
        assert_eq!(equivariant_iso_search(&s, &s, 3).unwrap(), IsoOutcome::Proven(IntMatrix::identity(1)));
        match equivariant_iso_search(&s, &trivial1(&g), 3).unwrap() {
            IsoOutcome::Refuted(r) => assert!(r.invariant.starts_with("fixed rank")),
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn iso_search_finds_permutation_swap() {
        let g = c2();
        let reg = permutation_lattice(&g, &Subgroup::trivial(&g)).unwrap();
        let a = direct_sum(&trivial1(&g), &reg).unwrap();
        let b = direct_sum(&reg, &trivial1(&g)).unwrap();
        match equivariant_iso_search(&a, &b, 3).unwrap() {
            IsoOutcome::Proven(x) => {
                assert!(x.is_unimodular());
                assert!(is_equivariant_map(&a, &b, &x));
            }
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn morphism_space_dimension_matches_characters() {
        let k = klein();
        let m = GLattice::tautological("M", Arc::clone(&k));
        let i = augmentation_ideal(&k);
        let space = LatticeMorphismSpace::compute(&i, &m).unwrap();
        assert_eq!(space.dim(), morphism_dimension(&i, &m));
        assert_eq!(space.dim(), 3);
        for x in &space.basis {
            assert!(space.is_equivariant(x));
        }
    }

    #[test]
    fn render_combination_format() {
        let labels: Vec<String> = ["s", "l", "l_1"].iter().map(|s| s.to_string()).collect();
        let v: Vec<BigInt> = [2, 0, -1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(render_combination(&v, &labels), "2*s - l_1");
        let z: Vec<BigInt> = vec![BigInt::zero(); 3];
        assert_eq!(render_combination(&z, &labels), "0");
    }
}
