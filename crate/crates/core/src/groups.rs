//! Finite subgroups of GL(n, Z) given by generators.
//!
//! Elements are enumerated breadth-first over generator words with the
//! generators taken in input order, so element indices are reproducible and
//! index 0 is always the identity. Element order is part of every report.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::zlinalg::{quotient_structure, FiniteAbelianGroup, IntMatrix};

pub const DEFAULT_ELEMENT_CAP: usize = 10_000;

#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    degree: usize,
    generators: Vec<(String, IntMatrix)>,
    elements: Vec<IntMatrix>,
    index: HashMap<IntMatrix, usize>,
    words: Vec<Vec<usize>>,
    /// `right_mul[x][k]` = index of `x * generator_k`
    right_mul: Vec<Vec<usize>>,
    mul_table: Vec<Vec<usize>>,
    inverses: Vec<usize>,
    factors: Option<(Vec<String>, Vec<String>)>,
}

impl PartialEq for FiniteMatrixGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.generators == other.generators && self.elements == other.elements
    }
}

impl Eq for FiniteMatrixGroup {}

impl FiniteMatrixGroup {
    pub fn generate(degree: usize, generators: Vec<(String, IntMatrix)>) -> Result<Self> {
        Self::generate_with_cap(degree, generators, DEFAULT_ELEMENT_CAP)
    }

    pub fn generate_with_cap(degree: usize, generators: Vec<(String, IntMatrix)>, cap: usize) -> Result<Self> {
        let mut seen_names = BTreeSet::new();
        for (name, m) in &generators {
            if !seen_names.insert(name.as_str()) {
                return Err(Error::InvalidParameter(format!("duplicate generator name `{name}`")));
            }
            if m.rows() != degree || m.cols() != degree {
                return Err(Error::DimensionMismatch(format!(
                    "generator `{name}` is {}x{}, expected {degree}x{degree}",
                    m.rows(),
                    m.cols()
                )));
            }
            let det = m.determinant()?;
            if !det.abs().is_one() {
                return Err(Error::NotUnimodular {
                    name: name.clone(),
                    det: det.to_string(),
                });
            }
        }

        let mut elements = vec![IntMatrix::identity(degree)];
        let mut index = HashMap::from([(elements[0].clone(), 0)]);
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut right_mul: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            let mut row = Vec::with_capacity(generators.len());
            for (k, (_, g)) in generators.iter().enumerate() {
                let p = &elements[x] * g;
                let idx = match index.get(&p) {
                    Some(&i) => i,
                    None => {
                        if elements.len() >= cap {
                            return Err(Error::NotFinite { cap });
                        }
                        let i = elements.len();
                        let mut w = words[x].clone();
                        w.push(k);
                        words.push(w);
                        index.insert(p.clone(), i);
                        elements.push(p);
                        queue.push_back(i);
                        i
                    }
                };
                row.push(idx);
            }
            // queue pops in index order, so rows arrive in index order
            right_mul.push(row);
        }

        let n = elements.len();
        let mut mul_table = vec![vec![0usize; n]; n];
        for (a, row) in mul_table.iter_mut().enumerate() {
            for (b, slot) in row.iter_mut().enumerate() {
                *slot = words[b].iter().fold(a, |acc, &k| right_mul[acc][k]);
            }
        }
        let mut inverses = vec![0usize; n];
        for a in 0..n {
            inverses[a] = (0..n)
                .find(|&b| mul_table[a][b] == 0)
                .ok_or_else(|| Error::invariant("element without inverse"))?;
        }

        Ok(FiniteMatrixGroup {
            degree,
            generators,
            elements,
            index,
            words,
            right_mul,
            mul_table,
            inverses,
            factors: None,
        })
    }

    /// The trivial group in the given degree.
    pub fn trivial(degree: usize) -> Self {
        Self::generate(degree, Vec::new()).expect("trivial group")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[(String, IntMatrix)] {
        &self.generators
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.generators.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Element index of each generator.
    pub fn generator_indices(&self) -> Vec<usize> {
        (0..self.generators.len()).map(|k| self.right_mul[0][k]).collect()
    }

    pub fn elements(&self) -> &[IntMatrix] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &IntMatrix {
        &self.elements[i]
    }

    pub fn index_of(&self, m: &IntMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn word(&self, i: usize) -> &[usize] {
        &self.words[i]
    }

    /// The element's word in generator names, `1` for the identity.
    pub fn word_label(&self, i: usize) -> String {
        if self.words[i].is_empty() {
            "1".to_string()
        } else {
            self.words[i]
                .iter()
                .map(|&k| self.generators[k].0.as_str())
                .collect::<Vec<_>>()
                .join("*")
        }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul_table[a][b]
    }

    pub fn mul_table(&self) -> &[Vec<usize>] {
        &self.mul_table
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        (0..self.order()).map(|a| self.element_order(a)).fold(1, num_integer::lcm)
    }

    pub fn is_abelian(&self) -> bool {
        let gens = self.generator_indices();
        gens.iter()
            .all(|&a| gens.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Generator names of the two factors when built by [`direct_product_action`].
    pub fn product_factors(&self) -> Option<&(Vec<String>, Vec<String>)> {
        self.factors.as_ref()
    }

    /// Closure of a set of element indices under multiplication.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut members = BTreeSet::from([0usize]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if members.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        members.into_iter().collect()
    }
}

/// Generates the group and wraps it for sharing.
pub fn generate(degree: usize, generators: Vec<(String, IntMatrix)>) -> Result<Arc<FiniteMatrixGroup>> {
    FiniteMatrixGroup::generate(degree, generators).map(Arc::new)
}

/// A subgroup of a [`FiniteMatrixGroup`], stored as a sorted set of element indices.
#[derive(Clone)]
pub struct Subgroup {
    parent: Arc<FiniteMatrixGroup>,
    members: Vec<usize>,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && *self.parent == *other.parent
    }
}

impl Eq for Subgroup {}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.members)
    }
}

impl Subgroup {
    /// The subgroup generated by the given element indices.
    pub fn generated_by(parent: &Arc<FiniteMatrixGroup>, gens: &[usize]) -> Self {
        Subgroup {
            members: parent.closure(gens),
            parent: Arc::clone(parent),
        }
    }

    pub fn whole(parent: &Arc<FiniteMatrixGroup>) -> Self {
        Subgroup {
            members: (0..parent.order()).collect(),
            parent: Arc::clone(parent),
        }
    }

    pub fn trivial(parent: &Arc<FiniteMatrixGroup>) -> Self {
        Subgroup {
            members: vec![0],
            parent: Arc::clone(parent),
        }
    }

    /// Validates closure; `members` need not be sorted.
    pub fn from_members(parent: &Arc<FiniteMatrixGroup>, members: &[usize]) -> Result<Self> {
        let set: BTreeSet<usize> = members.iter().copied().collect();
        if set.iter().any(|&x| x >= parent.order()) {
            return Err(Error::InvalidParameter("subgroup member out of range".into()));
        }
        if !set.contains(&0) || set.iter().any(|&a| set.iter().any(|&b| !set.contains(&parent.mul(a, b)))) {
            return Err(Error::InvalidParameter("member set is not closed under multiplication".into()));
        }
        Ok(Subgroup {
            parent: Arc::clone(parent),
            members: set.into_iter().collect(),
        })
    }

    pub fn parent(&self) -> &Arc<FiniteMatrixGroup> {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.members.len() == self.parent.order()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        Subgroup {
            parent: Arc::clone(&self.parent),
            members: self.members.iter().copied().filter(|&x| other.contains(x)).collect(),
        }
    }

    pub fn is_normal(&self) -> bool {
        let p = &self.parent;
        (0..p.order()).all(|g| {
            let gi = p.inverse(g);
            self.members.iter().all(|&x| self.contains(p.mul(p.mul(g, x), gi)))
        })
    }

    pub fn conjugate(&self, g: usize) -> Subgroup {
        let p = &self.parent;
        let gi = p.inverse(g);
        let mut members: Vec<usize> = self.members.iter().map(|&x| p.mul(p.mul(g, x), gi)).collect();
        members.sort_unstable();
        Subgroup {
            parent: Arc::clone(p),
            members,
        }
    }

    /// A small generating set: members in index order, each kept only if it
    /// is not already in the span of the previously kept ones.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = BTreeSet::from([0usize]);
        for &x in &self.members {
            if !span.contains(&x) {
                gens.push(x);
                span = self.parent.closure(&gens).into_iter().collect();
            }
        }
        gens
    }

    /// Generators as words in the parent's generator names, e.g. `[rho, sigma*g]`.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.generators().iter().map(|&x| self.parent.word_label(x)).collect();
        format!("<{}>", parts.join(", "))
    }

    pub fn is_cyclic(&self) -> bool {
        self.members.iter().any(|&x| self.parent.element_order(x) == self.order())
    }

    /// The subgroup re-enumerated as a group in its own right, together with
    /// the map from its element indices to the parent's.
    pub fn to_group(&self) -> Result<(Arc<FiniteMatrixGroup>, Vec<usize>)> {
        let gens: Vec<(String, IntMatrix)> = self
            .generators()
            .into_iter()
            .map(|x| (self.parent.word_label(x), self.parent.element(x).clone()))
            .collect();
        let g = FiniteMatrixGroup::generate(self.parent.degree(), gens)?;
        let map: Vec<usize> = g
            .elements()
            .iter()
            .map(|m| self.parent.index_of(m).ok_or_else(|| Error::invariant("subgroup element missing from parent")))
            .collect::<Result<_>>()?;
        Ok((Arc::new(g), map))
    }
}

/// All subgroups, each once, sorted by `(order, member set)`.
///
/// Every subgroup is a join of cyclic subgroups, so joining breadth-first
/// with the cyclic subgroups reaches all of them.
pub fn subgroups(g: &Arc<FiniteMatrixGroup>) -> Vec<Subgroup> {
    let cyclic: BTreeSet<Vec<usize>> = (0..g.order()).map(|x| g.closure(&[x])).collect();
    let mut all: BTreeSet<Vec<usize>> = cyclic.clone();
    let mut queue: VecDeque<Vec<usize>> = cyclic.iter().cloned().collect();
    while let Some(s) = queue.pop_front() {
        for c in &cyclic {
            if c.iter().all(|x| s.binary_search(x).is_ok()) {
                continue;
            }
            let mut gens = s.clone();
            gens.extend(c.iter().copied());
            let j = g.closure(&gens);
            if all.insert(j.clone()) {
                queue.push_back(j);
            }
        }
    }
    let mut list: Vec<Vec<usize>> = all.into_iter().collect();
    list.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    list.into_iter()
        .map(|members| Subgroup {
            parent: Arc::clone(g),
            members,
        })
        .collect()
}

/// Groups the (sorted) subgroup list into conjugacy classes. Each class is a
/// list of positions into `subs`; the first entry is the representative.
pub fn conjugacy_classes(subs: &[Subgroup]) -> Vec<Vec<usize>> {
    let mut class_of: Vec<Option<usize>> = vec![None; subs.len()];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..subs.len() {
        if class_of[i].is_some() {
            continue;
        }
        let c = classes.len();
        let mut members = vec![i];
        class_of[i] = Some(c);
        let parent = subs[i].parent();
        for g in 0..parent.order() {
            let conj = subs[i].conjugate(g);
            if let Some(j) = subs.iter().position(|s| s.members == conj.members) {
                if class_of[j].is_none() {
                    class_of[j] = Some(c);
                    members.push(j);
                }
            }
        }
        members.sort_unstable();
        classes.push(members);
    }
    classes
}

/// The group generated by the generators of `a` followed by those of `b`,
/// which must commute elementwise.
pub fn direct_product_action(a: &FiniteMatrixGroup, b: &FiniteMatrixGroup) -> Result<Arc<FiniteMatrixGroup>> {
    if a.degree() != b.degree() {
        return Err(Error::DimensionMismatch("factors have different degrees".into()));
    }
    for (na, ma) in a.generators() {
        for (nb, mb) in b.generators() {
            if ma * mb != mb * ma {
                return Err(Error::NotCommuting {
                    a: na.clone(),
                    b: nb.clone(),
                });
            }
        }
    }
    let mut gens = a.generators().to_vec();
    let mut b_names = Vec::new();
    for (name, m) in b.generators() {
        let mut name = name.clone();
        while gens.iter().any(|(n, _)| *n == name) {
            name.push('\'');
        }
        b_names.push(name.clone());
        gens.push((name, m.clone()));
    }
    let mut g = FiniteMatrixGroup::generate(a.degree(), gens)?;
    g.factors = Some((a.generator_names(), b_names));
    Ok(Arc::new(g))
}

/// Invariant factors of an abelian group.
///
/// The group is `Z^k` (k = number of generators) modulo the relations read
/// off the Cayley graph: each edge `x -> x g_i` gives `w(x) + e_i - w(x g_i)`
/// where `w` is the exponent vector of the breadth-first word.
pub fn abelian_invariants(g: &FiniteMatrixGroup) -> Result<FiniteAbelianGroup> {
    if !g.is_abelian() {
        return Err(Error::NotAbelian);
    }
    let k = g.generators().len();
    let exps: Vec<Vec<BigInt>> = (0..g.order())
        .map(|x| {
            let mut v = vec![BigInt::from(0); k];
            for &i in g.word(x) {
                v[i] += 1;
            }
            v
        })
        .collect();
    let mut relations = Vec::new();
    for x in 0..g.order() {
        for i in 0..k {
            let y = g.right_mul[x][i];
            let mut r: Vec<BigInt> = exps[x].iter().zip(&exps[y]).map(|(a, b)| a - b).collect();
            r[i] += 1;
            if r.iter().any(|v| v != &BigInt::from(0)) {
                relations.push(r);
            }
        }
    }
    let q = quotient_structure(&IntMatrix::identity(k), &IntMatrix::from_columns(k, &relations))?;
    if q.order() != Some(BigInt::from(g.order())) {
        return Err(Error::invariant("abelian invariants disagree with the group order"));
    }
    Ok(q)
}

/// Identifies two groups by sending the i-th generator of `a` to the i-th
/// generator of `b`. Returns the element map `a-index -> b-index` if this
/// extends to an isomorphism.
pub fn identify_by_generators(a: &FiniteMatrixGroup, b: &FiniteMatrixGroup) -> Result<Vec<usize>> {
    if a.generators().len() != b.generators().len() || a.order() != b.order() {
        return Err(Error::GroupMismatch);
    }
    let map: Vec<usize> = (0..a.order())
        .map(|x| a.word(x).iter().fold(0, |acc, &k| b.right_mul[acc][k]))
        .collect();
    let mut seen = vec![false; b.order()];
    for &y in &map {
        if std::mem::replace(&mut seen[y], true) {
            return Err(Error::GroupMismatch);
        }
    }
    for x in 0..a.order() {
        for y in 0..a.order() {
            if map[a.mul(x, y)] != b.mul(map[x], map[y]) {
                return Err(Error::GroupMismatch);
            }
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq31() -> Vec<(String, IntMatrix)> {
        vec![
            ("rho".into(), IntMatrix::from_rows(&[[0, 0, 1], [-1, -1, -1], [1, 0, 0]])),
            ("sigma".into(), IntMatrix::from_rows(&[[-1, -1, -1], [0, 0, 1], [0, 1, 0]])),
        ]
    }

    fn minus_i3() -> Vec<(String, IntMatrix)> {
        vec![("g".into(), IntMatrix::scalar(3, -1))]
    }

    fn factors(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn minus_identity_has_order_two() {
        let g = generate(3, minus_i3()).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(abelian_invariants(&g).unwrap().invariant_factors, factors(&[2]));
    }

    #[test]
    fn klein_four_from_torus_matrices() {
        let g = generate(3, eq31()).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.exponent(), 2);
        assert!(g.is_abelian());
        assert_eq!(abelian_invariants(&g).unwrap().invariant_factors, factors(&[2, 2]));
        assert!(g.element(0).is_identity());
    }

    #[test]
    fn order_eight_elementary_abelian() {
        let mut gens = eq31();
        gens.extend(minus_i3());
        let g = generate(3, gens).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(g.exponent(), 2);
        assert_eq!(abelian_invariants(&g).unwrap().invariant_factors, factors(&[2, 2, 2]));
        assert_eq!(subgroups(&g).len(), 16);
    }

    #[test]
    fn product_with_minus_identity() {
        let a = generate(3, eq31()).unwrap();
        let b = generate(3, minus_i3()).unwrap();
        let w = direct_product_action(&a, &b).unwrap();
        assert_eq!(w.order(), 8);
        assert_eq!(w.product_factors().unwrap().1, vec!["g".to_string()]);
    }

    #[test]
    fn product_with_trivial_factor() {
        let a = FiniteMatrixGroup::trivial(3);
        let b = generate(3, eq31()).unwrap();
        let w = direct_product_action(&a, &b).unwrap();
        assert_eq!(w.elements(), b.elements());
    }

    #[test]
    fn product_of_equal_factors_collapses() {
        let m = vec![("t".to_string(), IntMatrix::scalar(2, -1))];
        let a = generate(2, m.clone()).unwrap();
        let w = direct_product_action(&a, &a).unwrap();
        assert_eq!(w.order(), 2);
    }

    #[test]
    fn non_commuting_factors_rejected() {
        let a = generate(2, vec![("s".into(), IntMatrix::from_rows(&[[0, 1], [1, 0]]))]).unwrap();
        let b = generate(2, vec![("t".into(), IntMatrix::from_rows(&[[1, 0], [0, -1]]))]).unwrap();
        assert!(matches!(direct_product_action(&a, &b), Err(Error::NotCommuting { .. })));
    }

    #[test]
    fn non_unimodular_generator_rejected() {
        let r = FiniteMatrixGroup::generate(2, vec![("d".into(), IntMatrix::scalar(2, 2))]);
        assert!(matches!(r, Err(Error::NotUnimodular { .. })));
    }

    #[test]
    fn infinite_group_hits_cap() {
        let r = FiniteMatrixGroup::generate_with_cap(2, vec![("u".into(), IntMatrix::from_rows(&[[1, 1], [0, 1]]))], 50);
        assert_eq!(r.unwrap_err(), Error::NotFinite { cap: 50 });
    }

    #[test]
    fn non_abelian_invariants_rejected() {
        // S3 acting on the A2 root lattice
        let g = generate(
            2,
            vec![
                ("r".into(), IntMatrix::from_rows(&[[0, -1], [1, -1]])),
                ("s".into(), IntMatrix::from_rows(&[[0, 1], [1, 0]])),
            ],
        )
        .unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(abelian_invariants(&g), Err(Error::NotAbelian));
        let subs = subgroups(&g);
        assert_eq!(subs.len(), 6);
        let classes = conjugacy_classes(&subs);
        // trivial, the three reflections, A3, whole
        assert_eq!(classes.len(), 4);
        assert_eq!(classes.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 3, 1, 1]);
    }

    #[test]
    fn subgroup_counts() {
        let t = Arc::new(FiniteMatrixGroup::trivial(2));
        assert_eq!(subgroups(&t).len(), 1);
        let k = generate(3, eq31()).unwrap();
        assert_eq!(subgroups(&k).len(), 5);
    }

    #[test]
    fn mul_table_matches_matrices() {
        let mut gens = eq31();
        gens.extend(minus_i3());
        let g = generate(3, gens).unwrap();
        for a in 0..g.order() {
            for b in 0..g.order() {
                assert_eq!(g.element(g.mul(a, b)), &(g.element(a) * g.element(b)));
            }
        }
    }

    #[test]
    fn subgroup_lattice_properties() {
        let mut gens = eq31();
        gens.extend(minus_i3());
        let g = generate(3, gens).unwrap();
        let subs = subgroups(&g);
        for s in &subs {
            assert_eq!(g.order() % s.order(), 0);
            let (h, map) = s.to_group().unwrap();
            assert_eq!(h.order(), s.order());
            let mut m = map.clone();
            m.sort_unstable();
            assert_eq!(m, s.members());
        }
        for a in &subs {
            for b in &subs {
                let meet = a.intersection(b);
                assert!(subs.contains(&meet));
            }
        }
    }

    #[test]
    fn identification_by_generators() {
        let a = generate(3, eq31()).unwrap();
        let b = generate(
            2,
            vec![
                ("x".into(), IntMatrix::from_rows(&[[-1, 0], [0, 1]])),
                ("y".into(), IntMatrix::from_rows(&[[1, 0], [0, -1]])),
            ],
        )
        .unwrap();
        let map = identify_by_generators(&a, &b).unwrap();
        assert_eq!(map[0], 0);
        let c = generate(2, vec![("z".into(), IntMatrix::from_rows(&[[0, -1], [1, 0]]))]).unwrap();
        assert!(identify_by_generators(&a, &c).is_err());
    }
}
