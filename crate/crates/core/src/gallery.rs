//! Ready-made lattices: the norm-quotient torus of a biquadratic extension
//! (with and without the inversion involution) and the Picard lattices of
//! Trepalin's real conic bundles.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::groups::{direct_product_action, generate, FiniteMatrixGroup, Subgroup};
use crate::lattices::GLattice;
use crate::zlinalg::IntMatrix;

/// The two generators of the Klein four group acting on the character
/// lattice of `R_{L/k} G_m / G_m`, L biquadratic.
pub fn torus_pi_generators() -> Vec<(String, IntMatrix)> {
    vec![
        ("rho".into(), IntMatrix::from_rows(&[[0, 0, 1], [-1, -1, -1], [1, 0, 0]])),
        ("sigma".into(), IntMatrix::from_rows(&[[-1, -1, -1], [0, 0, 1], [0, 1, 0]])),
    ]
}

pub fn torus_pi_group() -> Arc<FiniteMatrixGroup> {
    generate(3, torus_pi_generators()).expect("Klein four group")
}

/// `<-I_3>`, the inversion `t -> t^{-1}` on the character lattice.
pub fn inversion_group() -> Arc<FiniteMatrixGroup> {
    generate(3, vec![("g".into(), IntMatrix::scalar(3, -1))]).expect("order two group")
}

pub fn torus_w_group() -> Arc<FiniteMatrixGroup> {
    direct_product_action(&torus_pi_group(), &inversion_group()).expect("inversion is central")
}

pub fn torus_pi_lattice() -> GLattice {
    GLattice::tautological("torus-pi", torus_pi_group())
}

pub fn torus_w_lattice() -> GLattice {
    GLattice::tautological("torus-w", torus_w_group())
}

/// Parameters of the Picard lattice of the n-th Trepalin surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrepalinSpec {
    pub n: usize,
}

impl TrepalinSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter(format!("Trepalin family parameter must be >= 1, got {n}")));
        }
        Ok(TrepalinSpec { n })
    }

    /// Number of degenerate fibres.
    pub fn fibres(&self) -> usize {
        4 * self.n + 2
    }

    pub fn rank(&self) -> usize {
        self.fibres() + 2
    }

    pub fn s(&self) -> usize {
        0
    }

    pub fn l(&self) -> usize {
        1
    }

    /// Position of `l_k` for `k = +-1, ..., +-2n`.
    pub fn l_k(&self, k: i64) -> usize {
        let m = 2 * self.n as i64;
        assert!(k != 0 && k.abs() <= m, "component index out of range");
        if k > 0 {
            1 + k as usize
        } else {
            1 + m as usize + (-k) as usize
        }
    }

    pub fn l_0(&self) -> usize {
        4 * self.n + 2
    }

    pub fn l_inf(&self) -> usize {
        4 * self.n + 3
    }

    pub fn labels(&self) -> Vec<String> {
        let m = 2 * self.n as i64;
        let mut v = vec!["s".to_string(), "l".to_string()];
        v.extend((1..=m).map(|k| format!("l_{k}")));
        v.extend((1..=m).map(|k| format!("l_-{k}")));
        v.push("l_0".into());
        v.push("l_inf".into());
        v
    }

    /// The chosen component of each degenerate fibre.
    pub fn components(&self) -> Vec<usize> {
        let m = 2 * self.n as i64;
        let mut c: Vec<usize> = (1..=m).flat_map(|k| [self.l_k(k), self.l_k(-k)]).collect();
        c.push(self.l_0());
        c.push(self.l_inf());
        c
    }

    /// Image under complex conjugation of a fibre component, from the
    /// rules `l_k -> l - l_{-k}`, `l_0 -> l - l_0`, `l_inf -> l - l_inf`.
    pub fn sigma_of_component(&self, pos: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.rank()];
        v[self.l()] += 1;
        let partner = if pos == self.l_0() || pos == self.l_inf() {
            pos
        } else {
            let m = 2 * self.n;
            if (2..2 + m).contains(&pos) {
                pos + m
            } else {
                pos - m
            }
        };
        v[partner] -= 1;
        v
    }

    /// `sigma(s) = s + (2n+1) l - sum_k (l_k + l_{-k}) - l_0 - l_inf`.
    pub fn sigma_of_s(&self) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); self.rank()];
        v[self.s()] = BigInt::from(1);
        v[self.l()] = BigInt::from(2 * self.n + 1);
        for c in self.components() {
            v[c] = BigInt::from(-1);
        }
        v
    }

    pub fn sigma_matrix(&self) -> IntMatrix {
        let r = self.rank();
        let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(r);
        cols.push(self.sigma_of_s());
        let mut l = vec![BigInt::zero(); r];
        l[self.l()] = BigInt::from(1);
        cols.push(l);
        for pos in 2..r {
            cols.push(self.sigma_of_component(pos));
        }
        IntMatrix::from_columns(r, &cols)
    }

    /// Swaps `l_k` and `l_{-k}`, fixes `s`, `l`, `l_0`, `l_inf`.
    pub fn g_matrix(&self) -> IntMatrix {
        let r = self.rank();
        let mut m = IntMatrix::zeros(r, r);
        for j in 0..r {
            let img = if j < 2 || j == self.l_0() || j == self.l_inf() {
                j
            } else if j < 2 + 2 * self.n {
                j + 2 * self.n
            } else {
                j - 2 * self.n
            };
            m.set(img, j, BigInt::from(1));
        }
        m
    }

    /// The generators of the conjugation-fixed sublattice as written by hand:
    /// `2s - sum (l_k + l_{-k}) - l_0 - l_inf`, `l`, `l_k - l_{-k}` (k = 1..2n).
    pub fn printed_fixed_generators(&self) -> IntMatrix {
        let r = self.rank();
        let mut cols = Vec::new();
        let mut s_tilde = vec![BigInt::zero(); r];
        s_tilde[self.s()] = BigInt::from(2);
        for c in self.components() {
            s_tilde[c] = BigInt::from(-1);
        }
        cols.push(s_tilde);
        let mut l = vec![BigInt::zero(); r];
        l[self.l()] = BigInt::from(1);
        cols.push(l);
        for k in 1..=2 * self.n as i64 {
            let mut v = vec![BigInt::zero(); r];
            v[self.l_k(k)] = BigInt::from(1);
            v[self.l_k(-k)] = BigInt::from(-1);
            cols.push(v);
        }
        IntMatrix::from_columns(r, &cols)
    }
}

/// The acting group `W = G x Gamma` modelled as diagonal sign matrices:
/// `g = diag(1, -1)`, `sigma = diag(-1, 1)`.
pub fn trepalin_group() -> Arc<FiniteMatrixGroup> {
    let g = generate(2, vec![("g".into(), IntMatrix::from_rows(&[[1, 0], [0, -1]]))]).expect("G");
    let gamma = generate(2, vec![("sigma".into(), IntMatrix::from_rows(&[[-1, 0], [0, 1]]))]).expect("Gamma");
    direct_product_action(&g, &gamma).expect("diagonal matrices commute")
}

pub fn trepalin_lattice(n: usize) -> Result<GLattice> {
    let shape = TrepalinSpec::new(n)?;
    GLattice::from_generator_action(
        format!("trepalin-{n}"),
        trepalin_group(),
        vec![shape.g_matrix(), shape.sigma_matrix()],
        Some(shape.labels()),
    )
}

/// `Gamma = <sigma>` inside the Trepalin group.
pub fn trepalin_gamma(lat: &GLattice) -> Subgroup {
    named_generator_subgroup(lat, "sigma")
}

/// `G_n = <g>` inside the Trepalin group.
pub fn trepalin_g(lat: &GLattice) -> Subgroup {
    named_generator_subgroup(lat, "g")
}

fn named_generator_subgroup(lat: &GLattice, name: &str) -> Subgroup {
    let g = lat.group();
    let k = g
        .generators()
        .iter()
        .position(|(n, _)| n == name)
        .expect("generator present");
    Subgroup::generated_by(g, &[g.generator_indices()[k]])
}

/// Checks `2 (sigma(s) - s) = sum_i (sigma(L_i) - L_i)` for a candidate
/// image of `s`, with `sigma(L_i)` expanded by the component rules.
pub fn sigma_s_relation_holds(shape: &TrepalinSpec, sigma_s: &[BigInt]) -> bool {
    let r = shape.rank();
    if sigma_s.len() != r {
        return false;
    }
    let mut lhs: Vec<BigInt> = sigma_s.iter().map(|x| x * 2).collect();
    lhs[shape.s()] -= 2;
    let mut rhs = vec![BigInt::zero(); r];
    for c in shape.components() {
        for (acc, v) in rhs.iter_mut().zip(shape.sigma_of_component(c)) {
            *acc += v;
        }
        rhs[c] -= 1;
    }
    lhs == rhs
}

pub fn trepalin_sigma_s_consistency(n: usize) -> Result<bool> {
    let shape = TrepalinSpec::new(n)?;
    let lat = trepalin_lattice(n)?;
    let sigma = lat.group().generator_indices()[1];
    let image = lat.action(sigma).column(shape.s());
    Ok(sigma_s_relation_holds(&shape, &image))
}

/// Gallery entries by the names the CLI accepts.
pub fn by_name(name: &str, n: Option<usize>) -> Result<GLattice> {
    match name {
        "torus-pi" => Ok(torus_pi_lattice()),
        "torus-w" => Ok(torus_w_lattice()),
        "trepalin" => trepalin_lattice(n.unwrap_or(1)),
        other => Err(Error::InvalidParameter(format!("unknown gallery entry `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{abelian_invariants, subgroups};
    use crate::lattices::{is_permutation_in_basis, restrict};

    #[test]
    fn torus_generators_commute_and_square_to_one() {
        let g = torus_pi_generators();
        let (a, b) = (&g[0].1, &g[1].1);
        assert!((a * a).is_identity());
        assert!((b * b).is_identity());
        assert_eq!(a * b, b * a);
        assert_eq!(torus_pi_group().order(), 4);
    }

    #[test]
    fn torus_w_structure() {
        let w = torus_w_group();
        let m = IntMatrix::scalar(3, -1);
        for (_, g) in torus_pi_generators() {
            assert_eq!(&g * &m, &m * &g);
        }
        assert_eq!(
            abelian_invariants(&w).unwrap().invariant_factors,
            vec![BigInt::from(2); 3]
        );
        assert_eq!(subgroups(&w).len(), 16);
    }

    #[test]
    fn trepalin_dimensions() {
        assert_eq!(trepalin_lattice(1).unwrap().rank(), 8);
        assert_eq!(trepalin_lattice(3).unwrap().rank(), 16);
        assert!(matches!(trepalin_lattice(0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn trepalin_sigma_is_an_involution() {
        for n in 1..=3 {
            let shape = TrepalinSpec::new(n).unwrap();
            let s = shape.sigma_matrix();
            let g = shape.g_matrix();
            assert!((&s * &s).is_identity());
            assert!((&g * &g).is_identity());
            assert_eq!(&s * &g, &g * &s);
            let lat = trepalin_lattice(n).unwrap();
            lat.check_full_table().unwrap();
            assert_eq!(lat.group().order(), 4);
        }
    }

    #[test]
    fn trepalin_g_side_is_permutation() {
        let lat = trepalin_lattice(2).unwrap();
        let r = restrict(&lat, &trepalin_g(&lat)).unwrap();
        assert!(is_permutation_in_basis(&r));
        assert!(!is_permutation_in_basis(&lat));
    }

    #[test]
    fn sigma_s_consistency_and_negative_control() {
        for n in 1..=3 {
            assert!(trepalin_sigma_s_consistency(n).unwrap());
        }
        let shape = TrepalinSpec::new(1).unwrap();
        let mut v = shape.sigma_of_s();
        v[shape.l()] += 1;
        assert!(!sigma_s_relation_holds(&shape, &v));
    }

    #[test]
    fn labels_follow_basis_order() {
        let shape = TrepalinSpec::new(1).unwrap();
        assert_eq!(
            shape.labels(),
            vec!["s", "l", "l_1", "l_2", "l_-1", "l_-2", "l_0", "l_inf"]
        );
        assert_eq!(shape.l_k(-2), 5);
    }
}
