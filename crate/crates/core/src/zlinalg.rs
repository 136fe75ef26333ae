//! Exact integer linear algebra.
//!
//! Everything here works over arbitrary-precision integers. The three
//! workhorses are the Smith normal form (with unimodular transforms), the
//! column Hermite normal form (canonical bases of column spans) and an
//! incremental kernel computation that consumes rows one at a time, which
//! keeps the large but sparse cocycle systems cheap.

use std::fmt;
use std::ops::{Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    /// Builds a matrix from small integer rows. Panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a `rows x columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        m
    }

    pub fn scalar(n: usize, s: i64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::from(s);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = self.get(i, j);
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    /// True when every row and every column holds exactly one entry equal to 1
    /// and all other entries are 0.
    pub fn is_permutation(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let mut col_hits = vec![0usize; self.cols];
        for i in 0..self.rows {
            let mut hits = 0;
            for (j, col) in col_hits.iter_mut().enumerate() {
                let x = self.get(i, j);
                if x.is_one() {
                    hits += 1;
                    *col += 1;
                } else if !x.is_zero() {
                    return false;
                }
            }
            if hits != 1 {
                return false;
            }
        }
        col_hits.iter().all(|&h| h == 1)
    }

    pub fn neg(&self) -> Self {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.data[i * rhs.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row counts differ".into()));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    /// `[self; other]`
    pub fn vstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch("vstack column counts differ".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.set(i, jj, self.get(i, j).clone());
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(k, i);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.determinant().map(|d| d.abs().is_one()).unwrap_or(false)
    }

    pub fn rank(&self) -> usize {
        column_hermite(self).cols()
    }

    /// Inverse of a unimodular matrix, or `None` if the matrix is not unimodular.
    pub fn unimodular_inverse(&self) -> Option<IntMatrix> {
        if !self.is_square() {
            return None;
        }
        let snf = smith_normal_form(self);
        if !snf.diag.iter().all(One::is_one) {
            return None;
        }
        // left * A * right = I  =>  A^{-1} = right * left
        Some(&snf.right * &snf.left)
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix dimension mismatch")
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;

    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix dimension mismatch");
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix({}x{}) {}", self.rows, self.cols, self)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// `left * a * right = diag(diag)` with `left`, `right` unimodular and
/// `diag[i] | diag[i + 1]`. `diag` has `min(rows, cols)` entries, zeros last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub left: IntMatrix,
    pub diag: Vec<BigInt>,
    pub right: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }

    /// The diagonal as a matrix of the input's shape.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.left.rows(), self.right.rows());
        for (i, x) in self.diag.iter().enumerate() {
            d.set(i, i, x.clone());
        }
        d
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (diag, left, right) = snf_impl(a, true);
    SmithForm {
        left: left.unwrap(),
        diag,
        right: right.unwrap(),
    }
}

/// Invariant factors only; skips the transforms.
pub fn smith_diagonal(a: &IntMatrix) -> Vec<BigInt> {
    snf_impl(a, false).0
}

type Rows = Vec<Vec<BigInt>>;

fn to_rows(a: &IntMatrix) -> Rows {
    (0..a.rows()).map(|i| a.row(i).to_vec()).collect()
}

fn from_rows_vec(rows: usize, cols: usize, r: Rows) -> IntMatrix {
    IntMatrix {
        rows,
        cols,
        data: r.into_iter().flatten().collect(),
    }
}

fn snf_impl(a: &IntMatrix, track: bool) -> (Vec<BigInt>, Option<IntMatrix>, Option<IntMatrix>) {
    let (m, n) = (a.rows(), a.cols());
    let mut x = to_rows(a);
    let mut left = track.then(|| to_rows(&IntMatrix::identity(m)));
    // right is kept transposed so that column operations become row operations
    let mut right_t = track.then(|| to_rows(&IntMatrix::identity(n)));

    fn row_axpy(rows: &mut Rows, dst: usize, src: usize, q: &BigInt) {
        // rows[dst] -= q * rows[src]
        let (d, s) = if dst < src {
            let (lo, hi) = rows.split_at_mut(src);
            (&mut lo[dst], &hi[0])
        } else {
            let (lo, hi) = rows.split_at_mut(dst);
            (&mut hi[0], &lo[src])
        };
        for (dv, sv) in d.iter_mut().zip(s.iter()) {
            if !sv.is_zero() {
                *dv -= q * sv;
            }
        }
    }
    fn col_axpy(rows: &mut Rows, dst: usize, src: usize, q: &BigInt) {
        for r in rows.iter_mut() {
            if !r[src].is_zero() {
                let t = q * &r[src];
                r[dst] -= t;
            }
        }
    }

    let steps = m.min(n);
    let mut diag = Vec::with_capacity(steps);
    for t in 0..steps {
        loop {
            // minimal-absolute-value pivot in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for (i, row) in x.iter().enumerate().skip(t) {
                for (j, v) in row.iter().enumerate().skip(t) {
                    if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < x[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            if pi != t {
                x.swap(pi, t);
                if let Some(l) = left.as_mut() {
                    l.swap(pi, t);
                }
            }
            if pj != t {
                for r in x.iter_mut() {
                    r.swap(pj, t);
                }
                if let Some(r) = right_t.as_mut() {
                    r.swap(pj, t);
                }
            }
            let pivot = x[t][t].clone();
            let mut clean = true;
            for i in t + 1..m {
                if x[i][t].is_zero() {
                    continue;
                }
                let q = x[i][t].div_floor(&pivot);
                row_axpy(&mut x, i, t, &q);
                if let Some(l) = left.as_mut() {
                    row_axpy(l, i, t, &q);
                }
                if !x[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if x[t][j].is_zero() {
                    continue;
                }
                let q = x[t][j].div_floor(&pivot);
                col_axpy(&mut x, j, t, &q);
                if let Some(r) = right_t.as_mut() {
                    row_axpy(r, j, t, &q);
                }
                if !x[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility chain: fold an offending row into the pivot row
            let offending = (t + 1..m).find(|&i| (t + 1..n).any(|j| !x[i][j].is_multiple_of(&pivot)));
            if let Some(i) = offending {
                let minus_one = -BigInt::one();
                row_axpy(&mut x, t, i, &minus_one);
                if let Some(l) = left.as_mut() {
                    row_axpy(l, t, i, &minus_one);
                }
                continue;
            }
            break;
        }
        if x[t][t].is_negative() {
            for v in x[t].iter_mut() {
                *v = -&*v;
            }
            if let Some(l) = left.as_mut() {
                for v in l[t].iter_mut() {
                    *v = -&*v;
                }
            }
        }
        diag.push(x[t][t].clone());
    }
    let left = left.map(|l| from_rows_vec(m, m, l));
    let right = right_t.map(|r| from_rows_vec(n, n, r).transpose());
    (diag, left, right)
}

/// Canonical basis of the column span of `a` (column Hermite normal form).
///
/// The result has full column rank. Column `j` has its first nonzero entry
/// (the pivot, positive) in row `p_j` with `p_0 < p_1 < ...`, and every entry
/// to the left of a pivot lies in `[0, pivot)`.
pub fn column_hermite(a: &IntMatrix) -> IntMatrix {
    let m = a.rows();
    let mut cols: Vec<Vec<BigInt>> = a.columns();
    cols.retain(|c| c.iter().any(|x| !x.is_zero()));
    let mut done: Vec<Vec<BigInt>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for row in 0..m {
        if cols.is_empty() {
            break;
        }
        let Some(p) = gcd_combine(&mut cols, |c| c[row].clone()) else {
            continue;
        };
        let mut pc = cols.swap_remove(p);
        if pc[row].is_negative() {
            for v in pc.iter_mut() {
                *v = -&*v;
            }
        }
        for prev in done.iter_mut() {
            let q = prev[row].div_floor(&pc[row]);
            if !q.is_zero() {
                axpy(prev, &pc, &q);
            }
        }
        done.push(pc);
        pivots.push(row);
        cols.retain(|c| c.iter().any(|x| !x.is_zero()));
    }
    IntMatrix::from_columns(m, &done)
}

/// `dst -= q * src`
fn axpy(dst: &mut [BigInt], src: &[BigInt], q: &BigInt) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

/// Column operations among `cols` until at most one of them has a nonzero
/// value under `key`; the values are tracked through `key` recomputed on
/// the transformed columns. Returns the index of the surviving column.
fn gcd_combine(cols: &mut [Vec<BigInt>], key: impl Fn(&Vec<BigInt>) -> BigInt) -> Option<usize> {
    let mut vals: Vec<BigInt> = cols.iter().map(&key).collect();
    gcd_combine_vals(cols, &mut vals)
}

fn gcd_combine_vals(cols: &mut [Vec<BigInt>], vals: &mut [BigInt]) -> Option<usize> {
    loop {
        let mut piv: Option<usize> = None;
        let mut others = 0usize;
        for (i, v) in vals.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            match piv {
                None => piv = Some(i),
                Some(p) => {
                    others += 1;
                    if v.abs() < vals[p].abs() {
                        piv = Some(i);
                    }
                }
            }
        }
        let p = piv?;
        if others == 0 {
            return Some(p);
        }
        let pv = vals[p].clone();
        let pcol = cols[p].clone();
        for i in 0..vals.len() {
            if i == p || vals[i].is_zero() {
                continue;
            }
            let q = vals[i].div_floor(&pv);
            vals[i] -= &q * &pv;
            axpy(&mut cols[i], &pcol, &q);
        }
    }
}

/// Sparse row: `(column, value)` pairs with nonzero values.
pub type SparseRow = Vec<(usize, BigInt)>;

/// Incremental kernel of a linear system given row by row.
///
/// Holds a basis of `{x in Z^n : r . x = 0}` for all rows fed so far. The
/// basis is always a subset of the columns of a unimodular matrix, hence
/// saturated.
pub struct KernelBuilder {
    n: usize,
    basis: Vec<Vec<BigInt>>,
}

impl KernelBuilder {
    pub fn new(n: usize) -> Self {
        let basis = (0..n)
            .map(|j| {
                let mut v = vec![BigInt::zero(); n];
                v[j] = BigInt::one();
                v
            })
            .collect();
        KernelBuilder { n, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn add_row(&mut self, row: &[(usize, BigInt)]) {
        if self.basis.is_empty() {
            return;
        }
        let mut vals: Vec<BigInt> = self
            .basis
            .iter()
            .map(|b| row.iter().filter(|(_, a)| !a.is_zero()).map(|(j, a)| a * &b[*j]).sum())
            .collect();
        if let Some(p) = gcd_combine_vals(&mut self.basis, &mut vals) {
            self.basis.swap_remove(p);
        }
    }

    pub fn add_dense_row(&mut self, row: &[BigInt]) {
        let sparse: SparseRow = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j, v.clone()))
            .collect();
        self.add_row(&sparse);
    }

    /// The kernel basis in column Hermite form.
    pub fn finish(self) -> IntMatrix {
        column_hermite(&IntMatrix::from_columns(self.n, &self.basis))
    }
}

/// Columns form a saturated, Hermite-reduced Z-basis of `{x : a x = 0}`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let mut kb = KernelBuilder::new(a.cols());
    for i in 0..a.rows() {
        kb.add_dense_row(a.row(i));
    }
    kb.finish()
}

/// Coordinates of `v` in an echelon basis produced by [`column_hermite`],
/// or `None` if `v` is not in its integer span.
pub fn solve_in_hermite_basis(h: &IntMatrix, v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut residual = v.to_vec();
    let mut coords = Vec::with_capacity(h.cols());
    let mut row = 0;
    for j in 0..h.cols() {
        while h.get(row, j).is_zero() {
            if !residual[row].is_zero() {
                return None;
            }
            row += 1;
        }
        let (q, r) = residual[row].div_rem(h.get(row, j));
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for (i, res) in residual.iter_mut().enumerate().skip(row) {
                let e = h.get(i, j);
                if !e.is_zero() {
                    *res -= &q * e;
                }
            }
        }
        coords.push(q);
        row += 1;
    }
    residual.iter().all(Zero::is_zero).then_some(coords)
}

/// Solves `basis * X = targets` over Z where the columns of `basis` are
/// linearly independent. Errors with the first target column outside the
/// integer span.
pub fn solve_in_basis(basis: &IntMatrix, targets: &IntMatrix) -> Result<IntMatrix> {
    let h = column_hermite(basis);
    if h.cols() != basis.cols() {
        return Err(Error::DimensionMismatch("basis columns are linearly dependent".into()));
    }
    // basis = h * t for a unimodular t; solve in h and map back
    let t_coords: Vec<Vec<BigInt>> = basis
        .columns()
        .iter()
        .map(|c| solve_in_hermite_basis(&h, c).expect("basis lies in its own span"))
        .collect();
    let t = IntMatrix::from_columns(h.cols(), &t_coords);
    let t_inv = t
        .unimodular_inverse()
        .ok_or_else(|| Error::invariant("hermite transform is not unimodular"))?;
    let mut sols = Vec::with_capacity(targets.cols());
    for (j, c) in targets.columns().iter().enumerate() {
        let y = solve_in_hermite_basis(&h, c).ok_or(Error::SubNotContained { column: j })?;
        sols.push(t_inv.mul_vec(&y));
    }
    Ok(IntMatrix::from_columns(basis.cols(), &sols))
}

/// A finitely generated abelian group `Z^free_rank + Z/d_1 + ... + Z/d_k`
/// with `1 < d_1 | d_2 | ... | d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        FiniteAbelianGroup {
            invariant_factors: Vec::new(),
            free_rank: rank,
        }
    }

    /// From a Smith diagonal: units are dropped, zeros become free rank.
    pub fn from_smith_diagonal<'a>(diag: impl IntoIterator<Item = &'a BigInt>) -> Self {
        let mut g = Self::default();
        for d in diag {
            if d.is_zero() {
                g.free_rank += 1;
            } else if !d.abs().is_one() {
                g.invariant_factors.push(d.abs());
            }
        }
        g.invariant_factors.sort();
        g
    }

    /// Normalizes a product of cyclic groups `Z/c_i` (zero meaning `Z`).
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let n = orders.len();
        let mut d = IntMatrix::zeros(n, n);
        for (i, c) in orders.iter().enumerate() {
            d.set(i, i, c.clone());
        }
        Self::from_smith_diagonal(&smith_diagonal(&d))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut orders: Vec<BigInt> = self.invariant_factors.clone();
        orders.extend(other.invariant_factors.iter().cloned());
        let mut g = Self::from_cyclic_orders(&orders);
        g.free_rank = self.free_rank + other.free_rank;
        g
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty() && self.free_rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the torsion part.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion_order())
    }

    pub fn exponent(&self) -> Option<BigInt> {
        self.is_finite()
            .then(|| self.invariant_factors.last().cloned().unwrap_or_else(BigInt::one))
    }
}

impl fmt::Display for FiniteAbelianGroup {
    /// `0` for the trivial group, `(2,2)` for torsion, `Z^r` or `Z^r+(2)` with a free part.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        if self.free_rank > 0 {
            write!(f, "Z^{}", self.free_rank)?;
            if !self.invariant_factors.is_empty() {
                write!(f, "+")?;
            }
        }
        if !self.invariant_factors.is_empty() {
            let parts: Vec<String> = self.invariant_factors.iter().map(|d| d.to_string()).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

/// Isomorphism type of `span(ambient) / span(sub)`.
pub fn quotient_structure(ambient_basis: &IntMatrix, sub_generators: &IntMatrix) -> Result<FiniteAbelianGroup> {
    if ambient_basis.rows() != sub_generators.rows() {
        return Err(Error::DimensionMismatch(
            "ambient and sub generators live in different spaces".into(),
        ));
    }
    let h = column_hermite(ambient_basis);
    let mut coords = Vec::with_capacity(sub_generators.cols());
    for (j, c) in sub_generators.columns().iter().enumerate() {
        coords.push(solve_in_hermite_basis(&h, c).ok_or(Error::SubNotContained { column: j })?);
    }
    let k = h.cols();
    let rel = IntMatrix::from_columns(k, &coords);
    let diag = smith_diagonal(&rel);
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    let mut g = FiniteAbelianGroup::from_smith_diagonal(diag.iter().filter(|d| !d.is_zero()));
    g.free_rank = k - rank;
    Ok(g)
}
