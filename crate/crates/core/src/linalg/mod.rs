//! Exact integer and rational matrices.
//!
//! Lattice vectors are rows throughout: a basis `B` of a sublattice of an
//! ambient lattice with Gram `A` has Gram `B·A·Bᵗ`.

mod lll;
mod normal_form;
mod small;

pub use lll::{lll_reduce, LLL_DELTA};
pub(crate) use normal_form::nonzero_rows;
pub use normal_form::{hnf, kernel_saturated, row_lattice_basis, snf};
pub use small::SqMat;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn int_rat(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

/// Dense matrix of arbitrary-precision integers.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Int>) -> Self {
        assert_eq!(data.len(), rows * cols, "IntMatrix data length");
        IntMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Int::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        Self::new(rows, cols, data.iter().map(|&x| Int::from(x)).collect())
    }

    /// Builds a matrix from rows; `cols` is needed so that zero-row matrices keep a width.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().map(|&x| Int::from(x)));
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn from_big_rows(rows: Vec<Vec<Int>>, cols: usize) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r);
        }
        Self::new(n, cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn data(&self) -> &[Int] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        IntMatrix::new(self.rows, self.cols, data)
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntMatrix::new(self.rows, self.cols, data)
    }

    pub fn scale(&self, k: &Int) -> IntMatrix {
        IntMatrix::new(self.rows, self.cols, self.data.iter().map(|a| a * k).collect())
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols, "vstack width");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix::new(self.rows + other.rows, self.cols, data)
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        IntMatrix::new(idx.len(), self.cols, data)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix::new(self.rows, self.cols, self.data.iter().map(int_rat).collect())
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.data.iter().map(|x| x.to_i64()).collect()
    }

    pub fn row_i64(&self, i: usize) -> Option<Vec<i64>> {
        self.row(i).iter().map(|x| x.to_i64()).collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.data.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                    Some(r) => {
                        for j in 0..n {
                            a.swap(k * n + j, r * n + j);
                        }
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * a[n * n - 1].clone()
    }

    pub fn rank(&self) -> usize {
        let (h, _) = hnf(self);
        (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    pub(crate) fn row_axpy(&mut self, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = &self.data[src * self.cols + j] * q;
            self.data[dst * self.cols + j] -= t;
        }
    }

    /// col[dst] -= q * col[src]
    pub(crate) fn col_axpy(&mut self, dst: usize, src: usize, q: &Int) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = &self.data[i * self.cols + src] * q;
            self.data[i * self.cols + dst] -= t;
        }
    }

    pub(crate) fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[i * self.cols + j]);
            self.data[i * self.cols + j] = v;
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Dense matrix of rationals, always in lowest terms with positive denominators.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols, "RatMatrix data length");
        RatMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rat::one();
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        Self::new(rows, cols, data.iter().map(|&x| Rat::from_integer(Int::from(x))).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[Rat] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        RatMatrix::new(self.rows, self.cols, data)
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        RatMatrix::new(self.rows, self.cols, data)
    }

    pub fn scale(&self, k: &Rat) -> RatMatrix {
        RatMatrix::new(self.rows, self.cols, self.data.iter().map(|a| a * k).collect())
    }

    pub fn vstack(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.cols, "vstack width");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        RatMatrix::new(self.rows + other.rows, self.cols, data)
    }

    pub fn block_diag(&self, other: &RatMatrix) -> RatMatrix {
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        let mut out = Self::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * c + j] = self.get(i, j).clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.data[(i + self.rows) * c + j + self.cols] = other.get(i, j).clone();
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        if !self.is_integral() {
            return None;
        }
        Some(IntMatrix::new(self.rows, self.cols, self.data.iter().map(|x| x.to_integer()).collect()))
    }

    /// Least common multiple of all denominators (1 for the empty matrix).
    pub fn denominator_lcm(&self) -> Int {
        self.data.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Returns `(k, M)` with `M = k·self` integral and `k` minimal.
    pub fn clear_denominators(&self) -> (Int, IntMatrix) {
        let k = self.denominator_lcm();
        let m = self.scale(&Rat::from_integer(k.clone()));
        (k, m.to_int().expect("scaled matrix is integral"))
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = Rat::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r * n + k].is_zero()) else {
                return Rat::zero();
            };
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = a[k * n + k].clone();
            det *= &piv;
            for i in k + 1..n {
                if a[i * n + k].is_zero() {
                    continue;
                }
                let f = &a[i * n + k] / &piv;
                for j in k..n {
                    let t = &f * &a[k * n + j];
                    a[i * n + j] -= t;
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = RatMatrix::identity(n).data;
        for k in 0..n {
            let p = (k..n).find(|&r| !a[r * n + k].is_zero())?;
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                    inv.swap(k * n + j, p * n + j);
                }
            }
            let piv = a[k * n + k].clone();
            for j in 0..n {
                a[k * n + j] /= &piv;
                inv[k * n + j] /= &piv;
            }
            for i in 0..n {
                if i == k || a[i * n + k].is_zero() {
                    continue;
                }
                let f = a[i * n + k].clone();
                for j in 0..n {
                    let t = &f * &a[k * n + j];
                    a[i * n + j] -= t;
                    let t = &f * &inv[k * n + j];
                    inv[i * n + j] -= t;
                }
            }
        }
        Some(RatMatrix::new(n, n, inv))
    }

    pub fn rank(&self) -> usize {
        let (n, m) = (self.rows, self.cols);
        let mut a = self.data.clone();
        let mut r = 0;
        for c in 0..m {
            let Some(p) = (r..n).find(|&i| !a[i * m + c].is_zero()) else {
                continue;
            };
            for j in 0..m {
                a.swap(r * m + j, p * m + j);
            }
            for i in r + 1..n {
                if a[i * m + c].is_zero() {
                    continue;
                }
                let f = &a[i * m + c] / &a[r * m + c];
                for j in c..m {
                    let t = &f * &a[r * m + j];
                    a[i * m + j] -= t;
                }
            }
            r += 1;
            if r == n {
                break;
            }
        }
        r
    }

    /// Cholesky-style pivots of a symmetric matrix: all positive iff positive definite.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let n = self.rows;
        let mut a = self.data.clone();
        for k in 0..n {
            let piv = a[k * n + k].clone();
            if !piv.is_positive() {
                return false;
            }
            for i in k + 1..n {
                let f = &a[i * n + k] / &piv;
                for j in k..n {
                    let t = &f * &a[k * n + j];
                    a[i * n + j] -= t;
                }
            }
        }
        true
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `x·M` for a rational row vector.
pub fn rat_row_times(x: &[Rat], m: &RatMatrix) -> Vec<Rat> {
    assert_eq!(x.len(), m.rows(), "row-vector product shape");
    let mut out = vec![Rat::zero(); m.cols()];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o += xi * m.get(i, j);
        }
    }
    out
}

/// `x·A·yᵗ`
pub fn bilinear(x: &[Rat], a: &RatMatrix, y: &[Rat]) -> Rat {
    rat_row_times(x, a).iter().zip(y).map(|(u, v)| u * v).sum()
}

/// Integer matrix → `Vec<i64>` conversion that panics on overflow, for kernels
/// whose inputs are known to be small.
pub fn expect_i64(m: &IntMatrix) -> Vec<i64> {
    m.to_i64().expect("matrix entry exceeds i64")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse_agree() {
        let m = RatMatrix::from_i64(3, 3, &[2, -1, 0, -1, 2, -1, 0, -1, 2]);
        assert_eq!(m.det(), rat(4, 1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RatMatrix::identity(3));
        let im = IntMatrix::from_i64(3, 3, &[2, -1, 0, -1, 2, -1, 0, -1, 2]);
        assert_eq!(im.det(), Int::from(4));
    }

    #[test]
    fn bareiss_needs_pivot_swap() {
        let m = IntMatrix::from_i64(3, 3, &[0, 1, 2, 1, 0, 3, 4, -3, 8]);
        assert_eq!(m.det(), Int::from(-2));
    }

    #[test]
    fn positive_definite_detection() {
        assert!(RatMatrix::from_i64(2, 2, &[2, -1, -1, 2]).is_positive_definite());
        assert!(!RatMatrix::from_i64(2, 2, &[1, 2, 2, 1]).is_positive_definite());
        assert!(RatMatrix::zeros(0, 0).is_positive_definite());
    }
}
