use super::{Int, IntMatrix};

/// Small square integer matrix with machine-word entries.
///
/// Group elements of definite lattices have bounded entries in a reduced
/// basis, so products stay well inside `i64`; overflow panics in debug and is
/// checked explicitly in [`SqMat::mul`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SqMat {
    n: usize,
    data: Vec<i64>,
}

impl SqMat {
    pub fn new(n: usize, data: Vec<i64>) -> Self {
        assert_eq!(data.len(), n * n, "SqMat data length");
        SqMat { n, data }
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        SqMat { n, data }
    }

    pub fn from_int(m: &IntMatrix) -> Option<Self> {
        if m.rows() != m.cols() {
            return None;
        }
        Some(SqMat { n: m.rows(), data: m.to_i64()? })
    }

    pub fn to_int(&self) -> IntMatrix {
        IntMatrix::new(self.n, self.n, self.data.iter().map(|&x| Int::from(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul(&self, other: &SqMat) -> SqMat {
        let n = self.n;
        assert_eq!(n, other.n);
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let out_row = &mut out[i * n..(i + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(orow) {
                    *o = o.checked_add(a.checked_mul(b).expect("SqMat overflow")).expect("SqMat overflow");
                }
            }
        }
        SqMat { n, data: out }
    }

    /// `x·M` for a row vector.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        let n = self.n;
        let mut out = vec![0i64; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(&self.data[i * n..(i + 1) * n]) {
                *o += xi * m;
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == i64::from(i == j)))
    }

    pub fn sub_identity(&self) -> SqMat {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] -= 1;
        }
        m
    }

    pub fn transpose(&self) -> SqMat {
        let n = self.n;
        let mut data = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        SqMat { n, data }
    }

    /// `g·A·gᵗ == A` for an integral Gram matrix `A`.
    pub fn preserves(&self, gram: &SqMat) -> bool {
        self.mul(gram).mul(&self.transpose()) == *gram
    }

    /// Multiplicative order, or `None` if it exceeds `limit`.
    pub fn order(&self, limit: u64) -> Option<u64> {
        let mut p = self.clone();
        for k in 1..=limit {
            if p.is_identity() {
                return Some(k);
            }
            p = p.mul(self);
        }
        None
    }

    pub fn pow(&self, mut e: u64) -> SqMat {
        let mut base = self.clone();
        let mut acc = SqMat::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}
