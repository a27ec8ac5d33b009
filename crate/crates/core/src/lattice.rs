//! Lattices, embedded sublattices, duals and the primitive-sublattice calculus.

use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{hnf, kernel_saturated, Int, IntMatrix, Rat, RatMatrix};

/// A positive-definite lattice given by its Gram matrix.
///
/// Integrality and evenness are derived from the Gram matrix on construction
/// and never taken from input.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    gram: RatMatrix,
    integral: bool,
    even: bool,
}

impl Lattice {
    pub fn new(gram: RatMatrix) -> Result<Self> {
        if gram.rows() != gram.cols() || !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if !gram.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let integral = gram.is_integral();
        let even = integral && (0..gram.rows()).all(|i| gram.get(i, i).to_integer() % Int::from(2) == Int::zero());
        Ok(Lattice { gram, integral, even })
    }

    pub fn from_i64(n: usize, entries: &[i64]) -> Result<Self> {
        Self::new(RatMatrix::from_i64(n, n, entries))
    }

    /// The rank-0 lattice.
    pub fn zero() -> Self {
        Lattice { gram: RatMatrix::zeros(0, 0), integral: true, even: true }
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn det(&self) -> Rat {
        self.gram.det()
    }

    pub fn int_gram(&self) -> Result<IntMatrix> {
        self.gram.to_int().ok_or(Error::NotIntegral)
    }

    /// Gram matrix scaled by the least common denominator: `(k, k·G)`.
    pub fn scaled_int_gram(&self) -> (Int, IntMatrix) {
        self.gram.clear_denominators()
    }

    pub fn norm(&self, x: &[Int]) -> Rat {
        self.inner(x, x)
    }

    pub fn inner(&self, x: &[Int], y: &[Int]) -> Rat {
        let n = self.rank();
        let mut s = Rat::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                s += self.gram.get(i, j) * Rat::from_integer(&x[i] * &y[j]);
            }
        }
        s
    }
}

/// The dual lattice `L*` presented in the dual basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualDescription {
    pub lattice: Lattice,
    /// Gram matrix of the dual basis (rows of `G⁻¹` in `L`-coordinates).
    pub dual_gram: RatMatrix,
    /// `|L*/L|`
    pub index: Int,
}

pub fn dual(l: &Lattice) -> Result<DualDescription> {
    if !l.is_integral() {
        return Err(Error::NotIntegral);
    }
    let inv = l.gram().inverse().ok_or(Error::NotPositiveDefinite)?;
    let index = l.det().to_integer().abs();
    Ok(DualDescription { lattice: l.clone(), dual_gram: inv, index })
}

/// A sublattice of an ambient lattice, stored as an HNF basis in ambient coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedLattice {
    ambient: Arc<Lattice>,
    basis: IntMatrix,
}

impl EmbeddedLattice {
    /// The sublattice generated by `rows`.
    pub fn new(ambient: Arc<Lattice>, rows: &IntMatrix) -> Result<Self> {
        if rows.cols() != ambient.rank() {
            return Err(Error::DimensionMismatch(format!(
                "rows have {} columns, ambient rank is {}",
                rows.cols(),
                ambient.rank()
            )));
        }
        let (h, _) = hnf(rows);
        let basis = crate::linalg::nonzero_rows(&h);
        Ok(EmbeddedLattice { ambient, basis })
    }

    pub fn zero(ambient: Arc<Lattice>) -> Self {
        let n = ambient.rank();
        EmbeddedLattice { ambient, basis: IntMatrix::zeros(0, n) }
    }

    pub fn full(ambient: Arc<Lattice>) -> Self {
        let n = ambient.rank();
        EmbeddedLattice { ambient, basis: IntMatrix::identity(n) }
    }

    pub fn ambient(&self) -> &Arc<Lattice> {
        &self.ambient
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn gram(&self) -> RatMatrix {
        let b = self.basis.to_rat();
        b.mul(self.ambient.gram()).mul(&b.transpose())
    }

    /// The sublattice as a standalone lattice in its own basis.
    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.gram()).expect("sublattice of a definite lattice is definite")
    }

    pub fn is_primitive(&self) -> bool {
        saturate(self).basis == self.basis
    }

    /// Coordinates of an ambient vector in this basis, if it lies in the sublattice.
    pub fn coordinates(&self, v: &[Int]) -> Option<Vec<Int>> {
        let k = self.rank();
        if k == 0 {
            return v.iter().all(Zero::is_zero).then(Vec::new);
        }
        let b = self.basis.to_rat();
        let bt = b.transpose();
        let gram_inv = b.mul(&bt).inverse()?;
        let vr: Vec<Rat> = v.iter().map(|x| Rat::from_integer(x.clone())).collect();
        let vb = crate::linalg::rat_row_times(&vr, &bt);
        let x = crate::linalg::rat_row_times(&vb, &gram_inv);
        let back = crate::linalg::rat_row_times(&x, &b);
        if back != vr || x.iter().any(|c| !c.is_integer()) {
            return None;
        }
        Some(x.into_iter().map(|c| c.to_integer()).collect())
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &EmbeddedLattice) -> bool {
        (0..other.rank()).all(|i| self.contains(other.basis.row(i)))
    }
}

/// Smallest primitive sublattice containing `s`.
pub fn saturate(s: &EmbeddedLattice) -> EmbeddedLattice {
    let n = s.ambient.rank();
    // rows Euclidean-orthogonal to s, then everything Euclidean-orthogonal to those
    let perp = kernel_saturated(&s.basis.transpose());
    let sat = if perp.rows() == 0 { IntMatrix::identity(n) } else { kernel_saturated(&perp.transpose()) };
    EmbeddedLattice { ambient: s.ambient.clone(), basis: sat }
}

/// `{x ∈ ambient : (x, y) = 0 for all y ∈ s}`, always primitive.
pub fn orthogonal_complement(s: &EmbeddedLattice) -> EmbeddedLattice {
    let n = s.ambient.rank();
    if s.rank() == 0 {
        return EmbeddedLattice::full(s.ambient.clone());
    }
    let m = s.ambient.gram().mul(&s.basis.to_rat().transpose());
    let (_, mi) = m.clear_denominators();
    let k = kernel_saturated(&mi);
    debug_assert_eq!(k.cols(), n);
    EmbeddedLattice { ambient: s.ambient.clone(), basis: k }
}

pub fn direct_sum(a: &Lattice, b: &Lattice) -> Lattice {
    Lattice::new(a.gram().block_diag(b.gram())).expect("direct sum of definite lattices")
}

pub fn rescale(l: &Lattice, factor: &Rat) -> Result<Lattice> {
    if !factor.is_positive() {
        return Err(Error::PreconditionViolated("rescaling factor must be positive".into()));
    }
    Lattice::new(l.gram().scale(factor))
}

/// `[t : s]` for `s ⊆ t` of equal rank.
pub fn sublattice_index(s: &EmbeddedLattice, t: &EmbeddedLattice) -> Result<Int> {
    if s.rank() != t.rank() {
        return Err(Error::RankMismatch(s.rank(), t.rank()));
    }
    let mut rows = Vec::with_capacity(s.rank());
    for i in 0..s.rank() {
        rows.push(t.coordinates(s.basis.row(i)).ok_or(Error::NotContained)?);
    }
    let x = IntMatrix::from_big_rows(rows, t.rank());
    Ok(x.det().abs())
}

/// Determinant of the sublattice's Gram matrix as an integer (ambient integral).
pub fn det_int(l: &Lattice) -> Int {
    let d = l.det();
    assert!(d.is_integer(), "determinant of an integral lattice");
    d.to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn zn(n: usize) -> Arc<Lattice> {
        Arc::new(Lattice::new(RatMatrix::identity(n)).unwrap())
    }

    #[test]
    fn flags_are_recomputed() {
        let a1 = Lattice::from_i64(1, &[2]).unwrap();
        assert!(a1.is_even() && a1.is_integral());
        let z = Lattice::from_i64(1, &[1]).unwrap();
        assert!(z.is_integral() && !z.is_even());
        let half = rescale(&a1, &rat(1, 4)).unwrap();
        assert!(!half.is_integral() && !half.is_even());
        assert_eq!(rescale(&a1, &rat(1, 1)).unwrap(), a1);
        assert!(rescale(&a1, &rat(-1, 1)).is_err());
    }

    #[test]
    fn dual_examples() {
        let a1 = Lattice::from_i64(1, &[2]).unwrap();
        let d = dual(&a1).unwrap();
        assert_eq!(d.dual_gram.get(0, 0), &rat(1, 2));
        assert_eq!(d.index, Int::from(2));
        let bad = rescale(&a1, &rat(1, 3)).unwrap();
        assert_eq!(dual(&bad), Err(Error::NotIntegral));
    }

    #[test]
    fn saturation_examples() {
        let amb = zn(2);
        let s = EmbeddedLattice::new(amb.clone(), &IntMatrix::from_i64(1, 2, &[2, 0])).unwrap();
        assert_eq!(saturate(&s).basis(), &IntMatrix::from_i64(1, 2, &[1, 0]));
        let p = EmbeddedLattice::new(amb.clone(), &IntMatrix::from_i64(1, 2, &[1, 2])).unwrap();
        assert_eq!(saturate(&p), p);
        let amb3 = zn(3);
        let v = [1i64, 2, -1];
        let rows = IntMatrix::from_i64(2, 3, &[2, 4, -2, 3, 6, -3]);
        let s = EmbeddedLattice::new(amb3.clone(), &rows).unwrap();
        assert_eq!(s.rank(), 1);
        let sat = saturate(&s);
        assert_eq!(sat, EmbeddedLattice::new(amb3, &IntMatrix::from_i64(1, 3, &v)).unwrap());
    }

    #[test]
    fn complements_of_extremes() {
        let amb = zn(3);
        assert_eq!(orthogonal_complement(&EmbeddedLattice::full(amb.clone())).rank(), 0);
        assert_eq!(orthogonal_complement(&EmbeddedLattice::zero(amb.clone())), EmbeddedLattice::full(amb));
    }

    #[test]
    fn index_examples() {
        let amb = zn(1);
        let t = EmbeddedLattice::full(amb.clone());
        let s = EmbeddedLattice::new(amb.clone(), &IntMatrix::from_i64(1, 1, &[2])).unwrap();
        assert_eq!(sublattice_index(&t, &t).unwrap(), Int::from(1));
        assert_eq!(sublattice_index(&s, &t).unwrap(), Int::from(2));
        assert_eq!(sublattice_index(&t, &s), Err(Error::NotContained));
        assert_eq!(sublattice_index(&EmbeddedLattice::zero(amb), &t), Err(Error::RankMismatch(0, 1)));
    }

    #[test]
    fn direct_sum_with_zero() {
        let a1 = Lattice::from_i64(1, &[2]).unwrap();
        assert_eq!(direct_sum(&a1, &Lattice::zero()), a1);
        assert_eq!(direct_sum(&a1, &a1).gram(), &RatMatrix::from_i64(2, 2, &[2, 0, 0, 2]));
    }
}
