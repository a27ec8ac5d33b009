//! Short- and close-vector enumeration (Fincke–Pohst on an LLL-reduced basis).
//!
//! The search tree is pruned with a floating-point copy of the exact rational
//! Cholesky decomposition, widened by a small slack; every candidate leaf is
//! re-checked with exact integer arithmetic before it is reported.

use std::cmp::Ordering;

use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{lll_reduce, Int, Rat, RatMatrix};

const SLACK: f64 = 1e-7;

/// Vectors in lattice-basis coordinates with their norms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VectorList {
    pub coords: Vec<Vec<i64>>,
    pub norms: Vec<Rat>,
}

impl VectorList {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    fn sort_canonical(&mut self) {
        let mut idx: Vec<usize> = (0..self.coords.len()).collect();
        idx.sort_by(|&a, &b| canonical_cmp(&self.norms[a], &self.coords[a], &self.norms[b], &self.coords[b]));
        self.coords = idx.iter().map(|&i| self.coords[i].clone()).collect();
        self.norms = idx.iter().map(|&i| self.norms[i].clone()).collect();
    }
}

/// Global vector order: norm, then lexicographic coordinates.
pub fn canonical_cmp(na: &Rat, a: &[i64], nb: &Rat, b: &[i64]) -> Ordering {
    na.cmp(nb).then_with(|| a.cmp(b))
}

/// A lattice prepared for repeated enumeration.
#[derive(Clone, Debug)]
pub struct Enumerator {
    n: usize,
    /// denominators cleared: `scale · G`
    scale: i128,
    reduced_gram: Vec<i128>,
    /// rows express the reduced basis in the input basis
    transform: Vec<i64>,
    transform_inv: RatMatrix,
    /// Cholesky-style coefficients of the reduced form
    q: Vec<f64>,
}

impl Enumerator {
    pub fn new(lattice: &Lattice) -> Result<Self> {
        let n = lattice.rank();
        let (g_red, t) = lll_reduce(lattice.gram())?;
        let (scale, g_int) = g_red.clear_denominators();
        let reduced_gram = g_int.data().iter().map(|x| x.to_i128().expect("gram entry exceeds i128")).collect();
        let transform = t.to_i64().expect("LLL transform exceeds i64");
        let transform_inv = t.to_rat().inverse().expect("unimodular transform");
        let q = cholesky_coefficients(&g_red);
        Ok(Enumerator {
            n,
            scale: scale.to_i128().expect("scale exceeds i128"),
            reduced_gram,
            transform,
            transform_inv,
            q,
        })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    /// Exact `scale · x·G'·xᵗ` in reduced coordinates.
    fn scaled_norm_reduced(&self, x: &[i128]) -> i128 {
        let n = self.n;
        let mut s = 0i128;
        for i in 0..n {
            if x[i] == 0 {
                continue;
            }
            let mut r = 0i128;
            for j in 0..n {
                r += self.reduced_gram[i * n + j] * x[j];
            }
            s += x[i] * r;
        }
        s
    }

    fn to_input_coords(&self, x: &[i64]) -> Vec<i64> {
        let n = self.n;
        let mut out = vec![0i64; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for j in 0..n {
                out[j] += xi * self.transform[i * n + j];
            }
        }
        out
    }

    /// All nonzero vectors of norm at most `bound`, closed under negation and sorted canonically.
    pub fn short_vectors(&self, bound: &Rat) -> VectorList {
        let mut out = VectorList::default();
        if self.n == 0 || bound <= &Rat::zero() {
            return out;
        }
        let center = vec![0.0; self.n];
        let bound_f = bound.to_f64().unwrap_or(f64::MAX);
        let (bnum, bden) = (to_i128(bound.numer()), to_i128(bound.denom()));
        let mut x = vec![0i64; self.n];
        let mut sink = |x: &[i64]| {
            let xi: Vec<i128> = x.iter().map(|&v| v as i128).collect();
            let s = self.scaled_norm_reduced(&xi);
            // s / scale <= bnum / bden
            if s == 0 || s * bden > bnum * self.scale {
                return;
            }
            let v = self.to_input_coords(x);
            let neg: Vec<i64> = v.iter().map(|c| -c).collect();
            let norm = Rat::new(Int::from(s), Int::from(self.scale));
            out.coords.push(v);
            out.norms.push(norm.clone());
            out.coords.push(neg);
            out.norms.push(norm);
        };
        self.search(self.n - 1, &mut x, bound_f * (1.0 + 1e-9) + SLACK, &center, true, &mut sink);
        out.sort_canonical();
        out
    }

    /// All `x` (input coordinates) with `(x − c, x − c) ≤ bound`, where `c = center_num / center_den`.
    pub fn close_vectors(&self, center_num: &[i64], center_den: i64, bound: &Rat) -> VectorList {
        assert_eq!(center_num.len(), self.n);
        let mut out = VectorList::default();
        if self.n == 0 {
            if bound >= &Rat::zero() {
                out.coords.push(vec![]);
                out.norms.push(Rat::zero());
            }
            return out;
        }
        // center in reduced coordinates: c' = c·T⁻¹
        let c: Vec<Rat> = center_num.iter().map(|&v| Rat::new(Int::from(v), Int::from(center_den))).collect();
        let c_red = crate::linalg::rat_row_times(&c, &self.transform_inv);
        let den = c_red.iter().fold(Int::from(1), |acc, v| num_integer::Integer::lcm(&acc, v.denom()));
        let den_i = to_i128(&den);
        let c_num: Vec<i128> =
            c_red.iter().map(|v| to_i128(&(v * Rat::from_integer(den.clone())).to_integer())).collect();
        let center_f: Vec<f64> = c_red.iter().map(|v| v.to_f64().unwrap()).collect();
        let bound_f = bound.to_f64().unwrap_or(f64::MAX);
        let (bnum, bden) = (to_i128(bound.numer()), to_i128(bound.denom()));
        let mut x = vec![0i64; self.n];
        let mut sink = |x: &[i64]| {
            let d: Vec<i128> = x.iter().zip(&c_num).map(|(&v, &cn)| v as i128 * den_i - cn).collect();
            let s = self.scaled_norm_reduced(&d);
            // s / (scale·den²) <= bnum / bden
            if s * bden > bnum * self.scale * den_i * den_i {
                return;
            }
            out.coords.push(self.to_input_coords(x));
            out.norms.push(Rat::new(Int::from(s), Int::from(self.scale * den_i * den_i)));
        };
        self.search(self.n - 1, &mut x, bound_f * (1.0 + 1e-9) + SLACK, &center_f, false, &mut sink);
        out.sort_canonical();
        out
    }

    fn search(
        &self,
        i: usize,
        x: &mut [i64],
        rem: f64,
        center: &[f64],
        half_space: bool,
        sink: &mut impl FnMut(&[i64]),
    ) {
        let n = self.n;
        let qii = self.q[i * n + i];
        let mut ci = center[i];
        for j in i + 1..n {
            ci -= self.q[i * n + j] * (x[j] as f64 - center[j]);
        }
        let r = (rem.max(0.0) / qii).sqrt();
        let mut lo = (ci - r - SLACK).ceil() as i64;
        let hi = (ci + r + SLACK).floor() as i64;
        if half_space {
            lo = lo.max(0);
        }
        for v in lo..=hi {
            let d = v as f64 - ci;
            let used = qii * d * d;
            if used > rem + SLACK {
                continue;
            }
            x[i] = v;
            if i == 0 {
                if !(half_space && v == 0) {
                    sink(x);
                }
            } else {
                self.search(i - 1, x, rem - used, center, half_space && v == 0, sink);
            }
        }
        x[i] = 0;
    }
}

fn to_i128(x: &Int) -> i128 {
    x.to_i128().expect("value exceeds i128")
}

/// `Q(x) = Σ qᵢᵢ (xᵢ + Σ_{j>i} qᵢⱼ xⱼ)²`, computed exactly then rounded.
fn cholesky_coefficients(g: &RatMatrix) -> Vec<f64> {
    let n = g.rows();
    let mut q = vec![Rat::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            q[i * n + j] = g.get(i, j).clone();
        }
    }
    for i in 0..n {
        let qii = q[i * n + i].clone();
        for j in i + 1..n {
            let v = &q[i * n + j] / &qii;
            q[i * n + j] = v;
        }
        for k in i + 1..n {
            for l in k..n {
                let t = &q[i * n + k] * &q[i * n + l] * &qii;
                q[k * n + l] -= t;
            }
        }
    }
    q.iter().map(|v| v.to_f64().unwrap()).collect()
}

pub fn short_vectors(l: &Lattice, bound: &Rat) -> Result<VectorList> {
    Ok(Enumerator::new(l)?.short_vectors(bound))
}

/// Least nonzero norm.
pub fn minimum(l: &Lattice) -> Result<Rat> {
    if l.rank() == 0 {
        return Err(Error::RankZero);
    }
    let (g, _) = lll_reduce(l.gram())?;
    let bound = (0..g.rows()).map(|i| g.get(i, i).clone()).min().unwrap();
    let e = Enumerator::new(l)?;
    let v = e.short_vectors(&bound);
    Ok(v.norms[0].clone())
}

/// `(norm, count)` for every norm in `(0, nmax]` that occurs.
pub fn vector_count_by_norm(l: &Lattice, nmax: &Rat) -> Result<Vec<(Rat, usize)>> {
    if l.rank() == 0 {
        return Ok(vec![]);
    }
    let v = short_vectors(l, nmax)?;
    let mut out: Vec<(Rat, usize)> = Vec::new();
    for nm in v.norms {
        match out.last_mut() {
            Some((last, c)) if *last == nm => *c += 1,
            _ => out.push((nm, 1)),
        }
    }
    Ok(out)
}

/// Short representatives of a class `u + 2Λ` in a Leech-like lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetReps {
    /// nonzero representatives of norm ≤ 8, canonical order
    pub vectors: VectorList,
    /// `u ∈ 2Λ`
    pub zero_class: bool,
}

impl CosetReps {
    pub fn min_norm(&self) -> Option<&Rat> {
        self.vectors.norms.first()
    }
}

/// Enumerator for classes of `Λ/2Λ`, validated once against the Leech invariants.
#[derive(Clone, Debug)]
pub struct CosetEnumerator {
    enumerator: Enumerator,
}

impl CosetEnumerator {
    pub fn new(ambient: &Lattice) -> Result<Self> {
        if ambient.rank() != 24 {
            return Err(Error::NotLeechLike(format!("rank {}", ambient.rank())));
        }
        if !ambient.is_even() {
            return Err(Error::NotLeechLike("not even".into()));
        }
        if ambient.det() != Rat::from_integer(1.into()) {
            return Err(Error::NotLeechLike(format!("determinant {}", ambient.det())));
        }
        let enumerator = Enumerator::new(ambient)?;
        if !enumerator.short_vectors(&Rat::from_integer(2.into())).is_empty() {
            return Err(Error::NotLeechLike("has roots".into()));
        }
        Ok(CosetEnumerator { enumerator })
    }

    pub fn enumerator(&self) -> &Enumerator {
        &self.enumerator
    }

    /// All nonzero `v ∈ u + 2Λ` with `(v, v) ≤ 8`.
    pub fn short_reps(&self, u: &[i64]) -> CosetReps {
        let zero_class = u.iter().all(|c| c % 2 == 0);
        if zero_class {
            return CosetReps { vectors: VectorList::default(), zero_class };
        }
        // v = u − 2w with |w − u/2|² ≤ 2
        let found = self.enumerator.close_vectors(u, 2, &Rat::from_integer(2.into()));
        let mut vectors = VectorList::default();
        for (w, nm) in found.coords.iter().zip(&found.norms) {
            let v: Vec<i64> = u.iter().zip(w).map(|(a, b)| a - 2 * b).collect();
            vectors.coords.push(v);
            vectors.norms.push(nm * Rat::from_integer(4.into()));
        }
        vectors.sort_canonical();
        CosetReps { vectors, zero_class }
    }
}

pub fn coset_short_reps(ambient: &Lattice, u: &[i64]) -> Result<CosetReps> {
    Ok(CosetEnumerator::new(ambient)?.short_reps(u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn a2() -> Lattice {
        Lattice::from_i64(2, &[2, -1, -1, 2]).unwrap()
    }

    /// Naive box search: every x with |xᵢ| ≤ r.
    fn box_count(l: &Lattice, r: i64, bound: &Rat) -> usize {
        let n = l.rank();
        let mut count = 0;
        let total = (2 * r + 1).pow(n as u32);
        for mut k in 0..total {
            let mut x = vec![Int::from(0); n];
            for xi in x.iter_mut() {
                *xi = Int::from(k % (2 * r + 1) - r);
                k /= 2 * r + 1;
            }
            let nm = l.norm(&x);
            if !nm.is_zero() && &nm <= bound {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn a2_has_six_minimal_vectors() {
        let v = short_vectors(&a2(), &rat(2, 1)).unwrap();
        assert_eq!(v.len(), box_count(&a2(), 2, &rat(2, 1)));
        assert_eq!(v.len(), 6);
        assert!(v.norms.iter().all(|n| *n == rat(2, 1)));
    }

    #[test]
    fn canonical_order_and_negation_closure() {
        let v = short_vectors(&a2(), &rat(8, 1)).unwrap();
        for w in v.coords.windows(1) {
            let neg: Vec<i64> = w[0].iter().map(|c| -c).collect();
            assert!(v.coords.contains(&neg));
        }
        for i in 1..v.len() {
            assert_ne!(canonical_cmp(&v.norms[i - 1], &v.coords[i - 1], &v.norms[i], &v.coords[i]), Ordering::Greater);
        }
    }

    #[test]
    fn a1_counts_and_minimum() {
        let a1 = Lattice::from_i64(1, &[2]).unwrap();
        assert_eq!(vector_count_by_norm(&a1, &rat(8, 1)).unwrap(), vec![(rat(2, 1), 2), (rat(8, 1), 2)]);
        assert_eq!(minimum(&a1).unwrap(), rat(2, 1));
        assert_eq!(minimum(&Lattice::zero()), Err(Error::RankZero));
        assert!(vector_count_by_norm(&Lattice::zero(), &rat(8, 1)).unwrap().is_empty());
    }

    #[test]
    fn close_vectors_with_center() {
        let z2 = Lattice::from_i64(2, &[1, 0, 0, 1]).unwrap();
        let e = Enumerator::new(&z2).unwrap();
        // points within distance² 1/2 of (1/2, 1/2): the four corners
        let v = e.close_vectors(&[1, 1], 2, &rat(1, 2));
        assert_eq!(v.len(), 4);
        assert!(v.norms.iter().all(|n| *n == rat(1, 2)));
    }

    #[test]
    fn rational_gram_is_handled() {
        let l = Lattice::new(RatMatrix::new(1, 1, vec![rat(1, 2)])).unwrap();
        assert_eq!(minimum(&l).unwrap(), rat(1, 2));
        assert_eq!(short_vectors(&l, &rat(2, 1)).unwrap().len(), 4);
    }
}
