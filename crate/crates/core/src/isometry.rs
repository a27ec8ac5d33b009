//! Lattice isometries and automorphism groups by base-image backtracking.
//!
//! The base is a basis consisting of short vectors; an isometry is fixed by
//! the images of the basis, and candidate images are short vectors of the
//! right norm whose inner products with the images already chosen match.
//! Vector fingerprints (hashed multisets of inner products, refined twice)
//! prune candidates when the short-vector set is small.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::{One, ToPrimitive};

use crate::backtrack::{automorphisms, search_one, AutSpace, Budget, SearchSpace};
use crate::enumerate::Enumerator;
use crate::error::{Error, Result};
use crate::fqs::discriminant_form;
use crate::lattice::Lattice;
use crate::linalg::{lll_reduce, Int, IntMatrix, Rat, RatMatrix, SqMat};
use crate::perm::{Perm, StabChain};

/// Fingerprints are computed only below this many short vectors.
pub const FINGERPRINT_LIMIT: usize = 3000;

/// Short vectors of a lattice in a basis made of short vectors.
#[derive(Clone, Debug)]
pub struct VectorDomain {
    n: usize,
    /// search basis, rows in input coordinates
    basis: IntMatrix,
    basis_inv: RatMatrix,
    scale: Int,
    /// `scale · Gram` in the search basis
    gram: Vec<i64>,
    bound: Rat,
    vecs: Vec<Vec<i64>>,
    vg: Vec<Vec<i64>>,
    norms: Vec<i64>,
    index: HashMap<Vec<i64>, u32>,
    base: Vec<u32>,
    fingerprint: Vec<u64>,
    buckets: HashMap<(i64, u64), Vec<u32>>,
}

impl VectorDomain {
    /// `min_bound` forces the domain to contain every vector up to that norm.
    pub fn new(l: &Lattice, min_bound: Option<&Rat>) -> Result<Self> {
        let n = l.rank();
        let (scale, sg) = l.scaled_int_gram();
        let scaled_norm = |x: &[Int]| -> Int {
            let mut s = Int::from(0);
            for i in 0..n {
                for j in 0..n {
                    s += &x[i] * sg.get(i, j) * &x[j];
                }
            }
            s
        };
        let (_, t) = lll_reduce(l.gram())?;
        let mut basis = t;
        if n > 0 {
            // replace basis vectors by minimal vectors where a unimodular swap allows
            let e = Enumerator::new(l)?;
            let min_norm = (0..n).map(|i| scaled_norm(basis.row(i))).min().unwrap();
            let shortest = e.short_vectors(&Rat::new(min_norm.clone(), scale.clone()));
            let m = shortest.norms[0].clone();
            let minimal: Vec<&Vec<i64>> =
                shortest.coords.iter().zip(&shortest.norms).filter(|(_, nm)| **nm == m).map(|(v, _)| v).collect();
            for i in 0..n {
                let ni = Rat::new(scaled_norm(basis.row(i)), scale.clone());
                if ni <= m {
                    continue;
                }
                let inv = basis.to_rat().inverse().expect("basis");
                let found = minimal.iter().find(|x| {
                    let c: Rat =
                        x.iter().enumerate().map(|(j, &xj)| inv.get(j, i) * Rat::from_integer(xj.into())).sum();
                    c.is_one() || (-c).is_one()
                });
                if let Some(x) = found {
                    for (j, &xj) in x.iter().enumerate() {
                        basis.set(i, j, Int::from(xj));
                    }
                }
            }
        }
        let basis_inv = basis.to_rat().inverse().unwrap_or_else(|| RatMatrix::zeros(0, 0));
        let gb = basis.mul(&sg).mul(&basis.transpose());
        let gram = gb.to_i64().expect("scaled Gram exceeds i64");
        let mut bound = (0..n)
            .map(|i| Rat::new(gb.get(i, i).clone(), scale.clone()))
            .max()
            .unwrap_or_else(|| Rat::from_integer(0.into()));
        if let Some(b) = min_bound {
            if *b > bound {
                bound = b.clone();
            }
        }
        let mut vecs = Vec::new();
        if n > 0 {
            let list = Enumerator::new(l)?.short_vectors(&bound);
            for v in &list.coords {
                // input coordinates to search coordinates
                let r: Vec<Rat> = crate::linalg::rat_row_times(
                    &v.iter().map(|&x| Rat::from_integer(x.into())).collect::<Vec<_>>(),
                    &basis_inv,
                );
                vecs.push(r.iter().map(|x| x.to_integer().to_i64().unwrap()).collect::<Vec<i64>>());
            }
        }
        let vg: Vec<Vec<i64>> = vecs.iter().map(|v| row_times(v, &gram, n)).collect();
        let norms: Vec<i64> = vecs.iter().zip(&vg).map(|(v, w)| dot(v, w)).collect();
        let index: HashMap<Vec<i64>, u32> = vecs.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        let base = (0..n)
            .map(|i| {
                let mut e = vec![0i64; n];
                e[i] = 1;
                index[&e]
            })
            .collect();
        let mut dom = VectorDomain {
            n,
            basis,
            basis_inv,
            scale,
            gram,
            bound,
            vecs,
            vg,
            norms,
            index,
            base,
            fingerprint: Vec::new(),
            buckets: HashMap::new(),
        };
        dom.fingerprint = dom.compute_fingerprints();
        for i in 0..dom.vecs.len() {
            dom.buckets.entry((dom.norms[i], dom.fingerprint[i])).or_default().push(i as u32);
        }
        Ok(dom)
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }

    pub fn bound(&self) -> &Rat {
        &self.bound
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    fn ip(&self, a: u32, b: u32) -> i64 {
        dot(&self.vg[a as usize], &self.vecs[b as usize])
    }

    fn compute_fingerprints(&self) -> Vec<u64> {
        let m = self.vecs.len();
        if m > FINGERPRINT_LIMIT {
            return vec![0; m];
        }
        let ips: Vec<Vec<i64>> = (0..m as u32).map(|a| (0..m as u32).map(|b| self.ip(a, b)).collect()).collect();
        let first: Vec<u64> = ips
            .iter()
            .map(|row| {
                let mut s = row.clone();
                s.sort_unstable();
                hash_words(s.iter().map(|&x| x as u64))
            })
            .collect();
        ips.iter()
            .map(|row| {
                let mut s: Vec<(i64, u64)> = row.iter().zip(&first).map(|(&x, &f)| (x, f)).collect();
                s.sort_unstable();
                hash_words(s.iter().flat_map(|&(x, f)| [x as u64, f]))
            })
            .collect()
    }

    /// Search-basis coordinates to input coordinates: `B⁻¹·X·B`.
    fn to_input(&self, x: &IntMatrix, target: &VectorDomain) -> IntMatrix {
        let r = self.basis_inv.mul(&x.to_rat()).mul(&target.basis.to_rat());
        r.to_int().expect("isometry is integral")
    }

    /// Matrix (search coordinates) of the map sending basis vector `i` to `vecs[images[i]]`.
    fn images_matrix(&self, target: &VectorDomain, images: &[u32]) -> IntMatrix {
        let rows: Vec<Vec<i64>> = images.iter().map(|&i| target.vecs[i as usize].clone()).collect();
        IntMatrix::from_rows(&rows, self.n)
    }

    fn perm_of(&self, x: &IntMatrix) -> Perm {
        let xs = SqMat::from_int(x).expect("small entries");
        Perm::from_images(self.vecs.iter().map(|v| self.index[&xs.apply(v)]).collect())
    }

    /// Matrix (input coordinates) of the automorphism with this permutation of the domain.
    pub fn matrix_of_perm(&self, p: &Perm) -> SqMat {
        let images: Vec<u32> = self.base.iter().map(|&b| p.image(b)).collect();
        SqMat::from_int(&self.to_input(&self.images_matrix(self, &images), self)).expect("small entries")
    }

    /// Permutation of the domain induced by an automorphism in input coordinates.
    pub fn perm_of_matrix(&self, g: &SqMat) -> Perm {
        let x = self.basis.to_rat().mul(&g.to_int().to_rat()).mul(&self.basis_inv);
        self.perm_of(&x.to_int().expect("integral"))
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn row_times(v: &[i64], m: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0i64; n];
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0 {
            continue;
        }
        for j in 0..n {
            out[j] += vi * m[i * n + j];
        }
    }
    out
}

/// Deterministic 64-bit hash (the same on every run and platform).
fn hash_words(words: impl Iterator<Item = u64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        h ^= w;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
        h ^= h >> 29;
    }
    h
}

/// Isometries from the lattice of `src` to the lattice of `dst`.
struct LatticeSearch<'a> {
    src: &'a VectorDomain,
    dst: &'a VectorDomain,
}

impl SearchSpace for LatticeSearch<'_> {
    type Elem = IntMatrix;

    fn depth(&self) -> usize {
        self.src.n
    }

    fn candidates(&self, images: &[u32]) -> Vec<u32> {
        let l = images.len();
        let n = self.src.n;
        let b = self.src.base[l];
        let key = (self.src.norms[b as usize], self.src.fingerprint[b as usize]);
        let Some(bucket) = self.dst.buckets.get(&key) else { return vec![] };
        let want: Vec<i64> = (0..l).map(|j| self.src.gram[l * n + j]).collect();
        bucket.iter().copied().filter(|&w| images.iter().zip(&want).all(|(&x, &ip)| self.dst.ip(x, w) == ip)).collect()
    }

    fn complete(&self, images: &[u32]) -> Option<IntMatrix> {
        let x = self.src.images_matrix(self.dst, images);
        let n = self.src.n;
        let xs = SqMat::from_int(&x)?;
        let g2 = SqMat::new(n, self.dst.gram.clone());
        let lhs = xs.mul(&g2).mul(&xs.transpose());
        (lhs.data() == self.src.gram.as_slice()).then_some(x)
    }
}

impl AutSpace for LatticeSearch<'_> {
    fn degree(&self) -> usize {
        self.src.vecs.len()
    }

    fn base_point(&self, level: usize) -> u32 {
        self.src.base[level]
    }

    fn perm(&self, x: &IntMatrix) -> Perm {
        self.src.perm_of(x)
    }
}

/// `O(L)` with generators in input coordinates.
#[derive(Clone, Debug)]
pub struct IsometryGroup {
    pub lattice: Lattice,
    pub gens: Vec<SqMat>,
    pub order: u128,
    /// the short-vector domain the generators permute
    pub domain: Arc<VectorDomain>,
    pub perms: Vec<Perm>,
}

impl IsometryGroup {
    pub fn chain(&self) -> StabChain {
        StabChain::new(self.domain.len(), &self.perms, &[])
    }
}

pub fn automorphism_group(l: &Lattice) -> Result<IsometryGroup> {
    automorphism_group_with_budget(l, crate::limits::node_budget())
}

pub fn automorphism_group_with_budget(l: &Lattice, nodes: u64) -> Result<IsometryGroup> {
    let dom = Arc::new(VectorDomain::new(l, None)?);
    let space = LatticeSearch { src: &dom, dst: &dom };
    let mut budget = Budget::new("isometry search nodes", nodes);
    let r = automorphisms(&space, &mut budget)?;
    let order = r.order();
    let mut gens = Vec::new();
    for x in &r.gens {
        let g = SqMat::from_int(&dom.to_input(x, &dom)).expect("small entries");
        let gi = g.to_int();
        let gram = l.gram();
        let preserved = gi.to_rat().mul(gram).mul(&gi.to_rat().transpose()) == *gram;
        if !preserved {
            return Err(Error::NotGramPreserving);
        }
        gens.push(g);
    }
    Ok(IsometryGroup { lattice: l.clone(), gens, order, domain: dom.clone(), perms: r.perms })
}

/// `T` with `T·Gram₂·Tᵗ = Gram₁`, if the lattices are isometric.
pub fn is_isometric(l1: &Lattice, l2: &Lattice) -> Option<IntMatrix> {
    is_isometric_with_budget(l1, l2, crate::limits::node_budget()).ok().flatten()
}

pub fn is_isometric_with_budget(l1: &Lattice, l2: &Lattice, nodes: u64) -> Result<Option<IntMatrix>> {
    if l1.rank() != l2.rank()
        || l1.det() != l2.det()
        || l1.is_even() != l2.is_even()
        || l1.is_integral() != l2.is_integral()
    {
        return Ok(None);
    }
    if l1.rank() == 0 {
        return Ok(Some(IntMatrix::zeros(0, 0)));
    }
    let mut d1 = VectorDomain::new(l1, None)?;
    let d2 = VectorDomain::new(l2, Some(&d1.bound))?;
    if d2.bound > d1.bound {
        d1 = VectorDomain::new(l1, Some(&d2.bound))?;
    }
    if d1.scale != d2.scale || d1.len() != d2.len() {
        return Ok(None);
    }
    let profile = |d: &VectorDomain| {
        let mut p: Vec<(i64, u64)> = d.norms.iter().copied().zip(d.fingerprint.iter().copied()).collect();
        p.sort_unstable();
        p
    };
    if profile(&d1) != profile(&d2) {
        return Ok(None);
    }
    let space = LatticeSearch { src: &d1, dst: &d2 };
    let mut budget = Budget::new("isometry search nodes", nodes);
    let Some(x) = search_one(&space, &[], &mut budget)? else { return Ok(None) };
    let t = d1.to_input(&x, &d2);
    let tr = t.to_rat();
    assert_eq!(tr.mul(l2.gram()).mul(&tr.transpose()), *l1.gram(), "isometry check");
    Ok(Some(t))
}

pub fn pair_is_isometric(p1: (&Lattice, &Lattice), p2: (&Lattice, &Lattice)) -> bool {
    is_isometric(p1.0, p2.0).is_some() && is_isometric(p1.1, p2.1).is_some()
}

/// `O(L)` split along its action on the discriminant form.
#[derive(Clone, Debug)]
pub struct O0Split {
    pub full: IsometryGroup,
    pub kernel_gens: Vec<SqMat>,
    pub kernel_order: u128,
    pub obar_order: u128,
}

pub fn o0_split(l: &Lattice) -> Result<O0Split> {
    let full = automorphism_group(l)?;
    let disc = discriminant_form(l)?;
    let a = &disc.space;
    if a.is_trivial() {
        return Ok(O0Split { kernel_gens: full.gens.clone(), kernel_order: full.order, obar_order: 1, full });
    }
    let limit = crate::limits::element_budget();
    if a.order() > limit as u128 {
        return Err(Error::budget("discriminant group elements", limit as u128));
    }
    // act on A ⊔ V; a base starting with the generators of A makes the
    // stabilizer of that prefix the kernel
    let na = a.order() as usize;
    let nv = full.domain.len();
    let perms: Vec<Perm> = full
        .gens
        .iter()
        .zip(&full.perms)
        .map(|(g, pv)| {
            let pa = disc.induced(g).perm(a);
            let mut im: Vec<u32> = pa.images().to_vec();
            im.extend(pv.images().iter().map(|&p| p + na as u32));
            Perm::from_images(im)
        })
        .collect();
    let prefix: Vec<u32> = (0..a.ngens())
        .map(|i| {
            let mut e = vec![0i64; a.ngens()];
            e[i] = 1;
            a.index_of(&e) as u32
        })
        .collect();
    let chain = StabChain::new(na + nv, &perms, &prefix);
    assert_eq!(chain.order(), full.order, "chain order disagrees with backtracking");
    let k = prefix.len();
    let kernel_order = chain.stabilizer_order(k);
    let kernel_gens = chain
        .stabilizer_gens(k)
        .iter()
        .map(|p| {
            let pv = Perm::from_images(p.images()[na..].iter().map(|&x| x - na as u32).collect());
            full.domain.matrix_of_perm(&pv)
        })
        .collect();
    Ok(O0Split { obar_order: full.order / kernel_order, kernel_gens, kernel_order, full })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{cartan_gram, RootType};

    fn lat(n: usize, g: &[i64]) -> Lattice {
        Lattice::from_i64(n, g).unwrap()
    }

    fn e8() -> Lattice {
        Lattice::new(cartan_gram(RootType::E(8))).unwrap()
    }

    #[test]
    fn small_automorphism_groups() {
        assert_eq!(automorphism_group(&lat(1, &[2])).unwrap().order, 2);
        assert_eq!(automorphism_group(&lat(2, &[2, -1, -1, 2])).unwrap().order, 12);
        assert_eq!(automorphism_group(&lat(2, &[1, 0, 0, 1])).unwrap().order, 8);
        assert_eq!(automorphism_group(&lat(2, &[2, 0, 0, 4])).unwrap().order, 4);
        assert_eq!(automorphism_group(&Lattice::zero()).unwrap().order, 1);
        let d4 = Lattice::new(cartan_gram(RootType::D(4))).unwrap();
        assert_eq!(automorphism_group(&d4).unwrap().order, 1152);
    }

    #[test]
    fn e8_automorphism_order() {
        let g = automorphism_group(&e8()).unwrap();
        assert_eq!(g.order, 696729600);
        assert_eq!(g.chain().order(), 696729600);
        let gram = SqMat::from_int(&e8().int_gram().unwrap()).unwrap();
        assert!(g.gens.iter().all(|x| x.preserves(&gram)));
    }

    #[test]
    fn isometry_examples() {
        let a2 = lat(2, &[2, -1, -1, 2]);
        let a2_other = lat(2, &[2, 1, 1, 2]);
        let t = is_isometric(&a2, &a2_other).unwrap();
        assert_eq!(t.to_rat().mul(a2_other.gram()).mul(&t.to_rat().transpose()), *a2.gram());
        assert!(is_isometric(&a2, &lat(2, &[4, -2, -2, 4])).is_none());
        assert!(is_isometric(&a2, &a2).is_some());
        // same determinant, different lattices
        assert!(is_isometric(&lat(2, &[2, 0, 0, 6]), &lat(2, &[4, 2, 2, 4])).is_none());
    }

    #[test]
    fn o0_examples() {
        let s = o0_split(&e8()).unwrap();
        assert_eq!(s.kernel_order, s.full.order);
        let s = o0_split(&lat(1, &[2])).unwrap();
        assert_eq!((s.kernel_order, s.obar_order), (2, 1));
        let s = o0_split(&lat(2, &[2, -1, -1, 2])).unwrap();
        assert_eq!((s.kernel_order, s.obar_order), (6, 2));
        assert!(!s.kernel_gens.is_empty());
    }
}
