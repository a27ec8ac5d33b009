//! Finite groups of lattice automorphisms.
//!
//! A group is kept as integer generator matrices plus a faithful permutation
//! action on a finite set of short vectors. Orders, membership and random
//! elements come from a stabilizer chain of that action.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::enumerate::Enumerator;
use crate::error::{Error, Result};
use crate::isometry::o0_split;
use crate::lattice::{orthogonal_complement, EmbeddedLattice, Lattice};
use crate::linalg::{kernel_saturated, Int, IntMatrix, Rat, RatMatrix, SqMat};
use crate::perm::{Perm, StabChain};

/// Domains larger than this use randomized Schreier–Sims.
pub const DETERMINISTIC_DEGREE_LIMIT: usize = 20_000;
const RANDOM_PATIENCE: usize = 48;

#[derive(Debug)]
pub struct MatrixGroup {
    ambient: Arc<Lattice>,
    gens: Vec<SqMat>,
    domain: Arc<PermDomain>,
    perms: Vec<Perm>,
    chain: OnceLock<StabChain>,
}

impl Clone for MatrixGroup {
    fn clone(&self) -> Self {
        let chain = OnceLock::new();
        if let Some(c) = self.chain.get() {
            let _ = chain.set(c.clone());
        }
        MatrixGroup {
            ambient: self.ambient.clone(),
            gens: self.gens.clone(),
            domain: self.domain.clone(),
            perms: self.perms.clone(),
            chain,
        }
    }
}

/// A finite spanning vector set, closed under the group.
#[derive(Debug)]
pub struct PermDomain {
    vectors: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, u32>,
    /// `n` independent domain vectors and the inverse of their matrix
    frame: Vec<u32>,
    frame_inv: RatMatrix,
}

impl PermDomain {
    fn new(vectors: Vec<Vec<i64>>, n: usize) -> Option<Self> {
        let index = vectors.iter().enumerate().map(|(i, v)| (v.clone(), i as u32)).collect();
        let mut frame = Vec::new();
        let mut span = ModSpan::new(n);
        for (i, v) in vectors.iter().enumerate() {
            if frame.len() == n {
                break;
            }
            if span.insert(v) {
                frame.push(i as u32);
            }
        }
        if frame.len() < n {
            return None;
        }
        let rows: Vec<Vec<i64>> = frame.iter().map(|&f| vectors[f as usize].clone()).collect();
        let frame_inv = IntMatrix::from_rows(&rows, n).to_rat().inverse().unwrap_or_else(|| RatMatrix::zeros(0, 0));
        Some(PermDomain { vectors, index, frame, frame_inv })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<i64>] {
        &self.vectors
    }

    fn perm_of(&self, g: &SqMat) -> Option<Perm> {
        let mut im = Vec::with_capacity(self.vectors.len());
        for v in &self.vectors {
            im.push(*self.index.get(&g.apply(v))?);
        }
        Some(Perm::from_images(im))
    }

    fn matrix_of(&self, p: &Perm, n: usize) -> SqMat {
        if n == 0 {
            return SqMat::identity(0);
        }
        let rows: Vec<Vec<i64>> = self.frame.iter().map(|&f| self.vectors[p.image(f) as usize].clone()).collect();
        let img = IntMatrix::from_rows(&rows, n).to_rat();
        SqMat::from_int(&self.frame_inv.mul(&img).to_int().expect("integral")).expect("small entries")
    }
}

/// Orbits of `vecs` under the matrices `gens`, as index lists.
fn vector_orbits(vecs: &[Vec<i64>], gens: &[SqMat]) -> Result<Vec<Vec<u32>>> {
    let index: HashMap<&[i64], u32> = vecs.iter().enumerate().map(|(i, v)| (v.as_slice(), i as u32)).collect();
    let mut seen = vec![false; vecs.len()];
    let mut out = Vec::new();
    for s in 0..vecs.len() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut orbit = vec![s as u32];
        let mut k = 0;
        while k < orbit.len() {
            let v = &vecs[orbit[k] as usize];
            for g in gens {
                let w = g.apply(v);
                let j = *index.get(w.as_slice()).ok_or(Error::NotGramPreserving)?;
                if !seen[j as usize] {
                    seen[j as usize] = true;
                    orbit.push(j);
                }
            }
            k += 1;
        }
        out.push(orbit);
    }
    Ok(out)
}

impl MatrixGroup {
    /// Validates the generators and builds a faithful permutation domain from
    /// the short vectors of the ambient lattice.
    pub fn new(ambient: Arc<Lattice>, gens: Vec<SqMat>) -> Result<Self> {
        Self::with_candidates(ambient, gens, None)
    }

    /// As [`MatrixGroup::new`], drawing the domain from `candidates` (all
    /// vectors of some norm shell, e.g. cached minimal vectors) when given.
    pub fn with_candidates(ambient: Arc<Lattice>, gens: Vec<SqMat>, candidates: Option<&[Vec<i64>]>) -> Result<Self> {
        let n = ambient.rank();
        let gram = ambient.gram();
        for g in &gens {
            if g.dim() != n {
                return Err(Error::DimensionMismatch(format!("generator of size {} on rank {}", g.dim(), n)));
            }
            let gr = g.to_int().to_rat();
            if gr.mul(gram).mul(&gr.transpose()) != *gram {
                return Err(Error::NotGramPreserving);
            }
        }
        let gens: Vec<SqMat> = gens.into_iter().filter(|g| !g.is_identity()).collect();
        let domain = Arc::new(Self::choose_domain(&ambient, &gens, candidates)?);
        let perms =
            gens.iter().map(|g| domain.perm_of(g).ok_or(Error::NotFaithfulDomain)).collect::<Result<Vec<_>>>()?;
        Ok(MatrixGroup { ambient, gens, domain, perms, chain: OnceLock::new() })
    }

    fn choose_domain(ambient: &Lattice, gens: &[SqMat], candidates: Option<&[Vec<i64>]>) -> Result<PermDomain> {
        let n = ambient.rank();
        if n == 0 {
            return Ok(PermDomain {
                vectors: vec![],
                index: HashMap::new(),
                frame: vec![],
                frame_inv: RatMatrix::zeros(0, 0),
            });
        }
        if let Some(c) = candidates {
            if let Some(d) = Self::domain_from(c, gens, n)? {
                return Ok(d);
            }
        }
        // escalate through norm shells until the orbits span
        let e = Enumerator::new(ambient)?;
        let mut bound = crate::enumerate::minimum(ambient)?;
        loop {
            let list = e.short_vectors(&bound);
            if let Some(d) = Self::domain_from(&list.coords, gens, n)? {
                return Ok(d);
            }
            let next = list.norms.last().cloned().unwrap_or(bound.clone());
            bound = next + crate::enumerate::minimum(ambient)?;
        }
    }

    /// Smallest orbits first, until they span.
    fn domain_from(vecs: &[Vec<i64>], gens: &[SqMat], n: usize) -> Result<Option<PermDomain>> {
        let mut orbits = vector_orbits(vecs, gens)?;
        orbits.sort_by_key(|o| (o.len(), o.iter().min().copied()));
        let mut span = ModSpan::new(n);
        let mut chosen: Vec<u32> = Vec::new();
        for o in &orbits {
            let before = span.rank();
            for &i in o {
                span.insert(&vecs[i as usize]);
                if span.rank() == n {
                    break;
                }
            }
            if span.rank() == before {
                continue;
            }
            chosen.extend(o);
            if span.rank() == n {
                chosen.sort_unstable();
                let vectors = chosen.iter().map(|&i| vecs[i as usize].clone()).collect();
                return Ok(PermDomain::new(vectors, n));
            }
        }
        Ok(None)
    }

    pub fn trivial(ambient: Arc<Lattice>) -> Self {
        MatrixGroup::new(ambient, vec![]).expect("trivial group")
    }

    /// A subgroup on the same permutation domain.
    pub fn subgroup(&self, gens: Vec<SqMat>) -> Result<Self> {
        let gens: Vec<SqMat> = gens.into_iter().filter(|g| !g.is_identity()).collect();
        let perms =
            gens.iter().map(|g| self.domain.perm_of(g).ok_or(Error::NotFaithfulDomain)).collect::<Result<Vec<_>>>()?;
        Ok(MatrixGroup {
            ambient: self.ambient.clone(),
            gens,
            domain: self.domain.clone(),
            perms,
            chain: OnceLock::new(),
        })
    }

    fn subgroup_from_perms(&self, perms: Vec<Perm>) -> Self {
        let n = self.ambient.rank();
        let perms: Vec<Perm> = perms.into_iter().filter(|p| !p.is_identity()).collect();
        let gens = perms.iter().map(|p| self.domain.matrix_of(p, n)).collect();
        MatrixGroup { ambient: self.ambient.clone(), gens, domain: self.domain.clone(), perms, chain: OnceLock::new() }
    }

    pub fn ambient(&self) -> &Arc<Lattice> {
        &self.ambient
    }

    pub fn gens(&self) -> &[SqMat] {
        &self.gens
    }

    pub fn domain(&self) -> &PermDomain {
        &self.domain
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    pub fn rank(&self) -> usize {
        self.ambient.rank()
    }

    pub fn chain(&self) -> &StabChain {
        self.chain.get_or_init(|| {
            let degree = self.domain.len();
            if degree <= DETERMINISTIC_DEGREE_LIMIT {
                StabChain::new(degree, &self.perms, &[])
            } else {
                StabChain::new_random(degree, &self.perms, &[], 0, RANDOM_PATIENCE)
            }
        })
    }

    /// Whether the order comes from a deterministic stabilizer chain.
    pub fn order_is_certified(&self) -> bool {
        self.domain.len() <= DETERMINISTIC_DEGREE_LIMIT
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    pub fn perm_of(&self, g: &SqMat) -> Option<Perm> {
        self.domain.perm_of(g)
    }

    pub fn matrix_of(&self, p: &Perm) -> SqMat {
        self.domain.matrix_of(p, self.rank())
    }

    pub fn contains(&self, g: &SqMat) -> bool {
        match self.domain.perm_of(g) {
            Some(p) => self.chain().contains(&p),
            None => false,
        }
    }

    pub fn random_element(&self, rng: &mut impl rand::Rng) -> SqMat {
        self.matrix_of(&self.chain().random_element(rng))
    }

    /// Saturated kernel of `[g₁ − I | g₂ − I | …]`.
    pub fn invariant_lattice(&self) -> EmbeddedLattice {
        invariant_lattice_of(&self.ambient, &self.gens)
    }

    pub fn coinvariant_lattice(&self) -> EmbeddedLattice {
        orthogonal_complement(&self.invariant_lattice())
    }

    pub fn fixed_data(&self) -> FixedData {
        let invariant = self.invariant_lattice();
        let coinvariant = orthogonal_complement(&invariant);
        FixedData { invariant, coinvariant }
    }

    /// Every element of `other` lies in `self`.
    pub fn contains_group(&self, other: &MatrixGroup) -> bool {
        other.gens.iter().all(|g| self.contains(g))
    }

    /// `g⁻¹·N·g = N` for every generator `g` of `self`.
    pub fn normalizes(&self, n: &MatrixGroup) -> bool {
        let chain = StabChain::new(self.domain.len(), &self.domain_perms_of(n), &[]);
        self.perms.iter().all(|g| {
            let gi = g.inverse();
            self.domain_perms_of(n).iter().all(|x| chain.contains(&gi.then(x).then(g)))
        })
    }

    fn domain_perms_of(&self, other: &MatrixGroup) -> Vec<Perm> {
        other.gens.iter().map(|g| self.domain.perm_of(g).expect("subgroup on a shared domain")).collect()
    }
}

pub fn invariant_lattice_of(ambient: &Arc<Lattice>, gens: &[SqMat]) -> EmbeddedLattice {
    let n = ambient.rank();
    let k = gens.len();
    let mut m = IntMatrix::zeros(n, n * k);
    for (t, g) in gens.iter().enumerate() {
        let d = g.sub_identity();
        for i in 0..n {
            for j in 0..n {
                m.set(i, t * n + j, Int::from(d.get(i, j)));
            }
        }
    }
    let ker = kernel_saturated(&m);
    EmbeddedLattice::new(ambient.clone(), &ker).expect("kernel rows are independent")
}

/// Invariant and coinvariant lattices of a group.
#[derive(Clone, Debug)]
pub struct FixedData {
    pub invariant: EmbeddedLattice,
    pub coinvariant: EmbeddedLattice,
}

const SPAN_PRIME: i64 = 2_147_483_647;

/// Rank of a small integer matrix modulo a large prime. Never exceeds the
/// rational rank.
pub(crate) fn rank_mod_p(m: &SqMat) -> usize {
    let n = m.dim();
    let mut span = ModSpan::new(n);
    for i in 0..n {
        span.insert(m.row(i));
    }
    span.rank()
}

/// Row echelon basis modulo a prime. Rows independent mod p are independent
/// over the rationals, so a full mod-p rank certifies a spanning set.
struct ModSpan {
    n: usize,
    rows: Vec<(usize, Vec<i64>)>,
}

impl ModSpan {
    fn new(n: usize) -> Self {
        ModSpan { n, rows: Vec::new() }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn insert(&mut self, v: &[i64]) -> bool {
        let p = SPAN_PRIME;
        let mut w: Vec<i64> = v.iter().map(|x| x.rem_euclid(p)).collect();
        for (pivot, r) in &self.rows {
            let c = w[*pivot];
            if c != 0 {
                for j in 0..self.n {
                    w[j] = (w[j] - (c as i128 * r[j] as i128 % p as i128) as i64).rem_euclid(p);
                }
            }
        }
        let Some(pivot) = w.iter().position(|&x| x != 0) else { return false };
        let inv = mod_pow(w[pivot], p - 2, p);
        for x in w.iter_mut() {
            *x = (*x as i128 * inv as i128 % p as i128) as i64;
        }
        self.rows.push((pivot, w));
        true
    }
}

fn mod_pow(b: i64, mut e: i64, p: i64) -> i64 {
    let mut r: i128 = 1;
    let mut b128 = b as i128 % p as i128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % p as i128;
        }
        b128 = b128 * b128 % p as i128;
        e >>= 1;
    }
    r as i64
}

fn two_part(mut n: u128) -> u128 {
    let mut p = 1;
    while n.is_multiple_of(2) && n > 0 {
        n /= 2;
        p *= 2;
    }
    p
}

/// `O²(G)`: the smallest normal subgroup with a 2-group quotient.
///
/// Odd parts of the generators and of seeded random elements generate a
/// subgroup `N ⊆ O²(G)`; its normal closure is taken and the quotient order
/// checked. Once `|G : N|` is a power of two, `N = O²(G)` exactly.
pub fn o2_subgroup(g: &MatrixGroup, seed: u64) -> Result<MatrixGroup> {
    let order = g.order();
    let degree = g.domain.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let odd_part = |p: &Perm| p.pow(two_part(p.order()));
    let mut ngens: Vec<Perm> = g.perms.iter().map(odd_part).filter(|p| !p.is_identity()).collect();
    for _round in 0..64 {
        // normal closure
        loop {
            let chain = StabChain::new(degree, &ngens, &[]);
            let mut added = false;
            'scan: for s in &g.perms {
                let si = s.inverse();
                for x in ngens.clone() {
                    let c = si.then(&x).then(s);
                    if !chain.contains(&c) {
                        ngens.push(c);
                        added = true;
                        break 'scan;
                    }
                }
            }
            if !added {
                break;
            }
        }
        let n_order = StabChain::new(degree, &ngens, &[]).order();
        let index = order / n_order;
        if index.is_power_of_two() {
            return Ok(g.subgroup_from_perms(ngens));
        }
        for _ in 0..8 {
            let r = odd_part(&g.chain().random_element(&mut rng));
            if !r.is_identity() {
                ngens.push(r);
            }
        }
    }
    Err(Error::budget("O² sampling rounds", 64))
}

/// All isometries of the ambient lattice fixing `s` pointwise.
///
/// Built as `O₀` of the orthogonal complement, extended by the identity on `s`
/// across the glue; each extension is checked to be integral and to fix `s`.
pub fn pointwise_stabilizer(ambient: &Arc<Lattice>, s: &EmbeddedLattice) -> Result<MatrixGroup> {
    let (gens, order) = pointwise_stabilizer_gens(ambient, s)?;
    let g = MatrixGroup::new(ambient.clone(), gens)?;
    if g.order_is_certified() && g.order() != order {
        return Err(Error::PreconditionViolated(format!(
            "stabilizer order {} disagrees with O0 order {}",
            g.order(),
            order
        )));
    }
    Ok(g)
}

pub(crate) fn pointwise_stabilizer_gens(ambient: &Arc<Lattice>, s: &EmbeddedLattice) -> Result<(Vec<SqMat>, u128)> {
    let n = ambient.rank();
    let k = orthogonal_complement(s);
    if k.rank() == 0 {
        return Ok((vec![], 1));
    }
    let split = o0_split(&k.lattice())?;
    let m = s.basis().vstack(k.basis()).to_rat();
    let m_inv = m.inverse().expect("S and its complement span");
    let r = s.rank();
    let mut gens = Vec::new();
    for kg in &split.kernel_gens {
        let mut block = RatMatrix::identity(n);
        for i in 0..k.rank() {
            for j in 0..k.rank() {
                block.set(r + i, r + j, Rat::from_integer(kg.get(i, j).into()));
            }
        }
        let t = m_inv.mul(&block).mul(&m);
        let t = t
            .to_int()
            .ok_or_else(|| Error::PreconditionViolated("extension is not integral; ambient not unimodular?".into()))?;
        let t = SqMat::from_int(&t).expect("small entries");
        for i in 0..s.rank() {
            let row: Vec<i64> = s.basis().row(i).iter().map(|x| i64::try_from(x).unwrap()).collect();
            if t.apply(&row) != row {
                return Err(Error::PreconditionViolated("extension moves S".into()));
            }
        }
        gens.push(t);
    }
    Ok((gens, split.kernel_order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{cartan_gram, RootType};

    pub(crate) fn reflection(gram: &RatMatrix, alpha: usize) -> SqMat {
        // x ↦ x − (x, α)·α for a norm-2 root α = e_alpha
        let n = gram.rows();
        let mut m = SqMat::identity(n).data().to_vec();
        for i in 0..n {
            let ip = gram.get(i, alpha).to_integer();
            m[i * n + alpha] -= i64::try_from(&ip).unwrap();
        }
        SqMat::new(n, m)
    }

    fn e8() -> Arc<Lattice> {
        Arc::new(Lattice::new(cartan_gram(RootType::E(8))).unwrap())
    }

    #[test]
    fn trivial_and_minus_one() {
        let l = e8();
        let t = MatrixGroup::trivial(l.clone());
        assert_eq!(t.order(), 1);
        assert_eq!(t.invariant_lattice().rank(), 8);
        assert_eq!(t.coinvariant_lattice().rank(), 0);
        let mut m = SqMat::identity(8).data().to_vec();
        m.iter_mut().for_each(|x| *x = -*x);
        let g = MatrixGroup::new(l, vec![SqMat::new(8, m)]).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.invariant_lattice().rank(), 0);
    }

    #[test]
    fn weyl_group_of_e8() {
        let l = e8();
        let gens: Vec<SqMat> = (0..8).map(|i| reflection(l.gram(), i)).collect();
        let w = MatrixGroup::new(l.clone(), gens).unwrap();
        assert_eq!(w.domain().len(), 240);
        assert_eq!(w.order(), 696729600);
        let o2 = o2_subgroup(&w, 0).unwrap();
        assert_eq!(o2.order(), 696729600 / 2);
        assert!(o2.gens().iter().all(|g| g.to_int().det() == Int::from(1)));
    }

    #[test]
    fn a2_parabolic() {
        let l = e8();
        // nodes 0 and 2 are joined
        let w = MatrixGroup::new(l.clone(), vec![reflection(l.gram(), 0), reflection(l.gram(), 2)]).unwrap();
        assert_eq!(w.order(), 6);
        let fd = w.fixed_data();
        assert_eq!(fd.invariant.rank(), 6);
        let co = fd.coinvariant.lattice();
        assert!(crate::isometry::is_isometric(&co, &Lattice::new(cartan_gram(RootType::A(2))).unwrap()).is_some());
        let st = pointwise_stabilizer(&l, &fd.invariant).unwrap();
        assert_eq!(st.order(), 6);
        let o2 = o2_subgroup(&w, 1).unwrap();
        assert_eq!(o2.order(), 3);
    }

    #[test]
    fn stabilizer_extremes() {
        let l = e8();
        let full = EmbeddedLattice::full(l.clone());
        assert_eq!(pointwise_stabilizer(&l, &full).unwrap().order(), 1);
        let zero = EmbeddedLattice::zero(l.clone());
        assert_eq!(pointwise_stabilizer(&l, &zero).unwrap().order(), 696729600);
    }
}
