//! The binary Golay code, the Leech lattice and its monomial group, coordinate
//! frames and S-lattices.
//!
//! Vectors are given in √8-scaled coordinates `x ∈ ℤ²⁴` with norm `x·x / 8`;
//! the lattice itself only stores the integral Gram of a fixed basis.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backtrack::{automorphisms, AutSpace, Budget, SearchSpace};
use crate::enumerate::{CosetEnumerator, Enumerator, VectorList};
use crate::error::{Error, Result};
use crate::group::{o2_subgroup, MatrixGroup};
use crate::lattice::{EmbeddedLattice, Lattice};
use crate::linalg::{hnf, Int, IntMatrix, Rat, RatMatrix, SqMat};
use crate::perm::{Perm, StabChain};

/// Lexicographic-code generator matrix of the Golay code; bit `i` is coordinate `i`.
pub const GOLAY_BASIS: [u32; 12] = [
    0x0000ff, 0x000f0f, 0x003333, 0x005555, 0x009669, 0x030356, 0x050563, 0x09063a, 0x111178, 0x21121d, 0x41144e,
    0x811724,
];

pub const M24_ORDER: u128 = 244_823_040;
pub const CO0_ORDER: u128 = 8_315_553_613_086_720_000;

#[derive(Clone, Debug)]
pub struct BinaryCode {
    gens: Vec<u32>,
    words: Vec<u32>,
    set: HashSet<u32>,
}

impl BinaryCode {
    /// Code of length 24 spanned by the given bitmasks.
    pub fn from_generators(gens: &[u32]) -> Self {
        let mut words = vec![0u32];
        for &g in gens {
            if words.contains(&g) {
                continue;
            }
            let more: Vec<u32> = words.iter().map(|w| w ^ g).collect();
            words.extend(more);
        }
        words.sort_unstable();
        let set = words.iter().copied().collect();
        BinaryCode { gens: gens.to_vec(), words, set }
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn words(&self) -> &[u32] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: u32) -> bool {
        self.set.contains(&w)
    }

    pub fn weight_distribution(&self) -> BTreeMap<u32, usize> {
        let mut d = BTreeMap::new();
        for w in &self.words {
            *d.entry(w.count_ones()).or_insert(0) += 1;
        }
        d
    }

    pub fn minimum_weight(&self) -> u32 {
        self.words.iter().filter(|&&w| w != 0).map(|w| w.count_ones()).min().unwrap_or(0)
    }

    /// Every pair of generators has even overlap and the dimension is 12.
    pub fn is_self_dual(&self) -> bool {
        self.words.len() == 1 << 12 && self.gens.iter().all(|a| self.gens.iter().all(|b| (a & b).count_ones() % 2 == 0))
    }

    pub fn words_of_weight(&self, k: u32) -> Vec<u32> {
        self.words.iter().copied().filter(|w| w.count_ones() == k).collect()
    }

    fn maps_into_self(&self, p: &Perm) -> bool {
        self.gens.iter().all(|&g| self.contains(permute_word(g, p)))
    }
}

pub fn build_golay() -> BinaryCode {
    BinaryCode::from_generators(&GOLAY_BASIS)
}

/// Image of a coordinate set under a permutation of the 24 points.
pub fn permute_word(w: u32, p: &Perm) -> u32 {
    let mut out = 0;
    for i in 0..24 {
        if w >> i & 1 == 1 {
            out |= 1 << p.image(i);
        }
    }
    out
}

fn subsets(items: &[u32], k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(items: &[u32], k: usize, start: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

fn mask(points: &[u32]) -> u32 {
    points.iter().fold(0, |m, &p| m | 1 << p)
}

/// Code automorphisms as a search over point images. The minimum-weight words
/// form a Steiner system, so any 5 points lie in a unique block; a partial map
/// must carry the blocks through its anchor points consistently.
struct CodeSearch<'a> {
    code: &'a BinaryCode,
    block_of: HashMap<u32, u32>,
    base: Vec<u32>,
}

/// Base positions whose blocks are checked against each new point.
const ANCHORS: usize = 8;

impl<'a> CodeSearch<'a> {
    fn new(code: &'a BinaryCode) -> Result<Self> {
        let d = code.minimum_weight();
        let blocks = code.words_of_weight(d);
        let mut block_of = HashMap::new();
        for &b in &blocks {
            let pts: Vec<u32> = (0..24).filter(|i| b >> i & 1 == 1).collect();
            for s in subsets(&pts, 5) {
                if block_of.insert(mask(&s), b).is_some() {
                    return Err(Error::PreconditionViolated("minimum-weight words do not form a 5-design".into()));
                }
            }
        }
        if block_of.len() != 42504 {
            return Err(Error::PreconditionViolated(
                "minimum-weight words do not form a Steiner system S(5,8,24)".into(),
            ));
        }
        // anchors: a block's five points, then points off it
        let first = blocks[0];
        let mut base: Vec<u32> = (0..24).filter(|i| first >> i & 1 == 1).take(5).collect();
        base.extend((0..24).filter(|i| first >> i & 1 == 0).take(ANCHORS - 5));
        base.extend((0..24).filter(|i| !base.contains(i)).collect::<Vec<_>>());
        Ok(CodeSearch { code, block_of, base })
    }

    fn consistent(&self, images: &[u32], c: u32) -> bool {
        let k = images.len();
        let b = self.base[k];
        let anchors: Vec<u32> = (0..k.min(ANCHORS) as u32).collect();
        for q in subsets(&anchors, 4) {
            let src: Vec<u32> = q.iter().map(|&i| self.base[i as usize]).chain([b]).collect();
            let dst: Vec<u32> = q.iter().map(|&i| images[i as usize]).chain([c]).collect();
            let o = self.block_of[&mask(&src)];
            let o2 = self.block_of[&mask(&dst)];
            for j in 0..k {
                if (o >> self.base[j] & 1) != (o2 >> images[j] & 1) {
                    return false;
                }
            }
        }
        for p in subsets(&anchors, 5) {
            let o = self.block_of[&mask(&p.iter().map(|&i| self.base[i as usize]).collect::<Vec<_>>())];
            let o2 = self.block_of[&mask(&p.iter().map(|&i| images[i as usize]).collect::<Vec<_>>())];
            if (o >> b & 1) != (o2 >> c & 1) {
                return false;
            }
        }
        true
    }
}

impl SearchSpace for CodeSearch<'_> {
    type Elem = Perm;

    fn depth(&self) -> usize {
        24
    }

    fn candidates(&self, images: &[u32]) -> Vec<u32> {
        let used = mask(images);
        (0..24).filter(|&c| used >> c & 1 == 0 && self.consistent(images, c)).collect()
    }

    fn complete(&self, images: &[u32]) -> Option<Perm> {
        let mut im = vec![0u32; 24];
        for (k, &b) in self.base.iter().enumerate() {
            im[b as usize] = images[k];
        }
        let p = Perm::from_images(im);
        self.code.maps_into_self(&p).then_some(p)
    }
}

impl AutSpace for CodeSearch<'_> {
    fn degree(&self) -> usize {
        24
    }

    fn base_point(&self, level: usize) -> u32 {
        self.base[level]
    }

    fn perm(&self, e: &Perm) -> Perm {
        e.clone()
    }
}

#[derive(Clone, Debug)]
pub struct CodeAutomorphisms {
    pub gens: Vec<Perm>,
    pub order: u128,
}

/// Full automorphism group of a length-24 code whose minimum-weight words form
/// a Steiner system `S(5, 8, 24)`.
pub fn code_automorphisms(c: &BinaryCode) -> Result<CodeAutomorphisms> {
    let space = CodeSearch::new(c)?;
    let mut budget = Budget::new("code automorphism search nodes", 10_000_000);
    let r = automorphisms(&space, &mut budget)?;
    let order = r.order();
    Ok(CodeAutomorphisms { gens: r.perms, order })
}

/// The Leech lattice with its coordinate model and cached data.
#[derive(Debug)]
pub struct LeechModel {
    lattice: Arc<Lattice>,
    code: BinaryCode,
    /// basis rows in √8 coordinates
    basis: IntMatrix,
    basis_inv: RatMatrix,
    m24: CodeAutomorphisms,
    norm4: OnceLock<Arc<Vec<Vec<i64>>>>,
    monomial: OnceLock<MatrixGroup>,
    extra: OnceLock<SqMat>,
}

pub fn build_leech() -> Lattice {
    leech().lattice().as_ref().clone()
}

/// Process-wide Leech model.
pub fn leech() -> &'static LeechModel {
    static MODEL: OnceLock<LeechModel> = OnceLock::new();
    MODEL.get_or_init(|| LeechModel::new().expect("Leech construction"))
}

impl LeechModel {
    fn new() -> Result<Self> {
        let code = build_golay();
        // spanning set: 2·(code basis), 4eᵢ ± 4e₀, (−3, 1²³)
        let mut rows: Vec<Vec<i64>> = Vec::new();
        for &g in code.generators() {
            rows.push((0..24).map(|i| if g >> i & 1 == 1 { 2 } else { 0 }).collect());
        }
        for i in 1..24 {
            for s in [1, -1] {
                let mut r = vec![0; 24];
                r[0] = 4;
                r[i] = 4 * s;
                rows.push(r);
            }
        }
        let mut r = vec![1; 24];
        r[0] = -3;
        rows.push(r);
        let (h, _) = hnf(&IntMatrix::from_rows(&rows, 24));
        let basis = h.select_rows(&(0..24).collect::<Vec<_>>());
        let b = basis.to_rat();
        let gram = b.mul(&b.transpose()).scale(&Rat::new(Int::from(1), Int::from(8)));
        let lattice = Arc::new(Lattice::new(gram)?);
        let basis_inv = b.inverse().ok_or(Error::NotPositiveDefinite)?;
        let m24 = code_automorphisms(&code)?;
        Ok(LeechModel {
            lattice,
            code,
            basis,
            basis_inv,
            m24,
            norm4: OnceLock::new(),
            monomial: OnceLock::new(),
            extra: OnceLock::new(),
        })
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn code(&self) -> &BinaryCode {
        &self.code
    }

    pub fn code_automorphisms(&self) -> &CodeAutomorphisms {
        &self.m24
    }

    /// Basis rows in √8 coordinates.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    /// √8 coordinates of a vector given in basis coordinates.
    pub fn to_coordinates(&self, v: &[i64]) -> Vec<i64> {
        (0..24)
            .map(|j| v.iter().enumerate().map(|(i, c)| c * i64::try_from(self.basis.get(i, j)).unwrap()).sum())
            .collect()
    }

    /// Basis coordinates of a vector given in √8 coordinates, if it is in the lattice.
    pub fn from_coordinates(&self, x: &[i64]) -> Option<Vec<i64>> {
        let xr: Vec<Rat> = x.iter().map(|&c| Rat::from_integer(c.into())).collect();
        crate::linalg::rat_row_times(&xr, &self.basis_inv)
            .into_iter()
            .map(|c| c.is_integer().then(|| i64::try_from(c.to_integer()).ok()).flatten())
            .collect()
    }

    /// Lattice matrix of a coordinate map `x ↦ x·m` given with rational entries.
    pub fn matrix_from_coordinate_map(&self, m: &RatMatrix) -> Result<SqMat> {
        let t = self.basis.to_rat().mul(m).mul(&self.basis_inv);
        let t = t.to_int().ok_or(Error::NotGramPreserving)?;
        let t = SqMat::from_int(&t).ok_or(Error::NotGramPreserving)?;
        let tr = t.to_int().to_rat();
        if tr.mul(self.lattice.gram()).mul(&tr.transpose()) != *self.lattice.gram() {
            return Err(Error::NotGramPreserving);
        }
        Ok(t)
    }

    /// `ε_C`: negate the coordinates in a codeword.
    pub fn sign_change(&self, word: u32) -> Result<SqMat> {
        if !self.code.contains(word) {
            return Err(Error::NotCodeword);
        }
        let d: Vec<i64> = (0..24).map(|i| if word >> i & 1 == 1 { -1 } else { 1 }).collect();
        let mut m = RatMatrix::zeros(24, 24);
        for (i, &s) in d.iter().enumerate() {
            m.set(i, i, Rat::from_integer(s.into()));
        }
        self.matrix_from_coordinate_map(&m)
    }

    /// Coordinate permutation `eᵢ ↦ e_{p(i)}`; `p` must preserve the code.
    pub fn permutation(&self, p: &Perm) -> Result<SqMat> {
        if !self.code.maps_into_self(p) {
            return Err(Error::PreconditionViolated("permutation does not preserve the code".into()));
        }
        let mut m = RatMatrix::zeros(24, 24);
        for i in 0..24 {
            m.set(i, p.image(i as u32) as usize, Rat::from_integer(1.into()));
        }
        self.matrix_from_coordinate_map(&m)
    }

    /// The 48 vectors `±8eᵢ`, in basis coordinates.
    pub fn standard_frame(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        for i in 0..24 {
            for s in [8, -8] {
                let mut x = vec![0; 24];
                x[i] = s;
                out.push(self.from_coordinates(&x).expect("frame vectors lie in the lattice"));
            }
        }
        out
    }

    /// All 196560 norm-4 vectors in basis coordinates.
    pub fn norm4_vectors(&self) -> Arc<Vec<Vec<i64>>> {
        self.norm4
            .get_or_init(|| {
                let e = Enumerator::new(&self.lattice).expect("definite");
                Arc::new(e.short_vectors(&Rat::from_integer(4.into())).coords)
            })
            .clone()
    }

    /// Two elements generating the code automorphism group, found by seeded
    /// random sampling and certified by a stabilizer chain on 24 points.
    fn small_m24_generators(&self) -> Vec<Perm> {
        let full = StabChain::new(24, &self.m24.gens, &[]);
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        loop {
            let a = full.random_element(&mut rng);
            let b = full.random_element(&mut rng);
            if StabChain::new(24, &[a.clone(), b.clone()], &[]).order() == self.m24.order {
                return vec![a, b];
            }
        }
    }

    /// `2¹²:M₂₄`, generated by the code automorphisms and one octad sign change,
    /// acting on the standard frame.
    pub fn monomial_group(&self) -> &MatrixGroup {
        self.monomial.get_or_init(|| {
            let mut gens: Vec<SqMat> =
                self.small_m24_generators().iter().map(|p| self.permutation(p).expect("code automorphism")).collect();
            gens.push(self.sign_change(self.code.words_of_weight(8)[0]).expect("octad"));
            let frame = self.standard_frame();
            MatrixGroup::with_candidates(self.lattice.clone(), gens, Some(&frame)).expect("monomial group")
        })
    }

    /// A non-monomial isometry: `½(J − 2I)` on each tetrad of a sextet,
    /// followed by the first tetrad-sign pattern that keeps the lattice.
    pub fn extra_generator(&self) -> &SqMat {
        self.extra.get_or_init(|| {
            let tetrads = self.sextet();
            let half = Rat::new(Int::from(1), Int::from(2));
            for signs in 0..64u32 {
                let mut m = RatMatrix::zeros(24, 24);
                for (t, tet) in tetrads.iter().enumerate() {
                    let s = if signs >> t & 1 == 1 { -half.clone() } else { half.clone() };
                    for &i in tet {
                        for &j in tet {
                            let v = if i == j { -s.clone() } else { s.clone() };
                            m.set(i as usize, j as usize, v);
                        }
                    }
                }
                if let Ok(g) = self.matrix_from_coordinate_map(&m) {
                    if !self.monomial_group().contains(&g) && self.monomial_group().perm_of(&g).is_none() {
                        return g;
                    }
                }
            }
            panic!("no tetrad sign pattern gives a lattice isometry")
        })
    }

    /// Six 4-sets any two of which form an octad.
    fn sextet(&self) -> Vec<Vec<u32>> {
        let octad = self.code.words_of_weight(8)[0];
        let first: Vec<u32> = (0..24).filter(|i| octad >> i & 1 == 1).take(4).collect();
        let fm = mask(&first);
        let mut out = vec![first];
        for o in self.code.words_of_weight(8) {
            if o & fm == fm {
                out.push((0..24).filter(|i| (o & !fm) >> i & 1 == 1).collect());
            }
        }
        debug_assert_eq!(out.len(), 6);
        out
    }

    /// Generators of `Co₀`: the monomial generators and the extra generator.
    pub fn conway_generators(&self) -> Vec<SqMat> {
        let mut g = self.monomial_group().gens().to_vec();
        g.push(self.extra_generator().clone());
        g
    }

    /// `Co₀` on the norm-4 vectors. Its order comes from randomized
    /// Schreier–Sims, since the domain exceeds the deterministic limit.
    pub fn conway_group(&self) -> Result<MatrixGroup> {
        MatrixGroup::with_candidates(self.lattice.clone(), self.conway_generators(), Some(&self.norm4_vectors()))
    }
}

/// Curtis type `2^a 3^b` of an S-lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SLatticeType {
    pub a: usize,
    pub b: usize,
    pub rank: usize,
}

impl std::fmt::Display for SLatticeType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "2^{} 3^{} (rank {})", self.a, self.b, self.rank)
    }
}

/// How a fixed lattice sits in the Leech lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dichotomy {
    /// A class of norm 8 occurs; the 48 vectors of its frame.
    StabilizesFrame(Vec<Vec<i64>>),
    SLattice(SLatticeType),
    Neither,
}

/// Largest `S/2S` scan, in classes.
pub const CLASS_LIMIT: u64 = 1 << 16;

enum ClassOutcome {
    Short { norm: i64, w_in_s: bool },
    Frame(Vec<Vec<i64>>),
}

fn class_outcome(ce: &CosetEnumerator, s: &EmbeddedLattice, u: &[i64]) -> ClassOutcome {
    let reps: VectorList = ce.short_reps(u).vectors;
    let norm = reps.norms.first().map(|n| i64::try_from(n.to_integer()).unwrap()).unwrap_or(0);
    if norm == 8 {
        return ClassOutcome::Frame(reps.coords);
    }
    let v = &reps.coords[0];
    let w: Vec<Int> = u.iter().zip(v).map(|(a, b)| Int::from((a - b) / 2)).collect();
    ClassOutcome::Short { norm, w_in_s: s.contains(&w) }
}

/// Nonzero classes of `S/2S`, as ambient vectors, in Gray-code order.
fn classes(s: &EmbeddedLattice) -> Result<Vec<Vec<i64>>> {
    let r = s.rank();
    if r >= 64 || (1u64 << r) > CLASS_LIMIT {
        return Err(Error::budget("S/2S classes", CLASS_LIMIT as u128));
    }
    let rows: Vec<Vec<i64>> = (0..r).map(|i| s.basis().row_i64(i).expect("small basis entries")).collect();
    let n = s.ambient().rank();
    let mut cur = vec![0i64; n];
    let mut out = Vec::new();
    for k in 1..(1u64 << r) {
        let bit = k.trailing_zeros() as usize;
        let on = (k ^ (k >> 1)) >> bit & 1 == 1;
        for (c, b) in cur.iter_mut().zip(&rows[bit]) {
            *c += if on { *b } else { -*b };
        }
        out.push(cur.clone());
    }
    Ok(out)
}

/// Whether every `u ∈ S` has a short representative `v` of norm ≤ 6 with
/// `(u − v)/2 ∈ S`. One representative per class of `S/2S` suffices: adding
/// `2s` to `u` keeps `v` and moves `w` by `s`.
pub fn s_lattice_check(s: &EmbeddedLattice) -> Result<bool> {
    let ce = CosetEnumerator::new(s.ambient())?;
    for u in classes(s)? {
        match class_outcome(&ce, s, &u) {
            ClassOutcome::Short { w_in_s: true, .. } => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

pub fn s_lattice_type(s: &EmbeddedLattice) -> Result<SLatticeType> {
    let ce = CosetEnumerator::new(s.ambient())?;
    let (mut a, mut b) = (0, 0);
    for u in classes(s)? {
        match class_outcome(&ce, s, &u) {
            ClassOutcome::Short { norm: 4, w_in_s: true } => a += 1,
            ClassOutcome::Short { norm: 6, w_in_s: true } => b += 1,
            _ => return Err(Error::NotSLattice),
        }
    }
    Ok(SLatticeType { a, b, rank: s.rank() })
}

/// The frame-or-S-lattice case split for a fixed lattice `S` and the group
/// generators acting on it. Frames are checked for invariance under `gens`.
pub fn dichotomy(s: &EmbeddedLattice, gens: &[SqMat]) -> Result<Dichotomy> {
    let ce = CosetEnumerator::new(s.ambient())?;
    let (mut a, mut b) = (0, 0);
    let mut failed = false;
    for u in classes(s)? {
        match class_outcome(&ce, s, &u) {
            ClassOutcome::Frame(frame) => {
                let set: HashSet<&[i64]> = frame.iter().map(|v| v.as_slice()).collect();
                let stable = gens.iter().all(|g| frame.iter().all(|v| set.contains(g.apply(v).as_slice())));
                return Ok(if stable { Dichotomy::StabilizesFrame(frame) } else { Dichotomy::Neither });
            }
            ClassOutcome::Short { norm, w_in_s } => {
                failed |= !w_in_s;
                if norm == 4 {
                    a += 1;
                } else {
                    b += 1;
                }
            }
        }
    }
    if failed {
        return Ok(Dichotomy::Neither);
    }
    Ok(Dichotomy::SLattice(SLatticeType { a, b, rank: s.rank() }))
}

/// [`dichotomy`] for `Λ^G`, after checking `G = O²(G)`.
pub fn frame_or_slattice(g: &MatrixGroup) -> Result<Dichotomy> {
    let o2 = o2_subgroup(g, 0)?;
    if o2.order() != g.order() {
        return Err(Error::PreconditionViolated(format!(
            "G has order {} but O²(G) has order {}",
            g.order(),
            o2.order()
        )));
    }
    dichotomy(&g.invariant_lattice(), g.gens())
}

/// Rank of the fixed lattice of one matrix.
pub fn fixed_rank(g: &SqMat) -> usize {
    g.dim() - g.sub_identity().to_int().rank()
}

/// Seeded product-replacement walk over a generating set.
pub struct ElementSampler {
    state: Vec<SqMat>,
    acc: SqMat,
    rng: ChaCha8Rng,
}

impl ElementSampler {
    pub fn new(gens: &[SqMat], seed: u64) -> Self {
        let n = gens[0].dim();
        let mut state: Vec<SqMat> = gens.to_vec();
        while state.len() < 10 {
            state.push(gens[state.len() % gens.len()].clone());
        }
        let mut s = ElementSampler { state, acc: SqMat::identity(n), rng: ChaCha8Rng::seed_from_u64(seed) };
        for _ in 0..50 {
            s.next_element();
        }
        s
    }

    pub fn next_element(&mut self) -> SqMat {
        let k = self.state.len();
        let i = self.rng.gen_range(0..k);
        let mut j = self.rng.gen_range(0..k - 1);
        if j >= i {
            j += 1;
        }
        self.state[i] =
            if self.rng.gen_bool(0.5) { self.state[i].mul(&self.state[j]) } else { self.state[j].mul(&self.state[i]) };
        self.acc = self.acc.mul(&self.state[i]);
        self.acc.clone()
    }
}

/// Largest element order in `Co₀`, used as the order-search limit.
const MAX_ELEMENT_ORDER: u64 = 60;

/// Searches random `Co₀` words for an element of the given order whose fixed
/// lattice has the given rank; powers of sampled elements are tried too.
/// Deterministic in `seed`. `budget` counts sampled words.
pub fn find_element(order: u64, rank: usize, seed: u64, budget: u64) -> Result<SqMat> {
    let model = leech();
    if order == 1 {
        return if rank == 24 { Ok(SqMat::identity(24)) } else { Err(Error::budget("element search words", 0)) };
    }
    let mut sampler = ElementSampler::new(&model.conway_generators(), seed);
    for _ in 0..budget {
        let g = sampler.next_element();
        let Some(m) = g.order(MAX_ELEMENT_ORDER) else { continue };
        if m % order != 0 {
            continue;
        }
        let h = g.pow(m / order);
        // the mod-p rank bounds the fixed rank from above; confirm exactly
        if h.dim() - crate::group::rank_mod_p(&h.sub_identity()) < rank {
            continue;
        }
        if fixed_rank(&h) == rank {
            return Ok(h);
        }
    }
    Err(Error::budget("element search words", budget as u128))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golay_weights() {
        let c = build_golay();
        assert_eq!(c.len(), 4096);
        let d = c.weight_distribution();
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![(0, 1), (8, 759), (12, 2576), (16, 759), (24, 1)]);
        assert!(c.is_self_dual());
        assert_eq!(c.minimum_weight(), 8);
        assert!(c.contains((1 << 24) - 1));
    }

    #[test]
    fn m24() {
        let m = leech().code_automorphisms();
        assert_eq!(m.order, M24_ORDER);
        assert_eq!(crate::perm::orbit(0, &m.gens, 24).len(), 24);
        assert!(m.gens.iter().all(|p| leech().code().maps_into_self(p)));
        assert!(leech().code().maps_into_self(&Perm::identity(24)));
    }

    #[test]
    fn leech_invariants() {
        let l = leech().lattice();
        assert_eq!(l.rank(), 24);
        assert!(l.is_even());
        assert_eq!(l.det(), Rat::from_integer(1.into()));
        assert!(CosetEnumerator::new(l).is_ok());
    }

    #[test]
    fn monomial_group() {
        let m = leech();
        let g = m.monomial_group();
        assert_eq!(g.order(), 4096 * M24_ORDER);
        let frame = m.standard_frame();
        let set: HashSet<&[i64]> = frame.iter().map(|v| v.as_slice()).collect();
        for s in g.gens() {
            assert!(frame.iter().all(|v| set.contains(s.apply(v).as_slice())));
        }
        assert_eq!(m.sign_change(0b111), Err(Error::NotCodeword));
        // the extra generator is an isometry outside the monomial group
        assert!(!g.contains(m.extra_generator()));
    }

    #[test]
    fn octad_complement_involution() {
        let m = leech();
        let sixteen = m.code().words_of_weight(16)[0];
        let g = m.sign_change(sixteen).unwrap();
        assert_eq!(fixed_rank(&g), 8);
        let fixed = crate::group::invariant_lattice_of(m.lattice(), std::slice::from_ref(&g));
        assert_eq!(fixed.rank(), 8);
        let e8_2 =
            Lattice::new(crate::roots::cartan_gram(crate::roots::RootType::E(8)).scale(&Rat::from_integer(2.into())))
                .unwrap();
        assert!(crate::isometry::is_isometric(&fixed.lattice(), &e8_2).is_some());
    }

    #[test]
    fn slattice_small_cases() {
        let m = leech();
        let zero = EmbeddedLattice::zero(m.lattice().clone());
        assert!(s_lattice_check(&zero).unwrap());
        assert_eq!(s_lattice_type(&zero).unwrap(), SLatticeType { a: 0, b: 0, rank: 0 });
        // a single norm-4 vector spans an S-lattice of type 2^1 3^0
        let x: Vec<i64> = (0..24).map(|i| if i < 2 { 4 } else { 0 }).collect();
        let v = m.from_coordinates(&x).unwrap();
        let s = EmbeddedLattice::new(m.lattice().clone(), &IntMatrix::from_rows(&[v], 24)).unwrap();
        assert!(s_lattice_check(&s).unwrap());
        assert_eq!(s_lattice_type(&s).unwrap(), SLatticeType { a: 1, b: 0, rank: 1 });
        // a frame vector is a norm-8 class
        let x: Vec<i64> = (0..24).map(|i| if i == 0 { 8 } else { 0 }).collect();
        let v = m.from_coordinates(&x).unwrap();
        let s = EmbeddedLattice::new(m.lattice().clone(), &IntMatrix::from_rows(&[v], 24)).unwrap();
        assert!(!s_lattice_check(&s).unwrap());
        assert!(matches!(dichotomy(&s, &[]).unwrap(), Dichotomy::StabilizesFrame(f) if f.len() == 48));
    }
}
