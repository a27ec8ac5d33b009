//! Finite quadratic spaces and gluing.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::backtrack::{automorphisms, search_one, AutSpace, Budget, SearchSpace};
use crate::error::{Error, Result};
use crate::lattice::{EmbeddedLattice, Lattice};
use crate::linalg::{rat_row_times, row_lattice_basis, snf, Int, IntMatrix, Rat, RatMatrix, SqMat};
use crate::perm::Perm;

/// `⊕ ℤ/dᵢ` with a quadratic form with values in `ℚ/2ℤ`.
///
/// Values are kept as integers over the common denominator `N`: bilinear
/// values modulo `N`, quadratic values modulo `2N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuadraticSpace {
    orders: Vec<u64>,
    qgram: RatMatrix,
    den: i64,
    /// `N·b(gᵢ, gⱼ) mod N` off the diagonal, `N·q(gᵢ) mod 2N` on it
    num: Vec<i64>,
}

impl FiniteQuadraticSpace {
    pub fn new(orders: Vec<u64>, qgram: RatMatrix) -> Result<Self> {
        let k = orders.len();
        if qgram.rows() != k || qgram.cols() != k {
            return Err(Error::DimensionMismatch(format!("{} orders, {}x{} form", k, qgram.rows(), qgram.cols())));
        }
        if !qgram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        for (i, &d) in orders.iter().enumerate() {
            if d < 2 || (i + 1 < k && !orders[i + 1].is_multiple_of(d)) {
                return Err(Error::PreconditionViolated(format!(
                    "invariant factors {orders:?} must exceed 1 and divide each other"
                )));
            }
        }
        let den = qgram
            .denominator_lcm()
            .to_i64()
            .ok_or_else(|| Error::PreconditionViolated("denominator too large".into()))?;
        let mut num = vec![0i64; k * k];
        let mut normalized = RatMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                let v = (qgram.get(i, j) * Rat::from_integer(den.into())).to_integer();
                let m = Int::from(if i == j { 2 * den } else { den });
                num[i * k + j] = v.mod_floor(&m).to_i64().expect("reduced below the modulus");
                normalized.set(i, j, Rat::new(num[i * k + j].into(), den.into()));
            }
        }
        let space = FiniteQuadraticSpace { orders, qgram: normalized, den, num };
        for i in 0..k {
            let d = space.orders[i] as i128;
            // q(dᵢgᵢ) = 0 and dᵢ·b(gᵢ, ·) = 0
            if (d * d % (2 * den as i128) * space.num[i * k + i] as i128).rem_euclid(2 * den as i128) != 0 {
                return Err(Error::PreconditionViolated(format!("q(d·g{i}) is not 0")));
            }
            for j in 0..k {
                if (d * space.num[i * k + j] as i128).rem_euclid(den as i128) != 0 {
                    return Err(Error::PreconditionViolated(format!("d·b(g{i}, g{j}) is not 0")));
                }
            }
        }
        Ok(space)
    }

    pub fn trivial() -> Self {
        FiniteQuadraticSpace { orders: vec![], qgram: RatMatrix::zeros(0, 0), den: 1, num: vec![] }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn qgram(&self) -> &RatMatrix {
        &self.qgram
    }

    pub fn ngens(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self) -> u128 {
        self.orders.iter().map(|&d| d as u128).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    /// `N`: every value lies in `(1/N)ℤ`.
    pub fn denominator(&self) -> i64 {
        self.den
    }

    /// Element with mixed-radix index `idx`.
    pub fn element(&self, mut idx: u64) -> Vec<i64> {
        self.orders
            .iter()
            .map(|&d| {
                let c = idx % d;
                idx /= d;
                c as i64
            })
            .collect()
    }

    pub fn index_of(&self, a: &[i64]) -> u64 {
        let mut idx = 0u64;
        for (c, &d) in a.iter().zip(&self.orders).rev() {
            idx = idx * d + c.rem_euclid(d as i64) as u64;
        }
        idx
    }

    pub fn reduce(&self, a: &[i64]) -> Vec<i64> {
        a.iter().zip(&self.orders).map(|(c, &d)| c.rem_euclid(d as i64)).collect()
    }

    pub fn add(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        a.iter().zip(b).zip(&self.orders).map(|((x, y), &d)| (x + y).rem_euclid(d as i64)).collect()
    }

    pub fn scale(&self, n: i64, a: &[i64]) -> Vec<i64> {
        a.iter().zip(&self.orders).map(|(x, &d)| ((n as i128 * *x as i128).rem_euclid(d as i128)) as i64).collect()
    }

    /// Numerator of `q(a)` modulo `2N`.
    pub fn q_num(&self, a: &[i64]) -> i64 {
        let k = self.ngens();
        let m = 2 * self.den as i128;
        let mut s = 0i128;
        for i in 0..k {
            if a[i] == 0 {
                continue;
            }
            s += (a[i] as i128) * (a[i] as i128) * self.num[i * k + i] as i128;
            for j in i + 1..k {
                s += 2 * (a[i] as i128) * (a[j] as i128) * self.num[i * k + j] as i128;
            }
            s = s.rem_euclid(m);
        }
        s as i64
    }

    /// Numerator of `b(a, c)` modulo `N`.
    pub fn b_num(&self, a: &[i64], c: &[i64]) -> i64 {
        let k = self.ngens();
        let mut s = 0i128;
        for i in 0..k {
            if a[i] == 0 {
                continue;
            }
            for j in 0..k {
                s += (a[i] as i128) * (c[j] as i128) * self.num[i * k + j] as i128;
            }
        }
        s.rem_euclid(self.den as i128) as i64
    }

    pub fn q(&self, a: &[i64]) -> Rat {
        Rat::new(self.q_num(a).into(), self.den.into())
    }

    pub fn b(&self, a: &[i64], c: &[i64]) -> Rat {
        Rat::new(self.b_num(a, c).into(), self.den.into())
    }

    /// Additive order of `a`.
    pub fn element_order(&self, a: &[i64]) -> u64 {
        a.iter()
            .zip(&self.orders)
            .map(|(&c, &d)| d / num_integer::gcd(c.rem_euclid(d as i64) as u64, d))
            .fold(1, num_integer::lcm)
    }

    fn generator(&self, i: usize) -> Vec<i64> {
        let mut g = vec![0; self.ngens()];
        g[i] = 1;
        g
    }

    /// Every element, by index.
    pub fn elements(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.order() as u64).map(|i| self.element(i))
    }

    /// Same space with the form negated.
    pub fn negated(&self) -> Self {
        let qgram = self.qgram.scale(&Rat::from_integer((-1).into()));
        FiniteQuadraticSpace::new(self.orders.clone(), qgram).expect("negation preserves the invariants")
    }
}

/// A homomorphism given by generator images.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqsMap {
    /// row `i` is the image of generator `i`
    pub images: Vec<Vec<i64>>,
}

impl FqsMap {
    pub fn identity(a: &FiniteQuadraticSpace) -> Self {
        FqsMap { images: (0..a.ngens()).map(|i| a.generator(i)).collect() }
    }

    pub fn apply(&self, target: &FiniteQuadraticSpace, a: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; target.ngens()];
        for (c, img) in a.iter().zip(&self.images) {
            if *c != 0 {
                out = target.add(&out, &target.scale(*c, img));
            }
        }
        out
    }

    pub fn images_matrix(&self, cols: usize) -> IntMatrix {
        IntMatrix::from_rows(&self.images, cols)
    }

    /// Permutation of the elements of `a` (source and target both `a`).
    pub fn perm(&self, a: &FiniteQuadraticSpace) -> Perm {
        Perm::from_images(a.elements().map(|x| a.index_of(&self.apply(a, &x)) as u32).collect())
    }

    /// `self` then `other`; `target` is the codomain of `other`.
    pub fn then(&self, other: &FqsMap, target: &FiniteQuadraticSpace) -> FqsMap {
        FqsMap { images: self.images.iter().map(|x| other.apply(target, x)).collect() }
    }

    pub fn is_isometry(&self, a: &FiniteQuadraticSpace, b: &FiniteQuadraticSpace, sign: i64) -> bool {
        let k = a.ngens();
        let ok_orders = (0..k).all(|i| b.scale(a.orders[i] as i64, &self.images[i]).iter().all(|&c| c == 0));
        let bijective = {
            let mut seen = vec![false; b.order() as usize];
            a.order() == b.order()
                && a.elements().all(|x| !std::mem::replace(&mut seen[b.index_of(&self.apply(b, &x)) as usize], true))
        };
        ok_orders
            && bijective
            && a.elements().all(|x| {
                let lhs = b.q(&self.apply(b, &x));
                let rhs = a.q(&x) * Rat::from_integer(sign.into());
                ((lhs - rhs) / Rat::from_integer(2.into())).is_integer()
            })
    }
}

/// Discriminant form of an even lattice together with its presentation.
#[derive(Clone, Debug)]
pub struct DiscriminantForm {
    pub space: FiniteQuadraticSpace,
    /// rows: dual vectors (lattice coordinates) lifting the generators
    pub lift: RatMatrix,
    /// `G·V`: dual vector `x` has coordinates `x·G·V mod d`
    gv: RatMatrix,
    offset: usize,
}

impl DiscriminantForm {
    /// Coordinates of the class of a dual vector.
    pub fn coords(&self, x: &[Rat]) -> Vec<i64> {
        let y = rat_row_times(x, &self.gv);
        let c: Vec<i64> = y[self.offset..]
            .iter()
            .map(|v| {
                assert!(v.is_integer(), "not a dual vector");
                v.to_integer().to_i64().unwrap()
            })
            .collect();
        self.space.reduce(&c)
    }

    /// Induced action of a lattice automorphism (row convention `x ↦ x·g`).
    pub fn induced(&self, g: &SqMat) -> FqsMap {
        let gm = g.to_int().to_rat();
        let images = (0..self.space.ngens()).map(|i| self.coords(&rat_row_times(self.lift.row(i), &gm))).collect();
        FqsMap { images }
    }
}

pub fn discriminant_form(l: &Lattice) -> Result<DiscriminantForm> {
    if !l.is_even() {
        return Err(Error::NotEven);
    }
    let n = l.rank();
    if n == 0 {
        return Ok(DiscriminantForm {
            space: FiniteQuadraticSpace::trivial(),
            lift: RatMatrix::zeros(0, 0),
            gv: RatMatrix::zeros(0, 0),
            offset: 0,
        });
    }
    let g = l.int_gram()?;
    let (d, _u, v) = snf(&g);
    let offset = (0..n).take_while(|&i| d.get(i, i).is_one()).count();
    let orders: Vec<u64> = (offset..n).map(|i| d.get(i, i).to_u64().expect("invariant factor exceeds u64")).collect();
    let g_inv = l.gram().inverse().expect("definite");
    let v_rat = v.to_rat();
    let v_inv = v_rat.inverse().expect("unimodular");
    let lift_all = v_inv.mul(&g_inv);
    let idx: Vec<usize> = (offset..n).collect();
    let k = idx.len();
    let mut lift = RatMatrix::zeros(k, n);
    for (r, &i) in idx.iter().enumerate() {
        for j in 0..n {
            lift.set(r, j, lift_all.get(i, j).clone());
        }
    }
    let qgram = lift.mul(l.gram()).mul(&lift.transpose());
    let space = FiniteQuadraticSpace::new(orders, qgram)?;
    Ok(DiscriminantForm { space, lift, gv: g.to_rat().mul(&v_rat), offset })
}

/// Polynomials over ℤ, low degree first.
fn poly_trim(mut p: Vec<i128>) -> Vec<i128> {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

/// Remainder of `a` by the monic `m`.
fn poly_rem(a: &[i128], m: &[i128]) -> Vec<i128> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] -= lead * c;
        }
        r.pop();
    }
    poly_trim(r)
}

fn poly_div_exact(a: &[i128], m: &[i128]) -> Vec<i128> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    let mut q = vec![0i128; r.len().saturating_sub(dm)];
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        q[shift] = lead;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] -= lead * c;
        }
        r.pop();
    }
    debug_assert!(poly_trim(r).is_empty());
    q
}

fn cyclotomic(m: usize) -> Vec<i128> {
    let mut p = vec![0i128; m + 1];
    p[0] = -1;
    p[m] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            p = poly_div_exact(&p, &cyclotomic(d));
        }
    }
    p
}

/// Signature residue `σ` with `Σ exp(πi·q(a)) = √|A|·exp(2πiσ/8)`.
///
/// `σ mod 4` is decided exactly in `ℤ[ζ_M]` from the square of the Gauss sum,
/// which equals `|A|·iᵟ`. The remaining sign is decided numerically; the two
/// candidates are `2√|A|` apart while the rounding error is below `|A|·10⁻¹²`.
pub fn milgram_signature(a: &FiniteQuadraticSpace) -> u8 {
    if a.is_trivial() {
        return 0;
    }
    let two_n = 2 * a.den as usize;
    let m = num_integer::lcm(two_n, 8);
    let step = m / two_n;
    let mut counts = vec![0i128; m];
    let mut re = 0f64;
    let mut im = 0f64;
    for x in a.elements() {
        let t = a.q_num(&x) as usize;
        counts[t * step] += 1;
        let ang = PI * t as f64 / a.den as f64;
        re += ang.cos();
        im += ang.sin();
    }
    let mut sq = vec![0i128; m];
    for (i, &ci) in counts.iter().enumerate() {
        if ci == 0 {
            continue;
        }
        for (j, &cj) in counts.iter().enumerate() {
            sq[(i + j) % m] += ci * cj;
        }
    }
    let phi = cyclotomic(m);
    let size = a.order() as i128;
    let quarter = (0..4)
        .find(|&s| {
            let mut diff = sq.clone();
            diff[s * m / 4] -= size;
            poly_rem(&poly_trim(diff), &phi).is_empty()
        })
        .expect("Gauss sum square must be |A| times a fourth root of unity");
    let root = (size as f64).sqrt();
    let ang = 2.0 * PI * quarter as f64 / 8.0;
    let dist = |sign: f64| ((re - sign * root * ang.cos()).powi(2) + (im - sign * root * ang.sin()).powi(2)).sqrt();
    let (dp, dm) = (dist(1.0), dist(-1.0));
    assert!(dp.min(dm) < root / 4.0, "Gauss sum sign is not separated numerically");
    if dp < dm {
        quarter as u8
    } else {
        quarter as u8 + 4
    }
}

/// Maps `src → dst` multiplying the form by `sign` (+1 isometries, −1 anti-isometries).
pub(crate) struct FormMapSpace<'a> {
    src: &'a FiniteQuadraticSpace,
    dst: &'a FiniteQuadraticSpace,
    sign: i64,
    dst_elems: Vec<Vec<i64>>,
    dst_q: Vec<i64>,
    dst_ord: Vec<u64>,
}

impl<'a> FormMapSpace<'a> {
    pub(crate) fn new(src: &'a FiniteQuadraticSpace, dst: &'a FiniteQuadraticSpace, sign: i64) -> Self {
        let dst_elems: Vec<Vec<i64>> = dst.elements().collect();
        let dst_q = dst_elems.iter().map(|x| dst.q_num(x)).collect();
        let dst_ord = dst_elems.iter().map(|x| dst.element_order(x)).collect();
        FormMapSpace { src, dst, sign, dst_elems, dst_q, dst_ord }
    }

    /// Target value numerator over `dst`'s denominator, if representable.
    fn want(&self, v: i64, modulus_factor: i64) -> Option<i64> {
        // v / src.den · sign = w / dst.den  (mod modulus_factor)
        let w = v as i128 * self.dst.den as i128 * self.sign as i128;
        if w % self.src.den as i128 != 0 {
            return None;
        }
        Some((w / self.src.den as i128).rem_euclid(modulus_factor as i128 * self.dst.den as i128) as i64)
    }
}

impl SearchSpace for FormMapSpace<'_> {
    type Elem = FqsMap;

    fn depth(&self) -> usize {
        self.src.ngens()
    }

    fn candidates(&self, images: &[u32]) -> Vec<u32> {
        let l = images.len();
        let gl = self.src.generator(l);
        let Some(want_q) = self.want(self.src.q_num(&gl), 2) else { return vec![] };
        let Some(want_b) =
            (0..l).map(|j| self.want(self.src.b_num(&gl, &self.src.generator(j)), 1)).collect::<Option<Vec<i64>>>()
        else {
            return vec![];
        };
        let d = self.src.orders[l];
        (0..self.dst_elems.len())
            .filter(|&x| {
                self.dst_ord[x] == d
                    && self.dst_q[x] == want_q
                    && images
                        .iter()
                        .zip(&want_b)
                        .all(|(&y, &w)| self.dst.b_num(&self.dst_elems[x], &self.dst_elems[y as usize]) == w)
            })
            .map(|x| x as u32)
            .collect()
    }

    fn complete(&self, images: &[u32]) -> Option<FqsMap> {
        let map = FqsMap { images: images.iter().map(|&i| self.dst_elems[i as usize].clone()).collect() };
        // form-preserving maps are injective when the form is nondegenerate;
        // check anyway, the space may come from a file
        let mut seen = vec![false; self.dst_elems.len()];
        for x in self.src.elements() {
            let y = self.dst.index_of(&map.apply(self.dst, &x)) as usize;
            if std::mem::replace(&mut seen[y], true) {
                return None;
            }
        }
        Some(map)
    }
}

impl AutSpace for FormMapSpace<'_> {
    fn degree(&self) -> usize {
        self.dst_elems.len()
    }

    fn base_point(&self, level: usize) -> u32 {
        self.src.index_of(&self.src.generator(level)) as u32
    }

    fn perm(&self, e: &FqsMap) -> Perm {
        e.perm(self.src)
    }
}

/// `O(A)` with exact order.
#[derive(Clone, Debug)]
pub struct OrthogonalGroup {
    pub gens: Vec<FqsMap>,
    pub perms: Vec<Perm>,
    pub order: u128,
}

pub fn orthogonal_group_a(a: &FiniteQuadraticSpace, element_budget: u64) -> Result<OrthogonalGroup> {
    if a.order() > element_budget as u128 {
        return Err(Error::budget("discriminant group elements", element_budget as u128));
    }
    let space = FormMapSpace::new(a, a, 1);
    let mut budget = Budget::new("O(A) search nodes", 100_000_000);
    let r = automorphisms(&space, &mut budget)?;
    let order = r.order();
    Ok(OrthogonalGroup { gens: r.gens, perms: r.perms, order })
}

pub fn anti_isometry(a: &FiniteQuadraticSpace, b: &FiniteQuadraticSpace) -> Option<FqsMap> {
    if a.orders != b.orders {
        return None;
    }
    let space = FormMapSpace::new(a, b, -1);
    let mut budget = Budget::new("anti-isometry search nodes", 100_000_000);
    search_one(&space, &[], &mut budget).ok().flatten()
}

/// Graph `{(a, φ(a))}` of a glue map, by generators of the first summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlueClass {
    /// rows `(gᵢ, φ(gᵢ))` over `A_K ⊕ A_{K'}`
    pub generators: Vec<(Vec<i64>, Vec<i64>)>,
}

impl GlueClass {
    pub fn from_map(a: &FiniteQuadraticSpace, phi: &FqsMap) -> Self {
        GlueClass { generators: (0..a.ngens()).map(|i| (a.generator(i), phi.images[i].clone())).collect() }
    }
}

/// Even unimodular overlattice of `K ⊕ K'` obtained by adjoining the glue.
pub fn overlattice_from_glue(k: &Lattice, kp: &Lattice, c: &GlueClass) -> Result<Lattice> {
    let dk = discriminant_form(k)?;
    let dkp = discriminant_form(kp)?;
    let (n, m) = (k.rank(), kp.rank());
    let mut rows = RatMatrix::identity(n + m);
    for (a, b) in &c.generators {
        if a.len() != dk.space.ngens() || b.len() != dkp.space.ngens() {
            return Err(Error::InvalidGlue("generator length".into()));
        }
        let x = combine(&dk.lift, a, n);
        let y = combine(&dkp.lift, b, m);
        let mut row = x;
        row.extend(y);
        rows = rows.vstack(&RatMatrix::new(1, n + m, row));
    }
    let basis = row_lattice_basis(&rows);
    let gram = basis.mul(&k.gram().block_diag(kp.gram())).mul(&basis.transpose());
    let over = Lattice::new(gram)?;
    if !over.is_even() {
        return Err(Error::InvalidGlue("overlattice is not even".into()));
    }
    if over.det() != Rat::one() {
        return Err(Error::InvalidGlue(format!("overlattice has determinant {}", over.det())));
    }
    // K inside the overlattice: rows eᵢ·W⁻¹
    let w_inv = basis.inverse().expect("full rank");
    let mut k_rows = Vec::new();
    for i in 0..n {
        let r = w_inv.row(i).to_vec();
        if !r.iter().all(|v| v.is_integer()) {
            return Err(Error::InvalidGlue("K is not contained".into()));
        }
        k_rows.push(r.iter().map(|v| v.to_integer()).collect());
    }
    let emb = EmbeddedLattice::new(Arc::new(over.clone()), &IntMatrix::from_big_rows(k_rows, n + m))?;
    if !emb.is_primitive() {
        return Err(Error::InvalidGlue("K is not primitive".into()));
    }
    Ok(over)
}

fn combine(lift: &RatMatrix, coeffs: &[i64], n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n];
    for (i, &c) in coeffs.iter().enumerate() {
        for (o, v) in out.iter_mut().zip(lift.row(i)) {
            *o += v * Rat::from_integer(c.into());
        }
    }
    out
}

/// Orbits of `H₁ × H₂` on `O(A)` acting by `h ↦ x·h·y⁻¹`.
///
/// Elements are stored by their generator images. Returns one representative per orbit.
pub(crate) fn double_coset_reps(
    a: &FiniteQuadraticSpace,
    oa: &OrthogonalGroup,
    left: &[FqsMap],
    right: &[FqsMap],
    budget: u64,
) -> Result<Vec<FqsMap>> {
    if oa.order > budget as u128 {
        return Err(Error::budget("O(A) elements for double cosets", budget as u128));
    }
    // enumerate O(A) by closure
    let id = FqsMap::identity(a);
    let mut index: HashMap<Vec<Vec<i64>>, usize> = HashMap::new();
    let mut elems: Vec<FqsMap> = vec![id.clone()];
    index.insert(id.images.clone(), 0);
    let mut k = 0;
    while k < elems.len() {
        for g in &oa.gens {
            let e = elems[k].then(g, a);
            if !index.contains_key(&e.images) {
                index.insert(e.images.clone(), elems.len());
                elems.push(e);
            }
        }
        k += 1;
    }
    assert_eq!(elems.len() as u128, oa.order, "O(A) closure disagrees with the chain order");
    let right_inv: Vec<FqsMap> = right.iter().map(|y| inverse_map(a, y)).collect();
    let mut seen = vec![false; elems.len()];
    let mut reps = Vec::new();
    for start in 0..elems.len() {
        if seen[start] {
            continue;
        }
        reps.push(elems[start].clone());
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let h = &elems[i];
            let nbrs = left.iter().map(|x| x.then(h, a)).chain(right_inv.iter().map(|y| h.then(y, a)));
            for e in nbrs {
                let j = index[&e.images];
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    Ok(reps)
}

pub(crate) fn inverse_map(a: &FiniteQuadraticSpace, f: &FqsMap) -> FqsMap {
    let p = f.perm(a).inverse();
    FqsMap { images: (0..a.ngens()).map(|i| a.element(p.image(a.index_of(&a.generator(i)) as u32) as u64)).collect() }
}

/// Transport `b ∈ O(B)` to `O(A)` along `i: A → B`: `i ∘ b ∘ i⁻¹` in left-to-right order.
pub(crate) fn conjugate_into(
    a: &FiniteQuadraticSpace,
    b_space: &FiniteQuadraticSpace,
    i: &FqsMap,
    b: &FqsMap,
) -> FqsMap {
    // a ↦ i(a) ↦ b(i(a)) ↦ i⁻¹(...)
    let i_perm_inv: HashMap<u64, u64> =
        a.elements().map(|x| (b_space.index_of(&i.apply(b_space, &x)), a.index_of(&x))).collect();
    let images = (0..a.ngens())
        .map(|g| {
            let y = b.apply(b_space, &i.apply(b_space, &a.generator(g)));
            a.element(i_perm_inv[&b_space.index_of(&y)])
        })
        .collect();
    FqsMap { images }
}

/// Orbit-level data for extension classes.
#[derive(Clone, Debug)]
pub struct ExtensionData {
    pub classes: Vec<GlueClass>,
    pub oa_order: u128,
    pub obar_k_order: u128,
    /// not computed when `Ō(K)` alone is all of `O(A_K)`
    pub obar_kp_order: Option<u128>,
}

/// Glue classes for `K ⊕ K'`, one per double coset `Ō(K)\O(A_K)/i*Ō(K')`.
pub fn extension_classes(k: &Lattice, kp: &Lattice) -> Result<Vec<GlueClass>> {
    Ok(extension_data(k, kp)?.classes)
}

pub fn extension_data(k: &Lattice, kp: &Lattice) -> Result<ExtensionData> {
    let dk = discriminant_form(k)?;
    let dkp = discriminant_form(kp)?;
    let (a, b) = (&dk.space, &dkp.space);
    let i = anti_isometry(a, b).ok_or(Error::NoAntiIsometry)?;
    let oa = orthogonal_group_a(a, crate::limits::element_budget())?;
    let obar_k = crate::isometry::o0_split(k)?;
    let ok = obar_k.obar_order;
    // a surjective Ō(K) leaves a single double coset; skip the second group
    if ok == oa.order {
        let classes = vec![GlueClass::from_map(a, &FqsMap::identity(a).then(&i, b))];
        return Ok(ExtensionData { classes, oa_order: oa.order, obar_k_order: ok, obar_kp_order: None });
    }
    let obar_kp = crate::isometry::o0_split(kp)?;
    let okp = obar_kp.obar_order;
    let reps = if okp == oa.order {
        vec![FqsMap::identity(a)]
    } else {
        let left: Vec<FqsMap> = obar_k.full.gens.iter().map(|g| dk.induced(g)).collect();
        let right: Vec<FqsMap> = obar_kp.full.gens.iter().map(|g| conjugate_into(a, b, &i, &dkp.induced(g))).collect();
        double_coset_reps(a, &oa, &left, &right, crate::limits::double_coset_budget())?
    };
    let classes = reps.iter().map(|h| GlueClass::from_map(a, &h.then(&i, b))).collect();
    Ok(ExtensionData { classes, oa_order: oa.order, obar_k_order: ok, obar_kp_order: Some(okp) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn lat(n: usize, g: &[i64]) -> Lattice {
        Lattice::from_i64(n, g).unwrap()
    }

    pub(crate) fn a1() -> Lattice {
        lat(1, &[2])
    }

    pub(crate) fn a2() -> Lattice {
        lat(2, &[2, -1, -1, 2])
    }

    #[test]
    fn discriminant_examples() {
        let d = discriminant_form(&a1()).unwrap();
        assert_eq!(d.space.orders(), &[2]);
        assert_eq!(d.space.q(&[1]), rat(1, 2));
        let d = discriminant_form(&a2()).unwrap();
        assert_eq!(d.space.orders(), &[3]);
        assert_eq!(d.space.q(&[1]), rat(2, 3));
        assert_eq!(d.space.q(&[2]), rat(2, 3));
        assert!(discriminant_form(&Lattice::from_i64(1, &[1]).unwrap()).is_err());
    }

    #[test]
    fn milgram_examples() {
        assert_eq!(milgram_signature(&FiniteQuadraticSpace::trivial()), 0);
        assert_eq!(milgram_signature(&discriminant_form(&a1()).unwrap().space), 1);
        assert_eq!(milgram_signature(&discriminant_form(&a2()).unwrap().space), 2);
        // A1(3): ℤ/6 with q = 1/6·... rank 1
        let l = lat(1, &[6]);
        assert_eq!(milgram_signature(&discriminant_form(&l).unwrap().space), 1);
    }

    #[test]
    fn orthogonal_group_examples() {
        assert_eq!(orthogonal_group_a(&FiniteQuadraticSpace::trivial(), 10).unwrap().order, 1);
        assert_eq!(orthogonal_group_a(&discriminant_form(&a1()).unwrap().space, 10).unwrap().order, 1);
        assert_eq!(orthogonal_group_a(&discriminant_form(&a2()).unwrap().space, 10).unwrap().order, 2);
        let big = discriminant_form(&lat(1, &[40])).unwrap().space;
        assert!(matches!(orthogonal_group_a(&big, 10), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn anti_isometry_examples() {
        let t = FiniteQuadraticSpace::trivial();
        assert!(anti_isometry(&t, &t).is_some());
        // q = 1/2 and −1/2 = 3/2 differ mod 2
        let a = discriminant_form(&a1()).unwrap().space;
        assert!(anti_isometry(&a, &a).is_none());
        let a = discriminant_form(&a2()).unwrap().space;
        let e6 = Lattice::new(crate::roots::cartan_gram(crate::roots::RootType::E(6))).unwrap();
        let b = discriminant_form(&e6).unwrap().space;
        let i = anti_isometry(&b, &a).unwrap();
        assert!(i.is_isometry(&b, &a, -1));
    }

    fn is_e8(l: &Lattice) -> bool {
        l.rank() == 8 && l.is_even() && l.det() == rat(1, 1)
    }

    #[test]
    fn extension_examples() {
        use crate::roots::{cartan_gram, RootType};
        let lat_of = |t| Lattice::new(cartan_gram(t)).unwrap();
        let e8 = lat_of(RootType::E(8));
        let zero = Lattice::zero();
        let c = extension_classes(&e8, &zero).unwrap();
        assert_eq!(c.len(), 1);
        assert!(is_e8(&overlattice_from_glue(&e8, &zero, &c[0]).unwrap()));
        for (k, kp) in [(a1(), lat_of(RootType::E(7))), (lat_of(RootType::E(6)), a2())] {
            let c = extension_classes(&k, &kp).unwrap();
            assert_eq!(c.len(), 1);
            assert!(is_e8(&overlattice_from_glue(&k, &kp, &c[0]).unwrap()));
        }
        // A1 ⊕ A1 has no even unimodular overlattice
        assert_eq!(extension_classes(&a1(), &a1()).unwrap_err(), Error::NoAntiIsometry);
    }

    #[test]
    fn large_lifts_reduce_before_narrowing() {
        // dual lifts of this sublattice of E8 have entries far beyond i64 once scaled
        use crate::lattice::{saturate, EmbeddedLattice};
        let rows = [
            vec![1, 0, -1, 1, -1, 1, -1, 1],
            vec![-1, 1, 1, 0, -1, -1, 1, 0],
            vec![1, 1, -1, -1, 0, -1, 1, 0],
            vec![1, -1, -1, -1, -1, 0, -1, -1],
        ];
        let e8 = crate::classify::e8_lattice();
        let k = saturate(&EmbeddedLattice::new(e8, &IntMatrix::from_rows(&rows, 8)).unwrap());
        let kp = crate::lattice::orthogonal_complement(&k);
        let a = discriminant_form(&k.lattice()).unwrap();
        let b = discriminant_form(&kp.lattice()).unwrap();
        assert_eq!(a.space.order(), b.space.order());
        assert!(anti_isometry(&a.space, &b.space).is_some());
    }
}
