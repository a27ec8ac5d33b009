//! Orbit classification of fixed-point sublattices.
//!
//! Two drivers produce [`OrbitRecord`]s: the parabolic driver runs over all
//! subsets of simple roots of a root lattice, and the saturation loop grows
//! pointwise stabilizers by normalizing elements of order two modulo the group.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::enumerate::{minimum, short_vectors, vector_count_by_norm};
use crate::error::{Error, Result};
use crate::fqs::{extension_data, overlattice_from_glue};
use crate::group::{o2_subgroup, pointwise_stabilizer, FixedData, MatrixGroup};
use crate::isometry::is_isometric;
use crate::lattice::{EmbeddedLattice, Lattice};
use crate::linalg::{snf, Int, Rat, RatMatrix, SqMat};
use crate::roots::{classify_diagram, root_system_type, RootSystemType, RootType};

/// Vector counts are taken up to this norm for fingerprints.
pub const FINGERPRINT_NORM: i64 = 8;

/// `rank L − rank A_L`, the rank minus the number of invariant factors of the
/// discriminant group.
pub fn alpha(l: &Lattice) -> Result<usize> {
    if !l.is_even() {
        return Err(Error::NotEven);
    }
    if l.rank() == 0 {
        return Ok(0);
    }
    let (d, _, _) = snf(&l.int_gram()?);
    let nontrivial = (0..l.rank()).filter(|&i| *d.get(i, i) != Int::from(1) && *d.get(i, i) != Int::from(-1)).count();
    Ok(l.rank() - nontrivial)
}

/// A simply-laced Coxeter diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterDiagram {
    pub nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl CoxeterDiagram {
    pub fn of_type(t: RootType) -> Self {
        CoxeterDiagram { nodes: t.rank(), edges: t.edges() }
    }

    /// Nodes joined when the inner product is −1; any other nonzero value is rejected.
    pub fn from_gram(gram: &RatMatrix) -> Result<Self> {
        let n = gram.rows();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let v = gram.get(i, j);
                if *v == Rat::from_integer((-1).into()) {
                    edges.push((i, j));
                } else if *v != Rat::from_integer(0.into()) {
                    return Err(Error::PreconditionViolated(format!("simple roots {i}, {j} have inner product {v}")));
                }
            }
        }
        Ok(CoxeterDiagram { nodes: n, edges })
    }

    /// Root system type of the subdiagram induced on `subset`.
    pub fn induced_type(&self, subset: &[usize]) -> Option<RootSystemType> {
        let pos: BTreeMap<usize, usize> = subset.iter().enumerate().map(|(k, &v)| (v, k)).collect();
        let mut adj = vec![Vec::new(); subset.len()];
        for &(a, b) in &self.edges {
            if let (Some(&x), Some(&y)) = (pos.get(&a), pos.get(&b)) {
                adj[x].push(y);
                adj[y].push(x);
            }
        }
        classify_diagram(subset.len(), &adj)
    }
}

fn subset_of(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> i & 1 == 1).collect()
}

/// Isomorphism types of induced subdiagrams (the empty one included), each with
/// its first node subset in binary order.
pub fn subdiagram_types(d: &CoxeterDiagram) -> Vec<(RootSystemType, Vec<usize>)> {
    assert!(d.nodes < 32, "diagram too large for subset enumeration");
    let mut seen: BTreeMap<RootSystemType, Vec<usize>> = BTreeMap::new();
    for mask in 0..(1u64 << d.nodes) {
        let s = subset_of(mask, d.nodes);
        let t = d.induced_type(&s).expect("induced subdiagrams of a simply-laced diagram are ADE");
        seen.entry(t).or_insert(s);
    }
    seen.into_iter().collect()
}

/// Reflection in a norm-2 vector `r`: `x ↦ x − (x, r)·r`.
pub fn reflection(ambient: &Lattice, r: &[i64]) -> Result<SqMat> {
    let g = ambient.int_gram()?;
    let n = ambient.rank();
    let gr: Vec<i64> = (0..n).map(|i| (0..n).map(|j| i64::try_from(g.get(i, j)).unwrap() * r[j]).sum()).collect();
    let norm: i64 = gr.iter().zip(r).map(|(a, b)| a * b).sum();
    if norm != 2 {
        return Err(Error::PreconditionViolated(format!("reflection vector has norm {norm}")));
    }
    let mut m = SqMat::identity(n).data().to_vec();
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] -= gr[i] * r[j];
        }
    }
    Ok(SqMat::new(n, m))
}

/// One classified orbit `(G, L^G, L_G)`.
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    /// artifact-local number, after canonical sorting
    pub number: usize,
    /// simple-root subset that produced it, for parabolic records
    pub subset: Option<Vec<usize>>,
    pub stabilizer: MatrixGroup,
    pub invariant: EmbeddedLattice,
    pub coinvariant: EmbeddedLattice,
    pub invariant_gram: RatMatrix,
    pub coinvariant_gram: RatMatrix,
    pub rank: usize,
    pub group_order: u128,
    pub alpha: usize,
    pub det: Int,
    /// `None` when the glue computation ran out of budget
    pub extension_class_count: Option<usize>,
    pub coinvariant_root_type: Option<RootSystemType>,
    /// vector counts of norms 2, 4, … up to the fingerprint norm, invariant then coinvariant
    pub fingerprint: Vec<usize>,
}

impl OrbitRecord {
    fn sort_key(&self) -> (std::cmp::Reverse<usize>, u128, Vec<usize>) {
        (std::cmp::Reverse(self.rank), self.group_order, self.fingerprint.clone())
    }

    fn dedupe_key(&self) -> (usize, Int, Vec<usize>) {
        (self.rank, self.det.clone(), self.fingerprint.clone())
    }

    /// Same orbit class: isometric invariant and coinvariant lattices.
    pub fn pair_isometric(&self, other: &OrbitRecord) -> bool {
        self.dedupe_key() == other.dedupe_key()
            && is_isometric(&self.invariant.lattice(), &other.invariant.lattice()).is_some()
            && is_isometric(&self.coinvariant.lattice(), &other.coinvariant.lattice()).is_some()
    }
}

fn counts(l: &Lattice) -> Result<Vec<usize>> {
    let mut out = vec![0; FINGERPRINT_NORM as usize / 2];
    if l.rank() == 0 {
        return Ok(out);
    }
    for (nm, c) in vector_count_by_norm(l, &Rat::from_integer(FINGERPRINT_NORM.into()))? {
        if !nm.is_integer() {
            continue;
        }
        let k = i64::try_from(nm.to_integer()).unwrap();
        if k > 0 && k % 2 == 0 {
            out[(k / 2 - 1) as usize] += c;
        }
    }
    Ok(out)
}

fn coinvariant_root_type(co: &Lattice) -> Result<Option<RootSystemType>> {
    if co.rank() == 0 {
        return Ok(Some(RootSystemType::default()));
    }
    let roots = short_vectors(co, &Rat::from_integer(2.into()))?.coords;
    let gram = co.gram().clone();
    let inner = move |a: &[i64], b: &[i64]| -> Rat {
        let mut s = Rat::from_integer(0.into());
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if *x != 0 && *y != 0 {
                    s += gram.get(i, j) * Rat::from_integer((x * y).into());
                }
            }
        }
        s
    };
    Ok(root_system_type(&roots, inner))
}

fn require_even_unimodular(l: &Lattice) -> Result<()> {
    if l.is_even() && l.det() == Rat::from_integer(1.into()) {
        Ok(())
    } else {
        Err(Error::PreconditionViolated("ambient lattice must be even unimodular".into()))
    }
}

/// Builds a record from a group; the group is used as given (callers pass a
/// pointwise stabilizer).
pub fn make_record(stabilizer: MatrixGroup, subset: Option<Vec<usize>>) -> Result<OrbitRecord> {
    let FixedData { invariant, coinvariant } = stabilizer.fixed_data();
    let inv = invariant.lattice();
    let co = coinvariant.lattice();
    let mut fingerprint = counts(&inv)?;
    fingerprint.extend(counts(&co)?);
    let extension_class_count = match extension_data(&inv, &co) {
        Ok(d) => Some(d.classes.len()),
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(OrbitRecord {
        number: 0,
        subset,
        group_order: stabilizer.order(),
        stabilizer,
        invariant_gram: inv.gram().clone(),
        coinvariant_gram: co.gram().clone(),
        rank: inv.rank(),
        alpha: alpha(&inv)?,
        det: inv.det().to_integer(),
        extension_class_count,
        coinvariant_root_type: coinvariant_root_type(&co)?,
        fingerprint,
        invariant,
        coinvariant,
    })
}

/// Sorts canonically and keeps the first record of each pair-isometry class.
fn dedupe(mut records: Vec<OrbitRecord>) -> Vec<OrbitRecord> {
    records.sort_by_key(|a| a.sort_key());
    let mut out: Vec<OrbitRecord> = Vec::new();
    for r in records {
        if !out.iter().any(|o| o.pair_isometric(&r)) {
            out.push(r);
        }
    }
    for (i, r) in out.iter_mut().enumerate() {
        r.number = i + 1;
    }
    out
}

/// Per-record results of the parabolic cross-checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordChecks {
    /// the stabilizer computed from `O₀` of the coinvariant lattice has the
    /// parabolic order and the same fixed lattice
    pub stabilizer_matches: bool,
    /// the stabilizer is generated by the reflections it contains
    pub generated_by_reflections: bool,
    /// roots of the coinvariant lattice span it and their Weyl group has the stabilizer's order
    pub full_rank_roots: bool,
    pub unique_glue: bool,
}

impl RecordChecks {
    pub fn all(&self) -> bool {
        self.stabilizer_matches && self.generated_by_reflections && self.full_rank_roots && self.unique_glue
    }
}

#[derive(Clone, Debug)]
pub struct ParabolicClassification {
    pub records: Vec<OrbitRecord>,
    pub checks: Vec<RecordChecks>,
    /// induced subdiagram types of the Coxeter diagram
    pub subdiagram_types: Vec<RootSystemType>,
    /// coinvariant root types of the records, in the same sorted order, match the subdiagram types
    pub bijection: bool,
}

impl ParabolicClassification {
    pub fn all_checks_pass(&self) -> bool {
        self.bijection && self.checks.iter().all(|c| c.all())
    }

    /// Name of the first failing cross-check.
    pub fn first_failure(&self) -> Option<String> {
        if !self.bijection {
            return Some("records do not biject with induced subdiagram types".into());
        }
        for (r, c) in self.records.iter().zip(&self.checks) {
            let what = if !c.stabilizer_matches {
                "pointwise stabilizer differs from the parabolic subgroup"
            } else if !c.generated_by_reflections {
                "stabilizer is not generated by its reflections"
            } else if !c.full_rank_roots {
                "coinvariant roots do not have full rank or the Weyl order differs"
            } else if !c.unique_glue {
                "extension classes are not unique"
            } else {
                continue;
            };
            return Some(format!("record {}: {what}", r.number));
        }
        None
    }
}

// fixed rank, fixed det, short-vector counts of both halves
type PairKey = (usize, Int, Vec<usize>);

/// Parabolic driver: every subset of the simple roots gives a reflection
/// subgroup; its pointwise stabilizer and fixed/coinvariant pair are recorded,
/// and pair-isometric records are merged.
pub fn classify_parabolics(ambient: &Arc<Lattice>, simple_roots: &[Vec<i64>]) -> Result<ParabolicClassification> {
    require_even_unimodular(ambient)?;
    let n = simple_roots.len();
    if n >= 24 {
        return Err(Error::PreconditionViolated("too many simple roots for subset enumeration".into()));
    }
    let roots = short_vectors(ambient, &Rat::from_integer(2.into()))?.coords;
    let reflections: Vec<SqMat> = simple_roots.iter().map(|r| reflection(ambient, r)).collect::<Result<_>>()?;
    let parabolic = |mask: u64| -> Result<MatrixGroup> {
        let gens = subset_of(mask, n).iter().map(|&i| reflections[i].clone()).collect();
        MatrixGroup::with_candidates(ambient.clone(), gens, Some(&roots))
    };
    // cheap invariants for every subset, in parallel with a deterministic merge
    let keyed: Vec<(u64, PairKey)> = (0..(1u64 << n))
        .into_par_iter()
        .map(|mask| -> Result<_> {
            let w = parabolic(mask)?;
            let fd = w.fixed_data();
            let inv = fd.invariant.lattice();
            let mut fp = counts(&inv)?;
            fp.extend(counts(&fd.coinvariant.lattice())?);
            Ok((mask, (inv.rank(), inv.det().to_integer(), fp)))
        })
        .collect::<Result<_>>()?;
    // one representative subset per pair-isometry class
    let mut reps: Vec<(u64, EmbeddedLattice, EmbeddedLattice, PairKey)> = Vec::new();
    for (mask, key) in keyed {
        let w = parabolic(mask)?;
        let fd = w.fixed_data();
        let dup = reps.iter().any(|(_, inv, co, k)| {
            *k == key
                && is_isometric(&inv.lattice(), &fd.invariant.lattice()).is_some()
                && is_isometric(&co.lattice(), &fd.coinvariant.lattice()).is_some()
        });
        if !dup {
            reps.push((mask, fd.invariant, fd.coinvariant, key));
        }
    }
    let diagram = {
        let g: Vec<Vec<i64>> = simple_roots.to_vec();
        let int_gram = ambient.int_gram()?;
        let mut gram = RatMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = 0i64;
                for a in 0..ambient.rank() {
                    for b in 0..ambient.rank() {
                        s += g[i][a] * i64::try_from(int_gram.get(a, b)).unwrap() * g[j][b];
                    }
                }
                gram.set(i, j, Rat::from_integer(s.into()));
            }
        }
        CoxeterDiagram::from_gram(&gram)?
    };
    let built: Vec<(OrbitRecord, RecordChecks)> = reps
        .par_iter()
        .map(|(mask, _, _, _)| -> Result<_> {
            let w = parabolic(*mask)?;
            let subset = subset_of(*mask, n);
            let stab = pointwise_stabilizer(ambient, &w.invariant_lattice())?;
            let stabilizer_matches = stab.order() == w.order()
                && stab.invariant_lattice() == w.invariant_lattice()
                && w.contains_group(&stab)
                && stab.contains_group(&w);
            let record = make_record(stab, Some(subset))?;
            let checks = RecordChecks {
                stabilizer_matches,
                generated_by_reflections: generated_by_reflections(&record, &roots)?,
                full_rank_roots: full_rank_roots(&record)?,
                unique_glue: verify_orbit_determination(&record).unwrap_or(false),
            };
            Ok((record, checks))
        })
        .collect::<Result<_>>()?;
    let mut pairs = built;
    pairs.sort_by_key(|a| a.0.sort_key());
    let (mut records, checks): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    for (i, r) in records.iter_mut().enumerate() {
        r.number = i + 1;
    }
    let types: Vec<RootSystemType> = subdiagram_types(&diagram).into_iter().map(|(t, _)| t).collect();
    let mut found: Vec<Option<RootSystemType>> = records.iter().map(|r| r.coinvariant_root_type.clone()).collect();
    found.sort();
    let bijection = found.len() == types.len() && found.iter().zip(&types).all(|(a, b)| a.as_ref() == Some(b));
    Ok(ParabolicClassification { records, checks, subdiagram_types: types, bijection })
}

/// The E8 root lattice with its simple roots as the standard basis.
pub fn e8_lattice() -> Arc<Lattice> {
    Arc::new(Lattice::new(crate::roots::cartan_gram(RootType::E(8))).expect("E8 Cartan matrix is definite"))
}

pub fn classify_e8() -> Result<ParabolicClassification> {
    let l = e8_lattice();
    let simple: Vec<Vec<i64>> = (0..8)
        .map(|i| {
            let mut e = vec![0; 8];
            e[i] = 1;
            e
        })
        .collect();
    classify_parabolics(&l, &simple)
}

fn inner_i64(ambient: &Lattice, a: &[i64], b: &[i64]) -> i64 {
    let g = ambient.int_gram().expect("integral");
    let n = ambient.rank();
    let mut s = 0;
    for i in 0..n {
        if a[i] == 0 {
            continue;
        }
        for j in 0..n {
            s += a[i] * i64::try_from(g.get(i, j)).unwrap() * b[j];
        }
    }
    s
}

/// Ambient roots orthogonal to the invariant lattice give reflections in the
/// stabilizer; they must generate it.
fn generated_by_reflections(r: &OrbitRecord, roots: &[Vec<i64>]) -> Result<bool> {
    let ambient = r.stabilizer.ambient();
    let inv: Vec<Vec<i64>> = (0..r.invariant.rank()).map(|i| r.invariant.basis().row_i64(i).unwrap()).collect();
    let mut gens = Vec::new();
    for root in roots {
        // one reflection per ± pair
        if root.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
            continue;
        }
        if inv.iter().all(|b| inner_i64(ambient, root, b) == 0) {
            gens.push(reflection(ambient, root)?);
        }
    }
    let w = r.stabilizer.subgroup(gens)?;
    Ok(w.order() == r.group_order && r.stabilizer.contains_group(&w))
}

fn full_rank_roots(r: &OrbitRecord) -> Result<bool> {
    let co = r.coinvariant.lattice();
    if co.rank() == 0 {
        return Ok(r.group_order == 1);
    }
    let roots = short_vectors(&co, &Rat::from_integer(2.into()))?.coords;
    let span = crate::linalg::IntMatrix::from_rows(&roots, co.rank()).rank();
    let weyl = r.coinvariant_root_type.as_ref().map(|t| t.weyl_order());
    Ok(span == co.rank() && weyl == Some(r.group_order))
}

/// Exactly one extension class of the invariant ⊕ coinvariant pair, and its
/// glued lattice has the ambient minimum.
pub fn verify_orbit_determination(r: &OrbitRecord) -> Result<bool> {
    let inv = r.invariant.lattice();
    let co = r.coinvariant.lattice();
    let data = extension_data(&inv, &co)?;
    if data.classes.len() != 1 {
        return Ok(false);
    }
    let ambient = r.stabilizer.ambient();
    if ambient.rank() == 0 {
        return Ok(true);
    }
    let glued = overlattice_from_glue(&inv, &co, &data.classes[0])?;
    Ok(minimum(&glued)? == minimum(ambient)?)
}

/// Outcome of the saturation loop.
#[derive(Clone, Debug)]
pub struct Saturation {
    pub records: Vec<OrbitRecord>,
    /// candidates that did not normalize the group they were tried on, or whose square fell outside it
    pub skipped: usize,
    /// 2-extension steps taken
    pub extensions: usize,
}

/// The normalizer condition `g⁻¹·H·g = H` on generators.
fn normalizes(h: &MatrixGroup, g: &SqMat) -> bool {
    let gi = inverse_isometry(g);
    h.gens().iter().all(|x| h.contains(&gi.mul(x).mul(g)))
}

/// Inverse of a finite-order integer matrix, as a power of it.
fn inverse_isometry(g: &SqMat) -> SqMat {
    match g.order(10_000) {
        Some(k) => g.pow(k - 1),
        None => {
            let inv = g.to_int().to_rat().inverse().expect("invertible").to_int().expect("unimodular");
            SqMat::from_int(&inv).expect("small entries")
        }
    }
}

/// `O²(G) ⊴ K ⊴ G` with `K` the pointwise stabilizer of `Λ^{O²(G)}`, for `G`
/// equal to its own pointwise stabilizer.
pub fn check_o2_chain(g: &MatrixGroup) -> Result<bool> {
    let o2 = o2_subgroup(g, 0)?;
    let k = pointwise_stabilizer(g.ambient(), &o2.invariant_lattice())?;
    let k = g.subgroup(k.gens().to_vec())?;
    let normal_in = |small: &MatrixGroup, big: &MatrixGroup| {
        big.contains_group(small) && big.gens().iter().all(|x| normalizes(small, x))
    };
    Ok(normal_in(&o2, &k) && normal_in(&k, g))
}

/// Steps 1 to 4: replace the seed by its pointwise stabilizer, then extend by
/// candidates `g` normalizing the group with `g²` inside it, re-stabilize and
/// repeat until no new pair class appears.
pub fn saturate_and_extend(seed: &MatrixGroup, candidates: &[SqMat]) -> Result<Saturation> {
    let ambient = seed.ambient().clone();
    require_even_unimodular(&ambient)?;
    let start = pointwise_stabilizer(&ambient, &seed.invariant_lattice())?;
    let mut records = vec![make_record(start, None)?];
    let mut queue = vec![0usize];
    let (mut skipped, mut extensions) = (0, 0);
    while let Some(idx) = queue.pop() {
        let h = records[idx].stabilizer.clone();
        for g in candidates {
            if h.contains(g) {
                continue;
            }
            if !normalizes(&h, g) || !h.contains(&g.mul(g)) {
                skipped += 1;
                continue;
            }
            let mut gens = h.gens().to_vec();
            gens.push(g.clone());
            let ext = MatrixGroup::new(ambient.clone(), gens)?;
            if ext.order() > 2 * h.order() {
                return Err(Error::PreconditionViolated("2-extension has index above 2".into()));
            }
            extensions += 1;
            let tilde = pointwise_stabilizer(&ambient, &ext.invariant_lattice())?;
            if !check_o2_chain(&tilde)? {
                return Err(Error::PreconditionViolated("O² chain is not normal".into()));
            }
            let rec = make_record(tilde, None)?;
            if !records.iter().any(|r| r.pair_isometric(&rec)) {
                records.push(rec);
                queue.push(records.len() - 1);
            }
        }
    }
    let records = dedupe(records);
    Ok(Saturation { records, skipped, extensions })
}
