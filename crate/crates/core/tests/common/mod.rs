#![allow(dead_code)]

//! Structural properties of random small even lattices and of sublattices of E8,
//! shared by the property suite and the acceptance run.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::Signed;
use proptest::prelude::*;
use proptest::test_runner::{TestCaseError, TestRunner};

use fixlat::classify::e8_lattice;
use fixlat::enumerate::short_vectors;
use fixlat::fqs::{anti_isometry, discriminant_form, milgram_signature};
use fixlat::isometry::is_isometric;
use fixlat::lattice::{orthogonal_complement, saturate, sublattice_index, EmbeddedLattice, Lattice};
use fixlat::linalg::{Int, IntMatrix, Rat, RatMatrix};

pub const CASES: u32 = 1000;

pub fn config() -> ProptestConfig {
    ProptestConfig { cases: CASES, max_global_rejects: 1_000_000, ..ProptestConfig::default() }
}

/// Symmetric, even diagonal in `[2, 10]`, off-diagonal entries bounded by half
/// the smaller diagonal entry; only positive-definite ones survive.
pub fn even_gram() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4)
        .prop_flat_map(|n| {
            let diag = prop::collection::vec((1i64..=5).prop_map(|d| 2 * d), n);
            let off = prop::collection::vec(-5i64..=5, n * (n - 1) / 2);
            (Just(n), diag, off)
        })
        .prop_map(|(n, diag, off)| {
            let mut g = vec![vec![0i64; n]; n];
            let mut k = 0;
            for i in 0..n {
                g[i][i] = diag[i];
                for j in 0..i {
                    let cap = diag[i].min(diag[j]) / 2;
                    let v = off[k].clamp(-cap, cap);
                    k += 1;
                    g[i][j] = v;
                    g[j][i] = v;
                }
            }
            g
        })
        .prop_filter("positive definite", |g| lattice(g).is_ok())
}

pub fn lattice(g: &[Vec<i64>]) -> fixlat::Result<Lattice> {
    let n = g.len();
    let flat: Vec<i64> = g.iter().flatten().copied().collect();
    Lattice::from_i64(n, &flat)
}

pub fn lattice_with_rows() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<Vec<i64>>)> {
    even_gram().prop_flat_map(|g| {
        let n = g.len();
        let rows = prop::collection::vec(prop::collection::vec(-2i64..=2, n), 1..=n);
        (Just(g), rows)
    })
}

pub fn e8_rows() -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-1i64..=1, 8), 1..=4)
        .prop_filter("nonzero", |rows| rows.iter().any(|r| r.iter().any(|&x| x != 0)))
}

pub fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n, 0..n, -2i64..=2, any::<bool>()), 0..8).prop_map(move |ops| {
        let mut u = IntMatrix::identity(n);
        for (i, j, k, flip) in ops {
            let mut e = IntMatrix::identity(n);
            if i != j {
                e.set(i, j, Int::from(k));
            } else if flip {
                e.set(i, i, Int::from(-1));
            }
            u = e.mul(&u);
        }
        u
    })
}

fn same_lattice(a: &EmbeddedLattice, b: &EmbeddedLattice) -> bool {
    a.rank() == b.rank() && a.contains_lattice(b) && b.contains_lattice(a)
}

/// Every vector in the box `|x_i|² ≤ bound · (G⁻¹)_ii`, which contains the ellipsoid.
fn box_oracle(g: &[Vec<i64>], bound: i64) -> BTreeSet<Vec<i64>> {
    let n = g.len();
    let gram = RatMatrix::from_i64(n, n, &g.iter().flatten().copied().collect::<Vec<_>>());
    let inv = gram.inverse().unwrap();
    let radius: Vec<i64> = (0..n)
        .map(|i| {
            let r2 = (inv.get(i, i) * Rat::from_integer(bound.into())).floor().to_integer();
            let mut r = 0i64;
            while Int::from((r + 1) * (r + 1)) <= r2 {
                r += 1;
            }
            r
        })
        .collect();
    let mut out = BTreeSet::new();
    let mut x = vec![0i64; n];
    fn rec(i: usize, x: &mut Vec<i64>, radius: &[i64], g: &[Vec<i64>], bound: i64, out: &mut BTreeSet<Vec<i64>>) {
        if i == x.len() {
            let norm: i64 = (0..x.len()).map(|a| (0..x.len()).map(|b| x[a] * g[a][b] * x[b]).sum::<i64>()).sum();
            if norm > 0 && norm <= bound {
                out.insert(x.clone());
            }
            return;
        }
        for v in -radius[i]..=radius[i] {
            x[i] = v;
            rec(i + 1, x, radius, g, bound, out);
        }
    }
    rec(0, &mut x, &radius, g, bound, &mut out);
    out
}

pub fn gram_and_unimodular() -> impl Strategy<Value = (Vec<Vec<i64>>, IntMatrix)> {
    even_gram().prop_flat_map(|g| {
        let n = g.len();
        (Just(g), unimodular(n))
    })
}

type Check = std::result::Result<(), TestCaseError>;

pub fn double_complement_is_saturation((g, rows): (Vec<Vec<i64>>, Vec<Vec<i64>>)) -> Check {
    let ambient = Arc::new(lattice(&g).unwrap());
    let n = g.len();
    let s = EmbeddedLattice::new(ambient, &IntMatrix::from_rows(&rows, n)).unwrap();
    let twice = orthogonal_complement(&orthogonal_complement(&s));
    prop_assert!(same_lattice(&twice, &saturate(&s)));
    prop_assert_eq!(orthogonal_complement(&s).rank() + s.rank(), n);
    Ok(())
}

pub fn complements_in_e8_have_equal_det_and_glue_index(rows: Vec<Vec<i64>>) -> Check {
    let e8 = e8_lattice();
    let k = saturate(&EmbeddedLattice::new(e8.clone(), &IntMatrix::from_rows(&rows, 8)).unwrap());
    let kp = orthogonal_complement(&k);
    let (dk, dkp) = (k.lattice().det(), kp.lattice().det());
    prop_assert_eq!(&dk, &dkp);
    let sum = EmbeddedLattice::new(e8.clone(), &k.basis().vstack(kp.basis())).unwrap();
    let index = sublattice_index(&sum, &EmbeddedLattice::full(e8)).unwrap();
    prop_assert_eq!(Rat::from_integer(&index * &index), dk * dkp);
    Ok(())
}

pub fn complement_discriminant_forms_are_anti_isometric(rows: Vec<Vec<i64>>) -> Check {
    let e8 = e8_lattice();
    let k = saturate(&EmbeddedLattice::new(e8, &IntMatrix::from_rows(&rows, 8)).unwrap());
    let kp = orthogonal_complement(&k);
    let a = discriminant_form(&k.lattice()).unwrap();
    let b = discriminant_form(&kp.lattice()).unwrap();
    let phi = anti_isometry(&a.space, &b.space);
    prop_assert!(phi.is_some());
    prop_assert!(phi.unwrap().is_isometry(&a.space, &b.space, -1));
    Ok(())
}

pub fn milgram_residue_is_rank_mod_8(g: Vec<Vec<i64>>) -> Check {
    let l = lattice(&g).unwrap();
    let d = discriminant_form(&l).unwrap();
    prop_assert_eq!(milgram_signature(&d.space) as usize, l.rank() % 8);
    Ok(())
}

pub fn short_vectors_match_box_search((g, bound): (Vec<Vec<i64>>, i64)) -> Check {
    let l = lattice(&g).unwrap();
    let found = short_vectors(&l, &Rat::from_integer(bound.into())).unwrap();
    let got: BTreeSet<Vec<i64>> = found.coords.iter().cloned().collect();
    prop_assert_eq!(got.len(), found.len());
    prop_assert_eq!(got, box_oracle(&g, bound));
    for w in found.norms.windows(2) {
        prop_assert!(w[0] <= w[1]);
    }
    Ok(())
}

pub fn isometries_verify_exactly((g, u): (Vec<Vec<i64>>, IntMatrix)) -> Check {
    let l1 = lattice(&g).unwrap();
    let g2 = u.to_rat().mul(l1.gram()).mul(&u.to_rat().transpose());
    let l2 = Lattice::new(g2.clone()).unwrap();
    let t = is_isometric(&l1, &l2);
    prop_assert!(t.is_some());
    let t = t.unwrap();
    prop_assert_eq!(&t.to_rat().mul(&g2).mul(&t.to_rat().transpose()), l1.gram());
    prop_assert!(t.det().abs() == Int::from(1));
    Ok(())
}

pub fn non_isometric_lattices_are_rejected(g: Vec<Vec<i64>>) -> Check {
    // scaling by 2 changes the determinant
    let l1 = lattice(&g).unwrap();
    let l2 = Lattice::new(l1.gram().scale(&Rat::from_integer(2.into()))).unwrap();
    prop_assert!(is_isometric(&l1, &l2).is_none());
    Ok(())
}

fn run<S: Strategy>(s: S, f: impl Fn(S::Value) -> Check) -> std::result::Result<(), String> {
    let config = ProptestConfig { failure_persistence: None, ..config() };
    TestRunner::new(config).run(&s, f).map_err(|e| e.to_string())
}

/// Every property with [`CASES`] cases each.
pub fn run_all() -> Vec<(&'static str, std::result::Result<(), String>)> {
    vec![
        ("double complement = saturation", run(lattice_with_rows(), double_complement_is_saturation)),
        (
            "det(K) = det(K⊥), index² = det product in E8",
            run(e8_rows(), complements_in_e8_have_equal_det_and_glue_index),
        ),
        (
            "complement discriminant forms anti-isometric",
            run(e8_rows(), complement_discriminant_forms_are_anti_isometric),
        ),
        ("Milgram residue = rank mod 8", run(even_gram(), milgram_residue_is_rank_mod_8)),
        ("short vectors = box search", run((even_gram(), 0i64..=16), short_vectors_match_box_search)),
        ("isometries verify exactly", run(gram_and_unimodular(), isometries_verify_exactly)),
        ("scaled lattices not isometric", run(even_gram(), non_isometric_lattices_are_rejected)),
    ]
}
