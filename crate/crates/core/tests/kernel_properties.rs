use std::collections::{BTreeSet, HashSet};

use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use fixlat::enumerate::minimum;
use fixlat::fqs::{anti_isometry, discriminant_form};
use fixlat::io::{lattice_json, parse_lattice};
use fixlat::lattice::Lattice;
use fixlat::linalg::{hnf, lll_reduce, snf, Int, IntMatrix, Rat, RatMatrix};
use fixlat::perm::{Perm, StabChain};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 1000, max_global_rejects: 1_000_000, ..ProptestConfig::default() }
}

fn int_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=5).prop_flat_map(|(r, c)| {
        prop::collection::vec(-12i64..=12, r * c).prop_map(move |d| IntMatrix::from_i64(r, c, &d))
    })
}

fn is_unimodular(u: &IntMatrix) -> bool {
    u.det().abs().is_one()
}

fn definite_gram() -> impl Strategy<Value = RatMatrix> {
    (1usize..=5).prop_flat_map(|n| prop::collection::vec(-6i64..=6, n * n).prop_map(move |d| (n, d))).prop_map(
        |(n, d)| {
            // B·Bᵗ plus the identity is positive definite
            let b = IntMatrix::from_i64(n, n, &d);
            b.mul(&b.transpose()).add(&IntMatrix::identity(n)).to_rat()
        },
    )
}

fn perms() -> impl Strategy<Value = (usize, Vec<Perm>)> {
    (2usize..=7).prop_flat_map(|n| {
        let one = Just((0..n as u32).collect::<Vec<u32>>()).prop_shuffle();
        (Just(n), prop::collection::vec(one.prop_map(Perm::from_images), 1..=3))
    })
}

/// The group generated by `gens`, by breadth-first closure.
fn closure(n: usize, gens: &[Perm]) -> HashSet<Perm> {
    let mut seen: HashSet<Perm> = HashSet::new();
    let mut todo = vec![Perm::identity(n)];
    seen.insert(Perm::identity(n));
    while let Some(p) = todo.pop() {
        for g in gens {
            let q = p.then(g);
            if seen.insert(q.clone()) {
                todo.push(q);
            }
        }
    }
    seen
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn hnf_is_a_unimodular_echelon_form(m in int_matrix()) {
        let (h, u) = hnf(&m);
        prop_assert!(is_unimodular(&u));
        prop_assert_eq!(&u.mul(&m), &h);
        let mut last_pivot: Option<usize> = None;
        let mut seen_zero = false;
        for i in 0..h.rows() {
            let pivot = (0..h.cols()).find(|&j| !h.get(i, j).is_zero());
            match pivot {
                None => seen_zero = true,
                Some(p) => {
                    prop_assert!(!seen_zero, "zero rows trail");
                    prop_assert!(last_pivot.is_none_or(|l| p > l));
                    prop_assert!(h.get(i, p).is_positive());
                    for k in 0..i {
                        prop_assert!(!h.get(k, p).is_negative() && h.get(k, p) < h.get(i, p));
                    }
                    last_pivot = Some(p);
                }
            }
        }
        prop_assert_eq!(h.rank(), m.rank());
    }

    #[test]
    fn snf_is_diagonal_with_dividing_factors(m in int_matrix()) {
        let (d, u, v) = snf(&m);
        prop_assert!(is_unimodular(&u) && is_unimodular(&v));
        prop_assert_eq!(&u.mul(&m).mul(&v), &d);
        let k = d.rows().min(d.cols());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if i != j {
                    prop_assert!(d.get(i, j).is_zero());
                }
            }
        }
        for i in 0..k {
            prop_assert!(!d.get(i, i).is_negative());
            if i + 1 < k && !d.get(i, i).is_zero() {
                prop_assert!((d.get(i + 1, i + 1) % d.get(i, i)).is_zero());
            }
            if d.get(i, i).is_zero() && i + 1 < k {
                prop_assert!(d.get(i + 1, i + 1).is_zero());
            }
        }
    }

    #[test]
    fn lll_preserves_the_lattice_and_bounds_the_first_vector(g in definite_gram()) {
        let (r, t) = lll_reduce(&g).unwrap();
        prop_assert!(is_unimodular(&t));
        prop_assert_eq!(&t.to_rat().mul(&g).mul(&t.to_rat().transpose()), &r);
        let n = g.rows() as i32;
        let l = Lattice::new(g).unwrap();
        let lambda = minimum(&l).unwrap();
        // (4 / (4δ − 1))^{n−1} with δ = 99/100
        let ratio = Rat::new(Int::from(400), Int::from(296));
        let mut factor = Rat::one();
        for _ in 1..n {
            factor *= &ratio;
        }
        prop_assert!(r.get(0, 0) <= &(factor * lambda));
    }

    #[test]
    fn stabilizer_chain_order_and_membership((n, gens) in perms(), probe in any::<u64>()) {
        let chain = StabChain::new(n, &gens, &[]);
        let group = closure(n, &gens);
        prop_assert_eq!(chain.order(), group.len() as u128);
        for p in &group {
            prop_assert!(chain.contains(p));
        }
        // a pseudo-random permutation is a member exactly when the closure has it
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut s = probe;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            images.swap(i, (s >> 33) as usize % (i + 1));
        }
        let q = Perm::from_images(images);
        prop_assert_eq!(chain.contains(&q), group.contains(&q));
    }

    #[test]
    fn lattice_files_round_trip(g in definite_gram(), den in 1i64..=7) {
        let scaled = g.scale(&Rat::new(Int::one(), Int::from(den)));
        let l = Lattice::new(scaled).unwrap();
        let again = parse_lattice(&lattice_json(&l)).unwrap();
        prop_assert_eq!(again.gram(), l.gram());
        prop_assert_eq!(lattice_json(&again), lattice_json(&l));
    }

    #[test]
    fn discriminant_order_is_det_and_negation_is_anti_isometric(g in definite_gram()) {
        let even = g.scale(&Rat::from_integer(2.into()));
        let l = Lattice::new(even).unwrap();
        let d = discriminant_form(&l).unwrap();
        prop_assert_eq!(Int::from(d.space.order()), l.det().to_integer());
        if d.space.order() <= 4096 {
            prop_assert!(anti_isometry(&d.space, &d.space.negated()).is_some());
        }
        let orders: BTreeSet<u64> = d.space.orders().iter().copied().collect();
        prop_assert!(orders.iter().all(|&o| o >= 2));
    }
}
