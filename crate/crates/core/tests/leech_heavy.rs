use fixlat::group::{invariant_lattice_of, MatrixGroup};
use fixlat::leech::{dichotomy, find_element, fixed_rank, leech, s_lattice_type, Dichotomy, SLatticeType, CO0_ORDER};
use std::time::Instant;

#[test]
fn kissing_number() {
    let t = Instant::now();
    assert_eq!(leech().norm4_vectors().len(), 196560);
    eprintln!("norm4 in {:?}", t.elapsed());
}

#[test]
fn conway_group_order() {
    let t = Instant::now();
    let g = leech().conway_group().unwrap();
    eprintln!("domain {} in {:?}", g.domain().len(), t.elapsed());
    assert_eq!(g.order(), CO0_ORDER);
    eprintln!("order in {:?}", t.elapsed());
}

#[test]
fn order_three_witness() {
    let t = Instant::now();
    let g = find_element(3, 6, 0, 100_000).unwrap();
    eprintln!("found in {:?}", t.elapsed());
    assert_eq!(fixed_rank(&g), 6);
    let s = invariant_lattice_of(leech().lattice(), std::slice::from_ref(&g));
    assert_eq!(s_lattice_type(&s).unwrap(), SLatticeType { a: 27, b: 36, rank: 6 });
    let grp = MatrixGroup::new(leech().lattice().clone(), vec![g]).unwrap();
    assert!(matches!(dichotomy(&s, grp.gens()).unwrap(), Dichotomy::SLattice(_)));
    eprintln!("typed in {:?}", t.elapsed());
}
