//! Fixtures shared by the kernel benchmarks.

use fixlat::lattice::Lattice;
use fixlat::linalg::{IntMatrix, RatMatrix};

/// Gram matrix `B·Bᵗ + I` for a pseudo-random integer `B` with entries in `[-bound, bound]`.
pub fn random_gram(n: usize, bound: i64, seed: u64) -> RatMatrix {
    let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % (2 * bound as u64 + 1)) as i64 - bound
    };
    let data: Vec<i64> = (0..n * n).map(|_| next()).collect();
    let b = IntMatrix::from_i64(n, n, &data);
    b.mul(&b.transpose()).add(&IntMatrix::identity(n)).to_rat()
}

pub fn random_lattice(n: usize, bound: i64, seed: u64) -> Lattice {
    Lattice::new(random_gram(n, bound, seed)).expect("positive definite by construction")
}
