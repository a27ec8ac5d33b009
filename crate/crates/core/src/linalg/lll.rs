use num_traits::{One, Signed, Zero};

use super::{Int, IntMatrix, Rat, RatMatrix};
use crate::error::{Error, Result};

/// Lovász parameter used everywhere in the crate.
pub const LLL_DELTA: (i64, i64) = (99, 100);

fn round(x: &Rat) -> Int {
    // nearest integer, halves rounded toward +inf
    (x + Rat::new(Int::one(), Int::from(2))).floor().to_integer()
}

/// Exact LLL reduction of a positive-definite Gram matrix.
///
/// Returns `(G', T)` with `T` unimodular and `G' = T·G·Tᵗ`: the rows of `T`
/// express the reduced basis in terms of the input basis.
pub fn lll_reduce(gram: &RatMatrix) -> Result<(RatMatrix, IntMatrix)> {
    if !gram.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = gram.rows();
    let mut g = gram.clone();
    let mut t = IntMatrix::identity(n);
    if n == 0 {
        return Ok((g, t));
    }
    let delta = Rat::new(Int::from(LLL_DELTA.0), Int::from(LLL_DELTA.1));
    let half = Rat::new(Int::one(), Int::from(2));
    let mut mu = vec![vec![Rat::zero(); n]; n];
    let mut b = vec![Rat::zero(); n];
    b[0] = g.get(0, 0).clone();
    if !b[0].is_positive() {
        return Err(Error::NotPositiveDefinite);
    }
    let mut k = 1;
    let mut kmax = 0;

    // b_k -= q b_l, kept in sync on the Gram matrix and on mu
    let red = |k: usize, l: usize, g: &mut RatMatrix, t: &mut IntMatrix, mu: &mut Vec<Vec<Rat>>| {
        if mu[k][l].abs() <= half {
            return;
        }
        let q = round(&mu[k][l]);
        let qr = Rat::from_integer(q.clone());
        t.row_axpy(k, l, &q);
        for j in 0..n {
            let v = g.get(k, j) - &qr * g.get(l, j);
            g.set(k, j, v);
        }
        for i in 0..n {
            let v = g.get(i, k) - &qr * g.get(i, l);
            g.set(i, k, v);
        }
        mu[k][l] -= &qr;
        for i in 0..l {
            let v = &qr * &mu[l][i];
            mu[k][i] -= v;
        }
    };

    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut s = g.get(k, j).clone();
                for i in 0..j {
                    s -= &mu[j][i] * &mu[k][i] * &b[i];
                }
                if j < k {
                    mu[k][j] = s / &b[j];
                } else {
                    b[k] = s;
                }
            }
            if !b[k].is_positive() {
                return Err(Error::NotPositiveDefinite);
            }
        }
        red(k, k - 1, &mut g, &mut t, &mut mu);
        let lhs = b[k].clone();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1];
        if lhs < rhs {
            // swap b_k and b_{k-1}
            t.swap_rows(k, k - 1);
            for j in 0..n {
                let (a, c) = (g.get(k, j).clone(), g.get(k - 1, j).clone());
                g.set(k, j, c);
                g.set(k - 1, j, a);
            }
            for i in 0..n {
                let (a, c) = (g.get(i, k).clone(), g.get(i, k - 1).clone());
                g.set(i, k, c);
                g.set(i, k - 1, a);
            }
            for j in 0..k - 1 {
                let tmp = mu[k][j].clone();
                mu[k][j] = mu[k - 1][j].clone();
                mu[k - 1][j] = tmp;
            }
            let m = mu[k][k - 1].clone();
            let bb = &b[k] + &m * &m * &b[k - 1];
            mu[k][k - 1] = &m * &b[k - 1] / &bb;
            b[k] = &b[k - 1] * &b[k] / &bb;
            b[k - 1] = bb;
            for i in k + 1..=kmax {
                let tt = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &m * &tt;
                mu[i][k - 1] = &tt + &mu[k][k - 1] * &mu[i][k];
            }
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                red(k, l, &mut g, &mut t, &mut mu);
            }
            k += 1;
        }
    }
    if !g.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    Ok((g, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_cases_unchanged() {
        let a1 = RatMatrix::from_i64(1, 1, &[2]);
        let (g, t) = lll_reduce(&a1).unwrap();
        assert_eq!(g, a1);
        assert!(t.is_identity());
        let id = RatMatrix::identity(2);
        let (g, t) = lll_reduce(&id).unwrap();
        assert_eq!(g, id);
        assert!(t.is_identity());
    }

    #[test]
    fn reduces_skewed_basis() {
        // basis (1,0),(7,1) of Z^2
        let g = RatMatrix::from_i64(2, 2, &[1, 7, 7, 50]);
        let (r, t) = lll_reduce(&g).unwrap();
        assert_eq!(r, RatMatrix::identity(2));
        assert_eq!(t.to_rat().mul(&g).mul(&t.to_rat().transpose()), r);
        assert_eq!(t.det().abs(), Int::one());
    }

    #[test]
    fn rejects_indefinite() {
        let g = RatMatrix::from_i64(2, 2, &[1, 2, 2, 1]);
        assert_eq!(lll_reduce(&g), Err(Error::NotPositiveDefinite));
    }
}
