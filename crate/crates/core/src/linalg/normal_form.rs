use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Int, IntMatrix, Rat, RatMatrix};

/// Row-style Hermite normal form.
///
/// Returns `(H, U)` with `U` unimodular and `U·M = H`. `H` is upper triangular
/// in echelon form, pivots are positive, entries above a pivot lie in
/// `[0, pivot)`, and zero rows trail.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut p = 0;
    for c in 0..cols {
        if p == rows {
            break;
        }
        loop {
            // smallest nonzero entry at or below the pivot row
            let best = (p..rows)
                .filter(|&r| !h.get(r, c).is_zero())
                .min_by(|&a, &b| h.get(a, c).abs().cmp(&h.get(b, c).abs()));
            let Some(best) = best else { break };
            h.swap_rows(p, best);
            u.swap_rows(p, best);
            let mut done = true;
            for r in p + 1..rows {
                if h.get(r, c).is_zero() {
                    continue;
                }
                let q = h.get(r, c).div_floor(h.get(p, c));
                h.row_axpy(r, p, &q);
                u.row_axpy(r, p, &q);
                if !h.get(r, c).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.get(p, c).is_zero() {
            continue;
        }
        if h.get(p, c).is_negative() {
            h.negate_row(p);
            u.negate_row(p);
        }
        for r in 0..p {
            let q = h.get(r, c).div_floor(h.get(p, c));
            h.row_axpy(r, p, &q);
            u.row_axpy(r, p, &q);
        }
        p += 1;
    }
    (h, u)
}

/// Smith normal form `D = U·M·V` with `d₁ | d₂ | …` and non-negative diagonal.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = d.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return finish_snf(d, u, v);
            };
            d.swap_rows(t, bi);
            u.swap_rows(t, bi);
            d.swap_cols(t, bj);
            v.swap_cols(t, bj);
            let mut clean = true;
            for i in t + 1..rows {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = d.get(i, t).div_floor(d.get(t, t));
                d.row_axpy(i, t, &q);
                u.row_axpy(i, t, &q);
                clean &= d.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = d.get(t, j).div_floor(d.get(t, t));
                d.col_axpy(j, t, &q);
                v.col_axpy(j, t, &q);
                clean &= d.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let piv = d.get(t, t).clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !d.get(i, j).is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    // row t += row i, then the next pass shrinks the pivot
                    let minus_one = -Int::one();
                    d.row_axpy(t, i, &minus_one);
                    u.row_axpy(t, i, &minus_one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    finish_snf(d, u, v)
}

fn finish_snf(mut d: IntMatrix, mut u: IntMatrix, v: IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    for t in 0..d.rows().min(d.cols()) {
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    (d, u, v)
}

/// Basis (in HNF) of the integer left kernel `{x : x·M = 0}`.
///
/// The kernel of an integer matrix is always saturated in `ℤᵐ`; taking it from
/// the unimodular transform of the HNF yields a genuine basis of it.
pub fn kernel_saturated(m: &IntMatrix) -> IntMatrix {
    let (h, u) = hnf(m);
    let rank = (0..h.rows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
    let idx: Vec<usize> = (rank..m.rows()).collect();
    let k = u.select_rows(&idx);
    let (hk, _) = hnf(&k);
    hk
}

/// HNF basis of the ℤ-lattice generated by the rows of a rational matrix.
pub fn row_lattice_basis(rows: &RatMatrix) -> RatMatrix {
    let (den, m) = rows.clear_denominators();
    let (h, _) = hnf(&m);
    let nz: Vec<usize> = (0..h.rows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).collect();
    let h = h.select_rows(&nz);
    h.to_rat().scale(&Rat::new(Int::one(), den))
}

/// Nonzero rows of an HNF.
pub(crate) fn nonzero_rows(h: &IntMatrix) -> IntMatrix {
    let nz: Vec<usize> = (0..h.rows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).collect();
    h.select_rows(&nz)
}
