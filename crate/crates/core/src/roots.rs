//! Simply-laced root systems: Cartan matrices, type recognition, Weyl group orders.

use std::fmt;

use num_traits::Zero;

use crate::linalg::{Rat, RatMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RootType {
    A(usize),
    D(usize),
    E(usize),
}

impl RootType {
    pub fn rank(&self) -> usize {
        match *self {
            RootType::A(n) | RootType::D(n) | RootType::E(n) => n,
        }
    }

    pub fn weyl_order(&self) -> u128 {
        let fact = |n: usize| (1..=n as u128).product::<u128>();
        match *self {
            RootType::A(n) => fact(n + 1),
            RootType::D(n) => (1u128 << (n - 1)) * fact(n),
            RootType::E(6) => 51840,
            RootType::E(7) => 2903040,
            RootType::E(8) => 696729600,
            RootType::E(n) => panic!("no root system E{n}"),
        }
    }

    /// Edges of the Dynkin diagram on nodes `0..rank`.
    ///
    /// `D(n)`: path `0 … n−2` with `n−1` attached to `n−3`. `E(n)`: path
    /// `0, 2, 3, …, n−1` with `1` attached to `3`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        match *self {
            RootType::A(n) => (1..n).map(|i| (i - 1, i)).collect(),
            RootType::D(n) => {
                assert!(n >= 4);
                let mut e: Vec<(usize, usize)> = (1..n - 1).map(|i| (i - 1, i)).collect();
                e.push((n - 3, n - 1));
                e
            }
            RootType::E(n) => {
                let mut e = vec![(0, 2), (1, 3)];
                e.extend((3..n).map(|i| (i - 1, i)));
                e
            }
        }
    }
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootType::A(n) => write!(f, "A{n}"),
            RootType::D(n) => write!(f, "D{n}"),
            RootType::E(n) => write!(f, "E{n}"),
        }
    }
}

/// Gram matrix of the simple roots.
pub fn cartan_gram(t: RootType) -> RatMatrix {
    gram_from_edges(t.rank(), &t.edges())
}

pub fn gram_from_edges(n: usize, edges: &[(usize, usize)]) -> RatMatrix {
    let mut data = vec![0i64; n * n];
    for i in 0..n {
        data[i * n + i] = 2;
    }
    for &(a, b) in edges {
        data[a * n + b] = -1;
        data[b * n + a] = -1;
    }
    RatMatrix::from_i64(n, n, &data)
}

/// A multiset of irreducible components in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RootSystemType(pub Vec<RootType>);

impl RootSystemType {
    pub fn rank(&self) -> usize {
        self.0.iter().map(|t| t.rank()).sum()
    }

    pub fn weyl_order(&self) -> u128 {
        self.0.iter().map(|t| t.weyl_order()).product()
    }

    pub fn root_count(&self) -> usize {
        self.0
            .iter()
            .map(|t| match *t {
                RootType::A(n) => n * (n + 1),
                RootType::D(n) => 2 * n * (n - 1),
                RootType::E(6) => 72,
                RootType::E(7) => 126,
                RootType::E(_) => 240,
            })
            .sum()
    }
}

impl fmt::Display for RootSystemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Type of a simply-laced Dynkin diagram given by its adjacency.
///
/// Returns `None` if some component is not of type A, D or E.
pub fn classify_diagram(n: usize, adj: &[Vec<usize>]) -> Option<RootSystemType> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        let mut k = 0;
        while k < comp.len() {
            for &t in &adj[comp[k]] {
                if !seen[t] {
                    seen[t] = true;
                    comp.push(t);
                }
            }
            k += 1;
        }
        out.push(classify_component(&comp, adj)?);
    }
    out.sort();
    Some(RootSystemType(out))
}

fn classify_component(comp: &[usize], adj: &[Vec<usize>]) -> Option<RootType> {
    let m = comp.len();
    let edges: usize = comp.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
    if edges != m - 1 {
        return None;
    }
    let branch: Vec<usize> = comp.iter().copied().filter(|&v| adj[v].len() >= 3).collect();
    match branch.as_slice() {
        [] => {
            if comp.iter().any(|&v| adj[v].len() > 2) {
                return None;
            }
            Some(RootType::A(m))
        }
        [c] if adj[*c].len() == 3 => {
            let mut arms: Vec<usize> = adj[*c]
                .iter()
                .map(|&start| {
                    let (mut prev, mut cur, mut len) = (*c, start, 1);
                    while adj[cur].len() == 2 {
                        let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
                        prev = cur;
                        cur = next;
                        len += 1;
                    }
                    len
                })
                .collect();
            arms.sort();
            match arms.as_slice() {
                [1, 1, k] => Some(if *k == 1 { RootType::D(4) } else { RootType::D(k + 3) }),
                [1, 2, 2] => Some(RootType::E(6)),
                [1, 2, 3] => Some(RootType::E(7)),
                [1, 2, 4] => Some(RootType::E(8)),
                _ => None,
            }
        }
        _ => None,
    }
}

/// Simple roots of a finite root system given as vectors with an inner product.
///
/// `roots` must be closed under negation. A generic linear functional picks the
/// positive system; simple roots are the positive roots that are not sums of
/// two positive roots.
pub fn simple_roots(roots: &[Vec<i64>]) -> Vec<usize> {
    if roots.is_empty() {
        return vec![];
    }
    let n = roots[0].len();
    let mut weights: Vec<i64> = (0..n as i64).map(|i| 1 + 1000 * i + i * i * 37).collect();
    let value = |w: &[i64], v: &[i64]| -> i128 { w.iter().zip(v).map(|(a, b)| *a as i128 * *b as i128).sum() };
    let mut bump = 0;
    while roots.iter().any(|r| value(&weights, r) == 0) {
        bump += 1;
        for (i, w) in weights.iter_mut().enumerate() {
            *w = *w * 7 + (i as i64 + bump) * 13 + 1;
        }
    }
    let positive: Vec<usize> = (0..roots.len()).filter(|&i| value(&weights, &roots[i]) > 0).collect();
    let set: std::collections::HashSet<&[i64]> = positive.iter().map(|&i| roots[i].as_slice()).collect();
    positive
        .iter()
        .copied()
        .filter(|&i| {
            !positive.iter().any(|&j| {
                if i == j {
                    return false;
                }
                let diff: Vec<i64> = roots[i].iter().zip(&roots[j]).map(|(a, b)| a - b).collect();
                set.contains(diff.as_slice())
            })
        })
        .collect()
}

/// Type of the root system formed by `roots` (closed under negation, all of norm 2).
pub fn root_system_type(roots: &[Vec<i64>], inner: impl Fn(&[i64], &[i64]) -> Rat) -> Option<RootSystemType> {
    let simple = simple_roots(roots);
    let m = simple.len();
    let mut adj = vec![Vec::new(); m];
    for a in 0..m {
        for b in a + 1..m {
            let ip = inner(&roots[simple[a]], &roots[simple[b]]);
            if ip.is_zero() {
                continue;
            }
            if ip != Rat::from_integer((-1).into()) {
                return None;
            }
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let t = classify_diagram(m, &adj)?;
    (t.root_count() == roots.len()).then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_orders() {
        assert_eq!(RootType::A(1).weyl_order(), 2);
        assert_eq!(RootType::A(2).weyl_order(), 6);
        assert_eq!(RootType::D(4).weyl_order(), 192);
        assert_eq!(RootType::E(8).weyl_order(), 696729600);
    }

    #[test]
    fn cartan_determinants() {
        let det = |t| cartan_gram(t).det();
        assert_eq!(det(RootType::A(2)), Rat::from_integer(3.into()));
        assert_eq!(det(RootType::D(4)), Rat::from_integer(4.into()));
        assert_eq!(det(RootType::E(6)), Rat::from_integer(3.into()));
        assert_eq!(det(RootType::E(7)), Rat::from_integer(2.into()));
        assert_eq!(det(RootType::E(8)), Rat::from_integer(1.into()));
    }

    #[test]
    fn diagrams_are_recognized() {
        for t in [
            RootType::A(1),
            RootType::A(5),
            RootType::D(4),
            RootType::D(7),
            RootType::E(6),
            RootType::E(7),
            RootType::E(8),
        ] {
            let n = t.rank();
            let mut adj = vec![Vec::new(); n];
            for (a, b) in t.edges() {
                adj[a].push(b);
                adj[b].push(a);
            }
            assert_eq!(classify_diagram(n, &adj), Some(RootSystemType(vec![t])));
        }
    }
}
