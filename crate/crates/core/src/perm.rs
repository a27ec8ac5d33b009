//! Permutations and stabilizer chains.
//!
//! Composition is left to right: `a.then(b)` applies `a` first. Transversals
//! are stored as Schreier trees (one back-label per orbit point), so a chain on
//! a large domain costs one label array per level rather than one permutation
//! per orbit point.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    /// `images[i]` is the image of point `i`; must be a bijection.
    pub fn from_images(images: Vec<u32>) -> Self {
        debug_assert!({
            let mut seen = vec![false; images.len()];
            images.iter().all(|&p| !std::mem::replace(&mut seen[p as usize], true))
        });
        Perm(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    #[inline]
    pub fn image(&self, p: u32) -> u32 {
        self.0[p as usize]
    }

    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&p| other.0[p as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i as u32 == p)
    }

    pub fn first_moved(&self) -> Option<u32> {
        self.0.iter().enumerate().find(|(i, &p)| *i as u32 != p).map(|(i, _)| i as u32)
    }

    pub fn pow(&self, mut e: u128) -> Perm {
        let mut base = self.clone();
        let mut acc = Perm::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        acc
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for i in 0..self.0.len() {
            if seen[i] {
                continue;
            }
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.0[j] as usize;
                len += 1;
            }
            out.push(len);
        }
        out
    }

    pub fn order(&self) -> u128 {
        self.cycle_lengths().into_iter().fold(1u128, |acc, l| num_integer::lcm(acc, l as u128))
    }
}

/// Orbit of `point` under `gens`, in breadth-first order.
pub fn orbit(point: u32, gens: &[Perm], degree: usize) -> Vec<u32> {
    let mut seen = vec![false; degree];
    seen[point as usize] = true;
    let mut out = vec![point];
    let mut k = 0;
    while k < out.len() {
        let p = out[k];
        for g in gens {
            let q = g.image(p);
            if !seen[q as usize] {
                seen[q as usize] = true;
                out.push(q);
            }
        }
        k += 1;
    }
    out
}

/// All orbits, each sorted, listed by least element.
pub fn orbits(gens: &[Perm], degree: usize) -> Vec<Vec<u32>> {
    let mut seen = vec![false; degree];
    let mut out = Vec::new();
    for p in 0..degree {
        if seen[p] {
            continue;
        }
        let mut o = orbit(p as u32, gens, degree);
        for &q in &o {
            seen[q as usize] = true;
        }
        o.sort_unstable();
        out.push(o);
    }
    out
}

const NOT_IN_ORBIT: u32 = u32::MAX;
const ROOT: u32 = u32::MAX - 1;

#[derive(Clone, Debug)]
struct Level {
    point: u32,
    gens: Vec<Perm>,
    inv: Vec<Perm>,
    orbit: Vec<u32>,
    label: Vec<u32>,
    /// Schreier generators already verified, as (orbit position, generator index)
    checked: HashSet<(u32, u32)>,
}

impl Level {
    fn new(point: u32, degree: usize) -> Self {
        let mut label = vec![NOT_IN_ORBIT; degree];
        label[point as usize] = ROOT;
        Level { point, gens: Vec::new(), inv: Vec::new(), orbit: vec![point], label, checked: HashSet::new() }
    }

    fn add_gen(&mut self, g: Perm) {
        self.inv.push(g.inverse());
        self.gens.push(g);
        // extend the tree without relabelling existing points: those are
        // already closed under the old generators
        let new = self.gens.len() - 1;
        let old_len = self.orbit.len();
        let mut k = 0;
        while k < self.orbit.len() {
            let p = self.orbit[k];
            let range = if k < old_len { new..new + 1 } else { 0..self.gens.len() };
            for s in range {
                let q = self.gens[s].image(p);
                if self.label[q as usize] == NOT_IN_ORBIT {
                    self.label[q as usize] = s as u32;
                    self.orbit.push(q);
                }
            }
            k += 1;
        }
    }

    fn in_orbit(&self, p: u32) -> bool {
        self.label[p as usize] != NOT_IN_ORBIT
    }

    /// `g · u_p⁻¹`, where `u_p` maps the base point to `p`.
    fn strip(&self, g: &mut Perm, mut p: u32) {
        while self.label[p as usize] != ROOT {
            let s = self.label[p as usize] as usize;
            *g = g.then(&self.inv[s]);
            p = self.inv[s].image(p);
        }
    }

    /// Transversal element mapping the base point to `p`.
    fn transversal(&self, mut p: u32, degree: usize) -> Perm {
        let mut labels = Vec::new();
        while self.label[p as usize] != ROOT {
            let s = self.label[p as usize] as usize;
            labels.push(s);
            p = self.inv[s].image(p);
        }
        let mut u = Perm::identity(degree);
        for &s in labels.iter().rev() {
            u = u.then(&self.gens[s]);
        }
        u
    }
}

/// Base and strong generating set.
#[derive(Clone, Debug)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    /// Deterministic Schreier–Sims. `base_prefix` points come first in the base.
    pub fn new(degree: usize, gens: &[Perm], base_prefix: &[u32]) -> Self {
        let mut chain = StabChain::skeleton(degree, gens, base_prefix);
        chain.complete();
        chain
    }

    /// Randomized Schreier–Sims: stops after `patience` consecutive random
    /// elements sift to the identity. The order is always a lower bound, and
    /// equals the true order with probability at least `1 − 2^{−patience}`.
    pub fn new_random(degree: usize, gens: &[Perm], base_prefix: &[u32], seed: u64, patience: usize) -> Self {
        let mut chain = StabChain::skeleton(degree, gens, base_prefix);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pr = ProductReplacement::new(gens, degree, &mut rng);
        let mut quiet = 0;
        while quiet < patience {
            let g = pr.next(&mut rng);
            let (h, j) = chain.sift_from(g, 0);
            if h.is_identity() {
                quiet += 1;
                continue;
            }
            quiet = 0;
            chain.insert(h, 0, j);
        }
        chain
    }

    fn skeleton(degree: usize, gens: &[Perm], base_prefix: &[u32]) -> Self {
        let mut chain = StabChain { degree, levels: Vec::new() };
        for &b in base_prefix {
            chain.levels.push(Level::new(b, degree));
        }
        let gens: Vec<&Perm> = gens.iter().filter(|g| !g.is_identity()).collect();
        for g in &gens {
            if chain.levels.iter().all(|l| g.image(l.point) == l.point) {
                let p = g.first_moved().unwrap();
                chain.levels.push(Level::new(p, degree));
            }
        }
        for g in gens {
            // level l gets g if g fixes the earlier base points
            let mut l = 0;
            while l < chain.levels.len() {
                chain.levels[l].add_gen(g.clone());
                if g.image(chain.levels[l].point) != chain.levels[l].point {
                    break;
                }
                l += 1;
            }
        }
        chain
    }

    /// Adds `h` (which fixes base points before `j`) to levels `from..=j`.
    fn insert(&mut self, h: Perm, from: usize, j: usize) {
        if j == self.levels.len() {
            let p = h.first_moved().expect("nontrivial residue");
            self.levels.push(Level::new(p, self.degree));
        }
        for l in from..=j {
            self.levels[l].add_gen(h.clone());
        }
    }

    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let lvl = i as usize;
            let mut restart = None;
            let mut k = 0;
            'outer: while k < self.levels[lvl].orbit.len() {
                let p = self.levels[lvl].orbit[k];
                for s in 0..self.levels[lvl].gens.len() {
                    if self.levels[lvl].checked.contains(&(k as u32, s as u32)) {
                        continue;
                    }
                    let level = &self.levels[lvl];
                    let q = level.gens[s].image(p);
                    // u_p · s · u_q⁻¹
                    let mut g = level.transversal(p, self.degree).then(&level.gens[s]);
                    level.strip(&mut g, q);
                    self.levels[lvl].checked.insert((k as u32, s as u32));
                    if g.is_identity() {
                        continue;
                    }
                    let (h, j) = self.sift_from(g, lvl + 1);
                    if !h.is_identity() {
                        self.levels[lvl].checked.remove(&(k as u32, s as u32));
                        self.insert(h, lvl + 1, j);
                        restart = Some(j);
                        break 'outer;
                    }
                }
                k += 1;
            }
            match restart {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }
    }

    /// Sifts `g` through levels `from..`; returns the residue and the level at
    /// which it stopped (`levels.len()` if it passed every level).
    fn sift_from(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (l, level) in self.levels.iter().enumerate().skip(from) {
            let p = g.image(level.point);
            if !level.in_orbit(p) {
                return (g, l);
            }
            level.strip(&mut g, p);
        }
        let n = self.levels.len();
        (g, n)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn contains(&self, g: &Perm) -> bool {
        g.degree() == self.degree && self.sift_from(g.clone(), 0).0.is_identity()
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    /// Order of the pointwise stabilizer of the first `k` base points.
    pub fn stabilizer_order(&self, k: usize) -> u128 {
        self.levels.iter().skip(k).map(|l| l.orbit.len() as u128).product()
    }

    /// Strong generators of the pointwise stabilizer of the first `k` base points.
    pub fn stabilizer_gens(&self, k: usize) -> Vec<Perm> {
        self.levels.get(k).map(|l| l.gens.clone()).unwrap_or_default()
    }

    pub fn strong_gens(&self) -> Vec<Perm> {
        self.stabilizer_gens(0)
    }

    /// A uniformly random element.
    pub fn random_element(&self, rng: &mut impl Rng) -> Perm {
        let mut g = Perm::identity(self.degree);
        for level in self.levels.iter().rev() {
            let p = level.orbit[rng.gen_range(0..level.orbit.len())];
            g = g.then(&level.transversal(p, self.degree));
        }
        g
    }
}

/// Product-replacement random elements.
struct ProductReplacement {
    state: Vec<Perm>,
    acc: Perm,
}

impl ProductReplacement {
    fn new(gens: &[Perm], degree: usize, rng: &mut impl Rng) -> Self {
        let mut state: Vec<Perm> = gens.iter().filter(|g| !g.is_identity()).cloned().collect();
        if state.is_empty() {
            state.push(Perm::identity(degree));
        }
        let mut k = 0;
        while state.len() < 10 {
            state.push(state[k].clone());
            k += 1;
        }
        let mut pr = ProductReplacement { state, acc: Perm::identity(degree) };
        for _ in 0..50 {
            pr.next(rng);
        }
        pr
    }

    fn next(&mut self, rng: &mut impl Rng) -> Perm {
        let n = self.state.len();
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let x = if rng.gen_bool(0.5) { self.state[j].clone() } else { self.state[j].inverse() };
        self.state[i] = if rng.gen_bool(0.5) { self.state[i].then(&x) } else { x.then(&self.state[i]) };
        self.acc = self.acc.then(&self.state[i]);
        self.acc.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize, pts: &[u32]) -> Perm {
        let mut im: Vec<u32> = (0..n as u32).collect();
        for w in 0..pts.len() {
            im[pts[w] as usize] = pts[(w + 1) % pts.len()];
        }
        Perm::from_images(im)
    }

    #[test]
    fn perm_basics() {
        let a = cycle(4, &[0, 1, 2]);
        assert_eq!(a.order(), 3);
        assert!(a.then(&a.inverse()).is_identity());
        assert!(a.pow(3).is_identity());
        let b = cycle(4, &[0, 1]);
        // a then b: 0→1→0
        assert_eq!(a.then(&b).image(0), 0);
    }

    #[test]
    fn symmetric_group_orders() {
        for n in 1..=8usize {
            let gens = vec![cycle(n, &(0..n as u32).collect::<Vec<_>>()), cycle(n, &[0, 1.min(n as u32 - 1)])];
            let c = StabChain::new(n, &gens, &[]);
            let fact: u128 = (1..=n as u128).product();
            assert_eq!(c.order(), fact);
        }
    }

    #[test]
    fn alternating_and_membership() {
        let gens = vec![cycle(6, &[0, 1, 2]), cycle(6, &[1, 2, 3, 4, 5])];
        let c = StabChain::new(6, &gens, &[]);
        assert_eq!(c.order(), 360);
        assert!(c.contains(&cycle(6, &[3, 4, 5])));
        assert!(!c.contains(&cycle(6, &[0, 1])));
    }

    #[test]
    fn random_matches_deterministic() {
        let gens = vec![cycle(10, &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]), cycle(10, &[0, 1])];
        let r = StabChain::new_random(10, &gens, &[], 7, 30);
        assert_eq!(r.order(), 3628800);
    }

    #[test]
    fn base_prefix_gives_pointwise_stabilizer() {
        let gens = vec![cycle(5, &[0, 1, 2, 3, 4]), cycle(5, &[0, 1])];
        let c = StabChain::new(5, &gens, &[0, 1]);
        assert_eq!(c.base()[..2], [0, 1]);
        assert_eq!(c.stabilizer_order(2), 6);
        for g in c.stabilizer_gens(2) {
            assert_eq!(g.image(0), 0);
            assert_eq!(g.image(1), 1);
        }
    }
}
