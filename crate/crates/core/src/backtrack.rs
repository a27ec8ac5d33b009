//! Generic base-image backtracking.
//!
//! A search space fixes a base of domain points; an element is determined by
//! the images of the base. Automorphism groups are built level by level from
//! the bottom of the chain: at each level every admissible image of the base
//! point either lies in the orbit of the generators found so far, or a search
//! decides whether some element realizes it. The group order is the product of
//! the orbit lengths, so it is exact without enumerating the group.

use crate::error::{Error, Result};
use crate::perm::Perm;

pub trait SearchSpace {
    type Elem;

    /// Number of base points.
    fn depth(&self) -> usize;

    /// Admissible images for base point `images.len()`, in canonical order.
    fn candidates(&self, images: &[u32]) -> Vec<u32>;

    /// Turns a full set of base images into an element, if it is one.
    fn complete(&self, images: &[u32]) -> Option<Self::Elem>;
}

/// A search space whose elements permute the domain the base lives in.
pub trait AutSpace: SearchSpace {
    fn degree(&self) -> usize;
    fn base_point(&self, level: usize) -> u32;
    fn perm(&self, e: &Self::Elem) -> Perm;
}

/// Node budget shared by one search.
#[derive(Clone, Debug)]
pub struct Budget {
    what: &'static str,
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(what: &'static str, limit: u64) -> Self {
        Budget { what, limit, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::budget(self.what, self.limit as u128));
        }
        Ok(())
    }
}

/// First element (in candidate order) extending the given base images.
pub fn search_one<S: SearchSpace>(space: &S, prefix: &[u32], budget: &mut Budget) -> Result<Option<S::Elem>> {
    let mut images = prefix.to_vec();
    dfs(space, &mut images, budget)
}

fn dfs<S: SearchSpace>(space: &S, images: &mut Vec<u32>, budget: &mut Budget) -> Result<Option<S::Elem>> {
    budget.tick()?;
    if images.len() == space.depth() {
        return Ok(space.complete(images));
    }
    for c in space.candidates(images) {
        images.push(c);
        if let Some(e) = dfs(space, images, budget)? {
            return Ok(Some(e));
        }
        images.pop();
    }
    Ok(None)
}

/// Every element, in candidate order. Used for small groups only.
pub fn search_all<S: SearchSpace>(space: &S, budget: &mut Budget) -> Result<Vec<S::Elem>> {
    let mut out = Vec::new();
    let mut images = Vec::new();
    dfs_all(space, &mut images, budget, &mut out)?;
    Ok(out)
}

fn dfs_all<S: SearchSpace>(
    space: &S,
    images: &mut Vec<u32>,
    budget: &mut Budget,
    out: &mut Vec<S::Elem>,
) -> Result<()> {
    budget.tick()?;
    if images.len() == space.depth() {
        if let Some(e) = space.complete(images) {
            out.push(e);
        }
        return Ok(());
    }
    for c in space.candidates(images) {
        images.push(c);
        dfs_all(space, images, budget, out)?;
        images.pop();
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct AutResult<E> {
    pub gens: Vec<E>,
    pub perms: Vec<Perm>,
    /// orbit length of each base point under the stabilizer of the earlier ones
    pub orbit_sizes: Vec<usize>,
}

impl<E> AutResult<E> {
    pub fn order(&self) -> u128 {
        self.orbit_sizes.iter().map(|&s| s as u128).product()
    }
}

/// Generators and exact order of the full group described by `space`.
pub fn automorphisms<S: AutSpace>(space: &S, budget: &mut Budget) -> Result<AutResult<S::Elem>> {
    let depth = space.depth();
    let degree = space.degree();
    let mut gens = Vec::new();
    let mut perms: Vec<Perm> = Vec::new();
    let mut orbit_sizes = vec![0; depth];
    for level in (0..depth).rev() {
        let prefix: Vec<u32> = (0..level).map(|l| space.base_point(l)).collect();
        let point = space.base_point(level);
        // known elements all fix the prefix: they were found at deeper levels
        let mut orbit = crate::perm::orbit(point, &perms, degree);
        let mut in_orbit = vec![false; degree];
        for &p in &orbit {
            in_orbit[p as usize] = true;
        }
        let mut impossible = vec![false; degree];
        for c in space.candidates(&prefix) {
            if in_orbit[c as usize] || impossible[c as usize] {
                continue;
            }
            let mut images = prefix.clone();
            images.push(c);
            match dfs(space, &mut images, budget)? {
                Some(e) => {
                    let p = space.perm(&e);
                    debug_assert_eq!(p.image(point), c);
                    gens.push(e);
                    perms.push(p);
                    orbit = crate::perm::orbit(point, &perms, degree);
                    for &q in &orbit {
                        in_orbit[q as usize] = true;
                    }
                }
                None => {
                    // nothing in the stabilizer maps the point to c, so nothing
                    // maps it anywhere in the known orbit of c either
                    for q in crate::perm::orbit(c, &perms, degree) {
                        impossible[q as usize] = true;
                    }
                }
            }
        }
        orbit_sizes[level] = orbit.len();
    }
    Ok(AutResult { gens, perms, orbit_sizes })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Symmetries of a square acting on its 4 corners.
    struct Square;

    impl SearchSpace for Square {
        type Elem = Vec<u32>;
        fn depth(&self) -> usize {
            2
        }
        fn candidates(&self, images: &[u32]) -> Vec<u32> {
            match images {
                [] => (0..4).collect(),
                [a] => vec![(a + 1) % 4, (a + 3) % 4],
                _ => unreachable!(),
            }
        }
        fn complete(&self, images: &[u32]) -> Option<Vec<u32>> {
            let (a, b) = (images[0], images[1]);
            let step = (b + 4 - a) % 4;
            Some((0..4).map(|i| (a + step * i) % 4).collect())
        }
    }

    impl AutSpace for Square {
        fn degree(&self) -> usize {
            4
        }
        fn base_point(&self, level: usize) -> u32 {
            level as u32
        }
        fn perm(&self, e: &Vec<u32>) -> Perm {
            Perm::from_images(e.clone())
        }
    }

    #[test]
    fn dihedral_group_of_square() {
        let mut budget = Budget::new("test", 1000);
        let r = automorphisms(&Square, &mut budget).unwrap();
        assert_eq!(r.order(), 8);
        let all = search_all(&Square, &mut Budget::new("test", 1000)).unwrap();
        assert_eq!(all.len(), 8);
        let chain = crate::perm::StabChain::new(4, &r.perms, &[]);
        assert_eq!(chain.order(), 8);
    }

    #[test]
    fn budget_is_reported() {
        let mut budget = Budget::new("square", 2);
        assert!(matches!(search_all(&Square, &mut budget), Err(Error::BudgetExceeded { .. })));
    }
}
