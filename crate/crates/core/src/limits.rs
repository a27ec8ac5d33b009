//! Process-wide search budgets, overridable at startup.

use std::sync::atomic::{AtomicU64, Ordering};

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;
pub const DEFAULT_ELEMENT_BUDGET: u64 = 1_000_000;
pub const DEFAULT_DOUBLE_COSET_BUDGET: u64 = 10_000_000;

static NODES: AtomicU64 = AtomicU64::new(DEFAULT_NODE_BUDGET);
static ELEMENTS: AtomicU64 = AtomicU64::new(DEFAULT_ELEMENT_BUDGET);
static DOUBLE_COSETS: AtomicU64 = AtomicU64::new(DEFAULT_DOUBLE_COSET_BUDGET);

/// Backtracking nodes per isometry or automorphism search.
pub fn node_budget() -> u64 {
    NODES.load(Ordering::Relaxed)
}

/// Largest discriminant group handled by element-wise algorithms.
pub fn element_budget() -> u64 {
    ELEMENTS.load(Ordering::Relaxed)
}

/// Group elements visited while counting double cosets.
pub fn double_coset_budget() -> u64 {
    DOUBLE_COSETS.load(Ordering::Relaxed)
}

pub fn set_node_budget(v: u64) {
    NODES.store(v.max(1), Ordering::Relaxed);
}

pub fn set_element_budget(v: u64) {
    ELEMENTS.store(v.max(1), Ordering::Relaxed);
}

pub fn set_double_coset_budget(v: u64) {
    DOUBLE_COSETS.store(v.max(1), Ordering::Relaxed);
}
