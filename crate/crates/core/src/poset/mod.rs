//! Exact decomposition of constrained sums with integer exponents into
//! integer combinations of MZV symbols.

mod composition;
mod weak_order;

pub use composition::{Composition, SymbolCombination};
pub use weak_order::{
    chain_count, count_lattice_points, count_lattice_points_capped, count_weak_orders,
    decompose_to_mzv, weak_orders, ExponentMap, OrderedSetPartition, ORACLE_CAP,
};
