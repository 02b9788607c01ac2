//! MZV relation families from the cyclic identity at integer points, their
//! relation matrices, and exact ranks.

mod family;
mod matrix;
mod relation;
mod table;

pub use family::{enumerate_family, Family};
pub use matrix::{rank_exact, rank_mod_p, relation_matrix, RelationMatrix, RelationSet, VERIFY_PRIMES};
pub use relation::{
    csf_relation, cyclic_relation, evaluate_combo, generate, zeta_star_expand, Provenance, Relation,
};
pub use table::{table1, Table1Row, ALL_RELATIONS_REFERENCE};
