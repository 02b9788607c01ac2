//! Shapes, arguments, summation-domain constraint systems and domain checks.

mod args;
mod constraints;
mod domain;
mod shape;

pub use args::{format_complex, parse_complex, ComplexArgs, IntArgs};
pub use constraints::{
    build_constraints_s, build_constraints_s_i, build_constraints_s_ij, build_constraints_t_i,
    Cmp, Constraint, ConstraintSystem, VarId,
};
pub use domain::{
    domain_kind, ez_inequalities, in_domain_ez_absolute, in_domain_w, is_integer_point_in_w,
    w_inequalities, DomainKind, Inequality,
};
pub use shape::Shape;
