//! Truncated numerical evaluation of the complex-argument series.
//!
//! Every summation variable ranges over `1..=N` ("box truncation"), except
//! in the harmonic closed forms where the auxiliary variable is summed
//! exactly. Values come with a heuristic residual `|v(N) - v(N/2)|`.

mod engine;
mod mt;
mod mzf;
mod report;
mod term;
mod tilde;

pub use engine::{power_table, EngineLimits};
pub use mt::{eval_mordell_tornheim, harmonic_relation_check};
pub use mzf::{eval_mzf, mzf_partial, DomainPolicy};
pub use report::{EvalReport, TruncationPlan};
pub use term::{eval_constrained_sum, eval_constrained_sum_with_limits, Pole, TermSpec};
pub use tilde::{
    eval_theorem_residual, eval_zeta_c, eval_zeta_c_i, eval_zeta_tilde, eval_zeta_tilde_harmonic,
    harmonic_range, TheoremPoint, TheoremResidual, TildeVariant,
};
