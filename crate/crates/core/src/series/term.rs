use std::collections::BTreeMap;
use std::rc::Rc;

use num_complex::Complex64;

use super::engine::{power_table, EngineLimits, FactorGraph};
use super::{EvalReport, TruncationPlan};
use crate::error::{Error, Result};
use crate::model::{ConstraintSystem, VarId};

/// The factor `num^{num_exp} / (den^{den_exp} (den - num))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pole {
    pub num_var: VarId,
    pub den_var: VarId,
    pub num_exp: Complex64,
    pub den_exp: Complex64,
}

/// A summand `prod v^{-e(v)}`, optionally times a [`Pole`]. Variables of the
/// constraint system missing from `exponents` get exponent 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TermSpec {
    pub exponents: BTreeMap<VarId, Complex64>,
    pub pole: Option<Pole>,
}

impl TermSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_exponent(mut self, v: VarId, e: Complex64) -> Self {
        self.exponents.insert(v, e);
        self
    }

    pub fn with_pole(mut self, pole: Pole) -> Self {
        self.pole = Some(pole);
        self
    }
}

pub(crate) type PairTerm = (VarId, VarId, Rc<dyn Fn(usize, usize) -> Complex64>);

/// `ln x` for `x = 0..=n` (index 0 unused).
pub(crate) fn ln_table(n: u64) -> Rc<Vec<f64>> {
    Rc::new((0..=n).map(|x| if x == 0 { 0.0 } else { (x as f64).ln() }).collect())
}

/// `x^a / (y^b (y - x))` as a pair term on `(num, den)`.
pub(crate) fn pole_term(p: &Pole, n: u64) -> PairTerm {
    let ln = ln_table(n);
    let (a, b) = (p.num_exp, p.den_exp);
    let f = move |x: usize, y: usize| (a * ln[x] - b * ln[y]).exp() / (y as f64 - x as f64);
    (p.num_var, p.den_var, Rc::new(f))
}

/// Box-truncated sum at a single cutoff.
pub(crate) fn sum_at(
    cs: &ConstraintSystem,
    exponents: &BTreeMap<VarId, Complex64>,
    pairs: &[PairTerm],
    n: u64,
    limits: EngineLimits,
) -> Result<Complex64> {
    let mut g = FactorGraph::new(cs, n, limits)?;
    for (&v, &e) in exponents {
        if cs.index_of(v).is_none() {
            return Err(Error::Invalid(format!("exponent given for {v}, which is not summed over")));
        }
        if e != Complex64::new(0.0, 0.0) {
            g.mul_unary(v, &power_table(e, n))?;
        }
    }
    for (a, b, f) in pairs {
        let f = f.clone();
        g.mul_pair(*a, *b, move |x, y| f(x, y))?;
    }
    g.sum()
}

/// Sum of the term over the lattice points of `cs` in `[1, N]^vars`.
///
/// The sum is computed by eliminating variables one at a time in a fixed
/// order determined by the constraint graph, so it is deterministic but not
/// accumulated in lexicographic point order.
pub fn eval_constrained_sum(cs: &ConstraintSystem, t: &TermSpec, plan: &TruncationPlan) -> Result<EvalReport> {
    eval_constrained_sum_with_limits(cs, t, plan, EngineLimits::default())
}

pub fn eval_constrained_sum_with_limits(
    cs: &ConstraintSystem,
    t: &TermSpec,
    plan: &TruncationPlan,
    limits: EngineLimits,
) -> Result<EvalReport> {
    if let Some(p) = &t.pole {
        if p.num_var == p.den_var {
            return Err(Error::Invalid("pole numerator and denominator must differ".into()));
        }
        for v in [p.num_var, p.den_var] {
            if cs.index_of(v).is_none() {
                return Err(Error::Invalid(format!("pole variable {v} is not summed over")));
            }
        }
    }
    plan.run(|n| {
        let pairs: Vec<PairTerm> = t.pole.iter().map(|p| pole_term(p, n)).collect();
        sum_at(cs, &t.exponents, &pairs, n, limits)
    })
}
