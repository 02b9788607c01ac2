//! The auxiliary functions attached to a shape: the pole sums over `S_{i,j}`,
//! their harmonic-number closed forms, the sums over `S_i`, and both sides
//! of the cyclic identity.

use std::collections::BTreeMap;
use std::rc::Rc;

use num_complex::Complex64;
use serde_json::json;

use super::engine::EngineLimits;
use super::term::{ln_table, pole_term, sum_at, PairTerm};
use super::{DomainPolicy, EvalReport, Pole, TruncationPlan};
use crate::error::{Error, Result};
use crate::model::{
    build_constraints_s, build_constraints_s_i, build_constraints_s_ij, build_constraints_t_i, w_inequalities,
    ComplexArgs, ConstraintSystem, VarId,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TildeVariant {
    /// Pole numerator `n_{i,j}^{δ}`, with `δ = 1` exactly when `j = r_i`.
    First,
    /// Pole numerator `n_{i,j}^{s_{i,j}}`.
    Second,
    /// First minus second, summed termwise.
    Diff,
}

fn check_w(s: &ComplexArgs, policy: DomainPolicy) -> Result<Vec<String>> {
    let failed: Vec<String> = w_inequalities(s)
        .iter()
        .filter(|q| !q.holds)
        .map(|q| q.to_string())
        .collect();
    if !failed.is_empty() && policy == DomainPolicy::Strict {
        return Err(Error::Domain(failed.join("; ")));
    }
    Ok(failed.into_iter().map(|f| format!("outside domain: {f}")).collect())
}

fn block_exponents(s: &ComplexArgs) -> BTreeMap<VarId, Complex64> {
    s.shape()
        .positions()
        .map(|(i, j)| (VarId::Block(i, j), s.get(i, j)))
        .collect()
}

fn with_warnings(mut r: EvalReport, w: Vec<String>) -> EvalReport {
    r.warnings.extend(w);
    r
}

fn delta(s: &ComplexArgs, i: usize, j: usize) -> Complex64 {
    let d = if j == s.shape().depth(i) { 1.0 } else { 0.0 };
    Complex64::new(d, 0.0)
}

/// Pair term of the pole sum over `S_{i,j}` for one variant, at cutoff `n`.
fn tilde_pair(s: &ComplexArgs, i: usize, j: usize, variant: TildeVariant, n: u64) -> PairTerm {
    let pole = |e: Complex64| Pole {
        num_var: VarId::Block(i, j),
        den_var: VarId::Extra,
        num_exp: e,
        den_exp: e,
    };
    let (d, sij) = (delta(s, i, j), s.get(i, j));
    match variant {
        TildeVariant::First => pole_term(&pole(d), n),
        TildeVariant::Second => pole_term(&pole(sij), n),
        TildeVariant::Diff => {
            let ln = ln_table(n);
            let f = move |x: usize, y: usize| {
                let l = ln[x] - ln[y];
                ((d * l).exp() - (sij * l).exp()) / (y as f64 - x as f64)
            };
            (VarId::Block(i, j), VarId::Extra, Rc::new(f))
        }
    }
}

fn tilde_at(s: &ComplexArgs, cs: &ConstraintSystem, i: usize, j: usize, variant: TildeVariant, n: u64) -> Result<Complex64> {
    let pair = tilde_pair(s, i, j, variant, n);
    sum_at(cs, &block_exponents(s), &[pair], n, EngineLimits::default())
}

/// Box-truncated pole sum over `S_{i,j}`.
pub fn eval_zeta_tilde(
    s: &ComplexArgs,
    i: usize,
    j: usize,
    variant: TildeVariant,
    plan: &TruncationPlan,
    policy: DomainPolicy,
) -> Result<EvalReport> {
    let cs = build_constraints_s_ij(s.shape(), i, j)?;
    let warnings = check_w(s, policy)?;
    let r = plan.run(|n| tilde_at(s, &cs, i, j, variant, n))?;
    Ok(with_warnings(r, warnings))
}

/// `H(lo..=hi) = sum_{k=lo}^{hi} 1/k`, zero for an empty range. Requires `lo >= 1`.
pub fn harmonic_range(lo: u64, hi: u64) -> f64 {
    (lo..=hi).map(|k| 1.0 / k as f64).sum()
}

/// Harmonic numbers `H[0..=n]`.
fn harmonic_table(n: u64) -> Rc<Vec<f64>> {
    let mut h = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    h.push(0.0);
    for k in 1..=n {
        acc += 1.0 / k as f64;
        h.push(acc);
    }
    Rc::new(h)
}

/// `H(lo..=hi)` from the table, with `lo` clamped to at least 1.
fn h_range(h: &[f64], lo: i64, hi: i64) -> f64 {
    let lo = lo.max(1);
    if hi < lo {
        0.0
    } else {
        h[hi as usize] - h[lo as usize - 1]
    }
}

/// The pole sum with the auxiliary variable summed in closed form, leaving a
/// harmonic-range factor between two block variables. Only the block
/// variables are truncated at `N`.
pub fn eval_zeta_tilde_harmonic(
    s: &ComplexArgs,
    i: usize,
    j: usize,
    variant: TildeVariant,
    plan: &TruncationPlan,
    policy: DomainPolicy,
) -> Result<EvalReport> {
    let shape = s.shape();
    shape.check_position(i, j)?;
    let r = shape.depth(i);
    // (domain, first variable, second variable, factor of their values given H)
    type Factor = fn(&[f64], i64, i64) -> f64;
    let (cs, a, b, factor): (ConstraintSystem, VarId, VarId, Factor) = match variant {
        TildeVariant::First if j < r => (
            build_constraints_s(shape),
            VarId::Block(i, j),
            VarId::Block(i, j + 1),
            |h, a, c| h_range(h, 1, c - a - 1),
        ),
        TildeVariant::First => (
            build_constraints_t_i(shape, i)?,
            VarId::Block(i, r),
            VarId::Block(shape.prev_block(i), 1),
            |h, a, b| h_range(h, (b - a).max(1), a.max(b - 1)),
        ),
        TildeVariant::Second if j == 1 => {
            let k = shape.next_block(i);
            (
                build_constraints_t_i(shape, k)?,
                VarId::Block(i, 1),
                VarId::Block(k, shape.depth(k)),
                |h, a, c| h_range(h, (a - c).max(1), a - 1),
            )
        }
        TildeVariant::Second => (
            build_constraints_s(shape),
            VarId::Block(i, j),
            VarId::Block(i, j - 1),
            |h, a, p| h_range(h, 1, a - p - 1),
        ),
        TildeVariant::Diff => {
            return Err(Error::Invalid(
                "the harmonic form is defined for variants 1 and 2 separately".into(),
            ))
        }
    };
    let warnings = check_w(s, policy)?;
    let exps = block_exponents(s);
    let report = plan.run(|n| {
        let h = harmonic_table(n);
        let f = move |x: usize, y: usize| Complex64::new(factor(&h, x as i64, y as i64), 0.0);
        sum_at(&cs, &exps, &[(a, b, Rc::new(f))], n, EngineLimits::default())
    })?;
    Ok(with_warnings(report, warnings))
}

fn zeta_c_i_at(s: &ComplexArgs, cs: &ConstraintSystem, n: u64) -> Result<Complex64> {
    let mut exps = block_exponents(s);
    exps.insert(VarId::Extra, Complex64::new(1.0, 0.0));
    sum_at(cs, &exps, &[], n, EngineLimits::default())
}

/// Sum over `S_i` of `n^{-s} / n`.
pub fn eval_zeta_c_i(s: &ComplexArgs, i: usize, plan: &TruncationPlan, policy: DomainPolicy) -> Result<EvalReport> {
    let cs = build_constraints_s_i(s.shape(), i)?;
    let warnings = check_w(s, policy)?;
    let r = plan.run(|n| zeta_c_i_at(s, &cs, n))?;
    Ok(with_warnings(r, warnings))
}

/// Sum over the cyclic domain `S` of `n^{-s}`.
pub fn eval_zeta_c(s: &ComplexArgs, plan: &TruncationPlan, policy: DomainPolicy) -> Result<EvalReport> {
    let cs = build_constraints_s(s.shape());
    let warnings = check_w(s, policy)?;
    let exps = block_exponents(s);
    let r = plan.run(|n| sum_at(&cs, &exps, &[], n, EngineLimits::default()))?;
    Ok(with_warnings(r, warnings))
}

/// Both sides of the cyclic identity at one cutoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoremPoint {
    pub cutoff: u64,
    /// Sum of the termwise differences over every `S_{i,j}`.
    pub lhs: Complex64,
    /// Sum over `i` of the sums over `S_i`.
    pub rhs: Complex64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremResidual {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    pub cutoff: u64,
    /// One entry per refinement cutoff (empty without refinements).
    pub refinements: Vec<TheoremPoint>,
    pub warnings: Vec<String>,
}

impl TheoremResidual {
    pub fn to_json(&self) -> serde_json::Value {
        let refinements: Vec<serde_json::Value> = self
            .refinements
            .iter()
            .map(|p| {
                json!({
                    "N": p.cutoff,
                    "lhs": [p.lhs.re, p.lhs.im],
                    "rhs": [p.rhs.re, p.rhs.im],
                    "residual": p.residual,
                })
            })
            .collect();
        let mut obj = json!({
            "lhs": [self.lhs.re, self.lhs.im],
            "rhs": [self.rhs.re, self.rhs.im],
            "residual": self.residual,
            "cutoff": self.cutoff,
            "refinements": refinements,
        });
        if !self.warnings.is_empty() {
            obj["warnings"] = json!(self.warnings);
        }
        obj
    }
}

/// Evaluates both sides of the cyclic identity at the same box truncation.
pub fn eval_theorem_residual(s: &ComplexArgs, plan: &TruncationPlan, policy: DomainPolicy) -> Result<TheoremResidual> {
    let shape = s.shape();
    let warnings = check_w(s, policy)?;
    let tilde_domains: Vec<((usize, usize), ConstraintSystem)> = shape
        .positions()
        .map(|(i, j)| build_constraints_s_ij(shape, i, j).map(|cs| ((i, j), cs)))
        .collect::<Result<_>>()?;
    let c_domains: Vec<ConstraintSystem> = (1..=shape.blocks())
        .map(|i| build_constraints_s_i(shape, i))
        .collect::<Result<_>>()?;
    let at = |n: u64| -> Result<TheoremPoint> {
        let mut lhs = Complex64::new(0.0, 0.0);
        for ((i, j), cs) in &tilde_domains {
            lhs += tilde_at(s, cs, *i, *j, TildeVariant::Diff, n)?;
        }
        let mut rhs = Complex64::new(0.0, 0.0);
        for cs in &c_domains {
            rhs += zeta_c_i_at(s, cs, n)?;
        }
        Ok(TheoremPoint {
            cutoff: n,
            lhs,
            rhs,
            residual: (lhs - rhs).norm(),
        })
    };
    let refinements: Vec<TheoremPoint> = plan.refinements().iter().map(|&n| at(n)).collect::<Result<_>>()?;
    let last = match refinements.last() {
        Some(p) => *p,
        None => at(plan.cutoff())?,
    };
    Ok(TheoremResidual {
        lhs: last.lhs,
        rhs: last.rhs,
        residual: last.residual,
        cutoff: last.cutoff,
        refinements,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZETA4: f64 = 1.082323233711138;

    fn args(s: &str) -> ComplexArgs {
        ComplexArgs::parse(s).unwrap()
    }

    fn plan(n: u64) -> TruncationPlan {
        TruncationPlan::new(n).unwrap()
    }

    #[test]
    fn harmonic_ranges() {
        assert_eq!(harmonic_range(1, 0), 0.0);
        assert!((harmonic_range(1, 3) - 11.0 / 6.0).abs() < 1e-15);
        let h = harmonic_table(5);
        assert_eq!(h_range(&h, 1, 0), 0.0);
        assert!((h_range(&h, -3, 3) - 11.0 / 6.0).abs() < 1e-15);
        assert!((h_range(&h, 2, 4) - harmonic_range(2, 4)).abs() < 1e-15);
    }

    #[test]
    fn single_summand_of_second_variant() {
        let r = eval_zeta_tilde(&args("2"), 1, 1, TildeVariant::Second, &plan(2), DomainPolicy::Strict).unwrap();
        assert!((r.value.re - 0.25).abs() < 1e-15);
    }

    #[test]
    fn depth_one_tilde_tends_to_shifted_zeta() {
        let r = eval_zeta_tilde(&args("3"), 1, 1, TildeVariant::Diff, &plan(2000), DomainPolicy::Strict).unwrap();
        assert!((r.value.re - ZETA4).abs() < 5e-3, "{}", r.value);
    }

    #[test]
    fn zeta_c_examples() {
        let r = eval_zeta_c_i(&args("3"), 1, &plan(100_000), DomainPolicy::Strict).unwrap();
        assert!((r.value.re - ZETA4).abs() < 1e-9);
        let r = eval_zeta_c(&args("2;2"), &plan(1000), DomainPolicy::Strict).unwrap();
        let direct: f64 = (1..=1000).map(|x| (x as f64).powi(-4)).sum();
        assert!((r.value.re - direct).abs() < 1e-12);
        let s = args("1.5,2.5");
        let r = eval_zeta_c(&s, &plan(300), DomainPolicy::Strict).unwrap();
        let chain = super::super::mzf_partial(s.values(), 300).unwrap();
        assert!((r.value - chain).norm() < 1e-12);
    }

    #[test]
    fn domain_violation_names_the_inequality() {
        let err = eval_zeta_c(&args("0.5,1.2"), &plan(10), DomainPolicy::Strict).unwrap_err();
        assert!(err.to_string().contains("Re(s_{1,1})+Re(s_{1,2})"));
        let r = eval_zeta_c(&args("0.5,1.2"), &plan(10), DomainPolicy::Warn).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn diff_is_difference_of_variants() {
        let s = args("1.5,2.5;1.7");
        for (i, j) in s.shape().positions().collect::<Vec<_>>() {
            let f = |v| eval_zeta_tilde(&s, i, j, v, &plan(60), DomainPolicy::Strict).unwrap().value;
            let d = f(TildeVariant::First) - f(TildeVariant::Second) - f(TildeVariant::Diff);
            assert!(d.norm() < 1e-12, "({i},{j}): {d}");
        }
    }

    #[test]
    fn theorem_residual_depth_one() {
        let p = TruncationPlan::with_refinements(vec![125, 250, 500, 1000]).unwrap();
        let t = eval_theorem_residual(&args("3"), &p, DomainPolicy::Strict).unwrap();
        let r: Vec<f64> = t.refinements.iter().map(|p| p.residual).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]), "{r:?}");
        assert!((t.rhs.re - ZETA4).abs() < 1e-8);
    }

    #[test]
    fn harmonic_diff_is_rejected() {
        assert!(eval_zeta_tilde_harmonic(&args("3"), 1, 1, TildeVariant::Diff, &plan(5), DomainPolicy::Strict).is_err());
    }
}
