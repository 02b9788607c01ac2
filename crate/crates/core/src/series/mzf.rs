use num_complex::Complex64;

use super::engine::power_table;
use super::{EvalReport, TruncationPlan};
use crate::error::{Error, Result};
use crate::model::ez_inequalities;

/// What to do when arguments fall outside the convergence domain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DomainPolicy {
    #[default]
    Strict,
    /// Evaluate anyway and record a warning in the report.
    Warn,
}

/// `sum_{1 <= n_1 < ... < n_r <= N} n_1^{-s_1} ... n_r^{-s_r}` in `O(N r)`.
pub fn mzf_partial(s: &[Complex64], n: u64) -> Result<Complex64> {
    if s.is_empty() {
        return Err(Error::Invalid("empty argument list".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    // acc[x - 1]: sum over chains of the first k arguments ending at x.
    let mut acc = power_table(s[0], n);
    for &sk in &s[1..] {
        let pw = power_table(sk, n);
        let mut below = zero;
        for (a, p) in acc.iter_mut().zip(&pw) {
            let prev = *a;
            *a = below * p;
            below += prev;
        }
    }
    Ok(acc.iter().sum())
}

pub fn eval_mzf(s: &[Complex64], plan: &TruncationPlan, policy: DomainPolicy) -> Result<EvalReport> {
    if s.is_empty() {
        return Err(Error::Invalid("empty argument list".into()));
    }
    let failed: Vec<String> = ez_inequalities(s)
        .iter()
        .filter(|q| !q.holds)
        .map(|q| q.to_string())
        .collect();
    if !failed.is_empty() && policy == DomainPolicy::Strict {
        return Err(Error::Domain(failed.join("; ")));
    }
    let mut report = plan.run(|n| mzf_partial(s, n))?;
    report.warnings.extend(failed.into_iter().map(|f| format!("outside domain: {f}")));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zeta_two() {
        let r = eval_mzf(&[c(2.0, 0.0)], &TruncationPlan::new(1_000_000).unwrap(), DomainPolicy::Strict).unwrap();
        assert!((r.value.re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-6 + 1e-12);
    }

    #[test]
    fn euler_sum_matches_zeta_three() {
        let r = eval_mzf(&[c(1.0, 0.0), c(2.0, 0.0)], &TruncationPlan::new(1_000_000).unwrap(), DomainPolicy::Strict)
            .unwrap();
        assert!((r.value.re - 1.2020569031595942).abs() < 2e-5);
    }

    #[test]
    fn complex_argument_converges() {
        let r = eval_mzf(&[c(2.0, 1.0)], &TruncationPlan::new(100_000).unwrap(), DomainPolicy::Strict).unwrap();
        assert!(r.value.re.is_finite() && r.value.im.is_finite());
        assert!(r.residual < 1e-4);
    }

    #[test]
    fn matches_brute_force() {
        let s = [c(1.3, 0.2), c(0.7, -0.4), c(2.1, 0.0)];
        let n = 12u64;
        let mut brute = c(0.0, 0.0);
        for a in 1..=n {
            for b in a + 1..=n {
                for d in b + 1..=n {
                    let t = |x: u64, e: Complex64| (-e * (x as f64).ln()).exp();
                    brute += t(a, s[0]) * t(b, s[1]) * t(d, s[2]);
                }
            }
        }
        assert!((mzf_partial(&s, n).unwrap() - brute).norm() < 1e-13);
    }

    #[test]
    fn domain_policy() {
        let plan = TruncationPlan::new(10).unwrap();
        let err = eval_mzf(&[c(1.0, 0.0)], &plan, DomainPolicy::Strict).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let r = eval_mzf(&[c(1.0, 0.0)], &plan, DomainPolicy::Warn).unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert!(eval_mzf(&[], &plan, DomainPolicy::Warn).is_err());
    }

    #[test]
    fn conjugation_is_exact() {
        let s = [c(1.4, 0.3), c(1.9, -1.1)];
        let a = mzf_partial(&s, 500).unwrap();
        let b = mzf_partial(&[s[0].conj(), s[1].conj()], 500).unwrap();
        assert_eq!(a.conj(), b);
    }
}
