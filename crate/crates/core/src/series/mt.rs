use num_complex::Complex64;

use super::engine::power_table;
use super::mzf::mzf_partial;
use super::{EvalReport, TruncationPlan};
use crate::error::{Error, Result};

/// Box-truncated `sum_{m,n <= N} m^{-s1} n^{-s2} (m+n)^{-s3}`.
pub fn eval_mordell_tornheim(s1: Complex64, s2: Complex64, s3: Complex64, plan: &TruncationPlan) -> Result<EvalReport> {
    let mut report = plan.run(|n| {
        let len = usize::try_from(n).map_err(|_| Error::Budget(format!("cutoff {n} too large")))?;
        if (len as u128).pow(2) > 1_000_000_000 {
            return Err(Error::Budget(format!("double sum at N = {n} exceeds the enumeration cap")));
        }
        let p1 = power_table(s1, n);
        let p2 = power_table(s2, n);
        let p3 = power_table(s3, 2 * n);
        let mut total = Complex64::new(0.0, 0.0);
        for (m, a) in p1.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for (k, b) in p2.iter().enumerate() {
                // (m + 1) + (k + 1) is at index m + k + 1.
                row += b * p3[m + k + 1];
            }
            total += a * row;
        }
        Ok(total)
    })?;
    let (r1, r2, r3) = (s1.re, s2.re, s3.re);
    if !(r1 + r3 > 1.0 && r2 + r3 > 1.0 && r1 + r2 + r3 > 2.0) {
        report
            .warnings
            .push(format!("arguments ({s1}, {s2}, {s3}) may lie outside the region of absolute convergence"));
    }
    Ok(report)
}

/// `|Z(s1) Z(s2) - Z(s1,s2) - Z(s2,s1) - Z(s1+s2)|` with every series
/// truncated at `n`. Under box truncation this is an exact identity of finite
/// sums, so the value is pure rounding error.
pub fn harmonic_relation_check(s1: Complex64, s2: Complex64, n: u64) -> Result<f64> {
    let z = |s: &[Complex64]| mzf_partial(s, n);
    let lhs = z(&[s1])? * z(&[s2])?;
    let rhs = z(&[s1, s2])? + z(&[s2, s1])? + z(&[s1 + s2])?;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn separable_case() {
        let n = 5;
        let r = eval_mordell_tornheim(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), &TruncationPlan::new(n).unwrap()).unwrap();
        let partial: f64 = (1..=n).map(|x| (x as f64).powi(-2)).sum();
        assert!((r.value.re - partial * n as f64).abs() < 1e-12);
    }

    #[test]
    fn matches_brute_force() {
        let s = (c(1.2, 0.5), c(0.8, 0.0), c(1.1, -0.3));
        let n = 9u64;
        let pw = |x: u64, e: Complex64| (-e * (x as f64).ln()).exp();
        let mut brute = c(0.0, 0.0);
        for a in 1..=n {
            for b in 1..=n {
                brute += pw(a, s.0) * pw(b, s.1) * pw(a + b, s.2);
            }
        }
        let r = eval_mordell_tornheim(s.0, s.1, s.2, &TruncationPlan::new(n).unwrap()).unwrap();
        assert!((r.value - brute).norm() < 1e-13);
    }

    #[test]
    fn stable_under_refinement() {
        let r = eval_mordell_tornheim(c(2.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), &TruncationPlan::new(2000).unwrap())
            .unwrap();
        assert!(r.residual < 1e-5, "{}", r.residual);
    }

    #[test]
    fn harmonic_relation() {
        assert!(harmonic_relation_check(c(2.0, 0.0), c(2.0, 0.0), 10_000).unwrap() < 1e-3);
        assert!(harmonic_relation_check(c(2.0, 0.0), c(3.0, 1.0), 10_000).unwrap() < 1e-3);
        // At N = 1 both double sums are empty: 1 * 1 - 0 - 0 - 1 = 0.
        assert_eq!(harmonic_relation_check(c(2.0, 0.0), c(2.0, 0.0), 1).unwrap(), 0.0);
    }
}
