//! Membership tests for the convergence domains.
//!
//! Comparisons are exact IEEE comparisons on sums of real parts, with no
//! tolerance.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use super::{ComplexArgs, IntArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DomainKind {
    /// `W` for a shape that is not all singletons.
    WGeneral,
    /// `W` for the all-singleton shape `(1, ..., 1)`.
    WAllSingleton,
    /// Absolute convergence domain of the Euler-Zagier series.
    EzAbsolute,
}

/// One defining inequality `sum of Re(terms) > threshold` (or `>=`),
/// evaluated at a point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inequality {
    /// Human-readable left-hand side, e.g. `Re(s_{1,1})+Re(s_{1,2})`.
    pub lhs: String,
    pub value: f64,
    pub threshold: f64,
    pub strict: bool,
    pub holds: bool,
}

impl Inequality {
    fn new(lhs: String, value: f64, threshold: f64, strict: bool) -> Self {
        let holds = if strict { value > threshold } else { value >= threshold };
        Inequality {
            lhs,
            value,
            threshold,
            strict,
            holds,
        }
    }

    pub fn margin(&self) -> f64 {
        self.value - self.threshold
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match (self.holds, self.strict) {
            (true, true) => ">",
            (true, false) => ">=",
            (false, true) => "<=",
            (false, false) => "<",
        };
        write!(f, "{} = {} {} {}", self.lhs, self.value, op, self.threshold)
    }
}

pub fn domain_kind(s: &ComplexArgs) -> DomainKind {
    if s.shape().is_all_singleton() {
        DomainKind::WAllSingleton
    } else {
        DomainKind::WGeneral
    }
}

fn label(terms: &[(usize, usize)]) -> String {
    terms
        .iter()
        .map(|(i, j)| format!("Re(s_{{{i},{j}}})"))
        .collect::<Vec<_>>()
        .join("+")
}

/// Every inequality defining `W` for the shape of `s`, evaluated at `s`.
pub fn w_inequalities(s: &ComplexArgs) -> Vec<Inequality> {
    let shape = s.shape();
    let mut out = Vec::new();
    if shape.is_all_singleton() {
        let d = shape.blocks();
        let all: Vec<(usize, usize)> = (1..=d).map(|i| (i, 1)).collect();
        let total: f64 = all.iter().map(|&(i, j)| s.get(i, j).re).sum();
        out.push(Inequality::new(label(&all), total, d as f64, true));
        // Cyclic windows s(l, l+w) of length w+1 <= d-1.
        for w in 0..d.saturating_sub(1) {
            for l in 1..=d {
                let terms: Vec<(usize, usize)> =
                    (l..=l + w).map(|m| ((m - 1) % d + 1, 1)).collect();
                let value: f64 = terms.iter().map(|&(i, j)| s.get(i, j).re).sum();
                out.push(Inequality::new(label(&terms), value, w as f64, true));
            }
        }
    } else {
        for i in 1..=shape.blocks() {
            let r = shape.depth(i);
            if r == 1 {
                out.push(Inequality::new(label(&[(i, 1)]), s.get(i, 1).re, 1.0, false));
                continue;
            }
            // Suffix sums Re(s_{i,l}) + ... + Re(s_{i,r}) > r - l + 1.
            for l in (1..=r).rev() {
                let terms: Vec<(usize, usize)> = (l..=r).map(|j| (i, j)).collect();
                let value: f64 = terms.iter().map(|&(a, b)| s.get(a, b).re).sum();
                out.push(Inequality::new(label(&terms), value, (r - l + 1) as f64, true));
            }
        }
    }
    out
}

pub fn in_domain_w(s: &ComplexArgs) -> bool {
    w_inequalities(s).iter().all(|q| q.holds)
}

/// Inequalities `Re(s_l + ... + s_r) > r - l + 1` for the Euler-Zagier series.
pub fn ez_inequalities(s: &[Complex64]) -> Vec<Inequality> {
    let r = s.len();
    let mut out = Vec::new();
    for l in (1..=r).rev() {
        let value: f64 = s[l - 1..].iter().map(|z| z.re).sum();
        let lhs = (l..=r)
            .map(|m| format!("Re(s_{m})"))
            .collect::<Vec<_>>()
            .join("+");
        out.push(Inequality::new(lhs, value, (r - l + 1) as f64, true));
    }
    out
}

pub fn in_domain_ez_absolute(s: &[Complex64]) -> bool {
    !s.is_empty() && ez_inequalities(s).iter().all(|q| q.holds)
}

/// Integer-point membership in `W`, by the closed characterization: every
/// block of depth at least two ends in an entry at least 2, or, for the
/// all-singleton shape, the total exceeds `d`.
pub fn is_integer_point_in_w(k: &IntArgs) -> bool {
    let shape = k.shape();
    if shape.is_all_singleton() {
        k.weight() as usize > shape.blocks()
    } else {
        (1..=shape.blocks()).all(|i| {
            let b = k.block(i);
            b.len() < 2 || b[b.len() - 1] >= 2
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Shape;

    fn args(shape: &str, vals: &[(f64, f64)]) -> ComplexArgs {
        ComplexArgs::new(
            shape.parse().unwrap(),
            vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn w_examples() {
        assert!(in_domain_w(&args("1", &[(2.5, 0.0)])));
        assert!(!in_domain_w(&args("2", &[(0.5, 0.0), (1.2, 0.0)])));
        assert!(in_domain_w(&args("1,1", &[(1.5, 0.0), (1.6, 1.0)])));
    }

    #[test]
    fn w_failure_is_named() {
        let q = w_inequalities(&args("2", &[(0.5, 0.0), (1.2, 0.0)]));
        let failed: Vec<String> = q.iter().filter(|q| !q.holds).map(|q| q.to_string()).collect();
        assert_eq!(failed, vec!["Re(s_{1,1})+Re(s_{1,2}) = 1.7 <= 2"]);
    }

    #[test]
    fn singleton_block_boundary_is_closed() {
        // Mixed shape: singleton blocks need Re >= 1, boundary included.
        assert!(in_domain_w(&args("2,1", &[(1.2, 0.0), (2.2, 0.0), (1.0, 0.0)])));
        assert!(!in_domain_w(&args("2,1", &[(1.2, 0.0), (2.2, 0.0), (0.999, 0.0)])));
    }

    #[test]
    fn all_singleton_windows() {
        // d = 3: total > 3, each entry > 0, each adjacent pair > 1.
        assert!(in_domain_w(&args("1,1,1", &[(0.2, 0.0), (0.9, 0.0), (2.0, 0.0)])));
        // Pair s_1 + s_2 = 1.0 fails the strict window bound.
        assert!(!in_domain_w(&args("1,1,1", &[(0.1, 0.0), (0.9, 0.0), (2.1, 0.0)])));
        // Wrap-around window s_3 + s_1.
        assert!(!in_domain_w(&args("1,1,1", &[(0.5, 0.0), (2.5, 0.0), (0.5, 0.0)])));
    }

    #[test]
    fn ez_examples() {
        let c = |v: &[f64]| v.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
        assert!(in_domain_ez_absolute(&c(&[2.5])));
        assert!(in_domain_ez_absolute(&c(&[1.0, 2.0])));
        assert!(!in_domain_ez_absolute(&c(&[0.0, 1.5])));
        assert!(!in_domain_ez_absolute(&[]));
    }

    #[test]
    fn integer_examples() {
        let k = |s: &str| IntArgs::parse(s).unwrap();
        assert!(is_integer_point_in_w(&k("1,2")));
        assert!(!is_integer_point_in_w(&k("2,1")));
        assert!(!is_integer_point_in_w(&k("1;1")));
        assert!(is_integer_point_in_w(&k("1;2")));
        assert!(!is_integer_point_in_w(&k("1")));
    }

    fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
        if parts == 1 {
            return vec![vec![total]];
        }
        (1..=total + 1 - parts)
            .flat_map(|a| {
                compositions(total - a, parts - 1).into_iter().map(move |mut rest| {
                    rest.insert(0, a);
                    rest
                })
            })
            .collect()
    }

    #[test]
    fn integer_characterization_agrees_exhaustively() {
        for t in 1..=5 {
            for d in 1..=t {
                for depths in compositions(t, d) {
                    let shape = Shape::new(depths).unwrap();
                    let mut vals = vec![1u32; t];
                    loop {
                        let k = IntArgs::new(shape.clone(), vals.clone()).unwrap();
                        assert_eq!(
                            is_integer_point_in_w(&k),
                            in_domain_w(&k.to_complex()),
                            "{shape} {k}"
                        );
                        let mut p = 0;
                        while p < t && vals[p] == 4 {
                            vals[p] = 1;
                            p += 1;
                        }
                        if p == t {
                            break;
                        }
                        vals[p] += 1;
                    }
                }
            }
        }
    }
}
