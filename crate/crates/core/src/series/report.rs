use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};

/// Box-truncation cutoffs: every summation variable ranges over `1..=N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationPlan {
    cutoff: u64,
    refinements: Vec<u64>,
}

impl TruncationPlan {
    pub fn new(cutoff: u64) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::Invalid("cutoff must be at least 1".into()));
        }
        Ok(TruncationPlan {
            cutoff,
            refinements: Vec::new(),
        })
    }

    /// A plan evaluated at each listed cutoff; the last one is the cutoff.
    pub fn with_refinements(list: Vec<u64>) -> Result<Self> {
        let Some(&last) = list.last() else {
            return Err(Error::Invalid("refinement list is empty".into()));
        };
        if list[0] == 0 || list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Invalid(format!(
                "refinement cutoffs must be positive and strictly increasing, got {list:?}"
            )));
        }
        Ok(TruncationPlan {
            cutoff: last,
            refinements: list,
        })
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn refinements(&self) -> &[u64] {
        &self.refinements
    }

    /// Cutoffs to evaluate: refinements, or the cutoff and its half.
    fn schedule(&self) -> Vec<u64> {
        let half = self.cutoff / 2;
        let mut out = self.refinements.clone();
        if out.is_empty() {
            out.push(self.cutoff);
        }
        if half >= 1 && !out.contains(&half) {
            out.push(half);
        }
        out.sort_unstable();
        out
    }

    /// Evaluates `f` at every scheduled cutoff and assembles the report.
    pub fn run(&self, mut f: impl FnMut(u64) -> Result<Complex64>) -> Result<EvalReport> {
        let mut values = Vec::new();
        for n in self.schedule() {
            values.push((n, f(n)?));
        }
        let at = |n: u64| values.iter().find(|(m, _)| *m == n).map(|(_, v)| *v);
        let value = at(self.cutoff).expect("cutoff is scheduled");
        let residual = match at(self.cutoff / 2) {
            Some(h) => (value - h).norm(),
            None => f64::NAN,
        };
        let refinements = self
            .refinements
            .iter()
            .map(|&n| (n, at(n).expect("refinement is scheduled")))
            .collect();
        Ok(EvalReport {
            value,
            cutoff: self.cutoff,
            refinements,
            residual,
            warnings: Vec::new(),
        })
    }
}

/// A truncated series value with convergence diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub value: Complex64,
    pub cutoff: u64,
    /// `(N, value at N)` for each requested refinement.
    pub refinements: Vec<(u64, Complex64)>,
    /// Heuristic tail estimate `|value(N) - value(N/2)|` (NaN when `N = 1`).
    pub residual: f64,
    pub warnings: Vec<String>,
}

impl EvalReport {
    /// Residual estimate at each refinement: `|v(N_k) - v(N_{k-1})|`.
    pub fn refinement_deltas(&self) -> Vec<f64> {
        self.refinements
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).norm())
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let refinements: Vec<serde_json::Value> = self
            .refinements
            .iter()
            .map(|(n, v)| json!([n, v.re, v.im]))
            .collect();
        let mut obj = json!({
            "value": [self.value.re, self.value.im],
            "cutoff": self.cutoff,
            "refinements": refinements,
            "residual": if self.residual.is_finite() { json!(self.residual) } else { json!(null) },
        });
        if !self.warnings.is_empty() {
            obj["warnings"] = json!(self.warnings);
        }
        obj
    }
}
