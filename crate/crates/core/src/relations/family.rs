use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{is_integer_point_in_w, IntArgs, Shape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Every shape and integer point of the convergence domain.
    Cyclic,
    /// All-singleton shapes: the cyclic sum formula.
    Csf,
    /// One arbitrary block followed by singleton blocks of value 1.
    Derivation,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Csf, Family::Derivation, Family::Cyclic];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cyclic => "cyclic",
            Family::Csf => "csf",
            Family::Derivation => "derivation",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(Family::Cyclic),
            "csf" => Ok(Family::Csf),
            "derivation" => Ok(Family::Derivation),
            _ => Err(Error::Parse(format!(
                "unknown family {s:?} (expected cyclic, csf or derivation)"
            ))),
        }
    }
}

/// Compositions of `total` into exactly `parts` positive parts, in
/// lexicographic order.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn rec(left: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 0 {
            if left == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let max = left.saturating_sub(parts as u32 - 1);
        for k in 1..=max {
            prefix.push(k);
            rec(left - k, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        rec(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

/// Block shapes with `d` blocks and total depth at most `max_total`,
/// ordered by the depth list.
fn shapes_with_blocks(d: usize, max_total: usize) -> Vec<Vec<usize>> {
    (d..=max_total)
        .flat_map(|t| compositions(t as u32, d))
        .map(|c| c.into_iter().map(|r| r as usize).collect::<Vec<usize>>())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Configurations `(shape, k)` with `sum k = weight - 1` in the integer
/// convergence domain, ordered by block count, then shape, then `k`.
///
/// `include_d1_derivation` keeps the one-block configurations in the
/// derivation family, where there are no singleton blocks of value 1.
pub fn enumerate_family(weight: u32, family: Family, include_d1_derivation: bool) -> Result<Vec<IntArgs>> {
    if weight < 3 {
        return Err(Error::Invalid(format!("weight must be at least 3, got {weight}")));
    }
    let total = weight - 1;
    let max_depth = (weight - 2) as usize;
    let mut out = Vec::new();
    for d in 1..=max_depth {
        for depths in shapes_with_blocks(d, max_depth) {
            let shape = Shape::new(depths.clone())?;
            let keep_shape = match family {
                Family::Cyclic => true,
                Family::Csf => shape.is_all_singleton(),
                Family::Derivation => depths[1..].iter().all(|&r| r == 1) && (d > 1 || include_d1_derivation),
            };
            if !keep_shape {
                continue;
            }
            for k in compositions(total, shape.total_depth()) {
                if family == Family::Derivation && k[depths[0]..].iter().any(|&x| x != 1) {
                    continue;
                }
                let args = IntArgs::new(shape.clone(), k)?;
                if is_integer_point_in_w(&args) {
                    out.push(args);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn listed(w: u32, f: Family) -> Vec<String> {
        enumerate_family(w, f, true)
            .unwrap()
            .iter()
            .map(|k| k.to_string())
            .collect()
    }

    #[test]
    fn small_weights() {
        assert_eq!(listed(3, Family::Csf), vec!["2"]);
        assert_eq!(listed(3, Family::Cyclic), vec!["2"]);
        assert_eq!(listed(3, Family::Derivation), vec!["2"]);
        assert_eq!(listed(4, Family::Csf), vec!["3", "1;2", "2;1"]);
        assert!(enumerate_family(2, Family::Csf, true).is_err());
    }

    #[test]
    fn derivation_shapes() {
        let d = listed(5, Family::Derivation);
        assert!(d.iter().all(|k| k.split(';').skip(1).all(|b| b == "1")));
        assert!(d.contains(&"1,3".to_string()));
        assert!(d.contains(&"3;1".to_string()));
        assert!(!d.contains(&"1;3".to_string()));
        let without = enumerate_family(5, Family::Derivation, false).unwrap();
        assert!(without.iter().all(|k| k.shape().blocks() > 1));
    }

    #[test]
    fn families_nest() {
        for w in 3..=7 {
            let cyc = enumerate_family(w, Family::Cyclic, true).unwrap();
            for f in [Family::Csf, Family::Derivation] {
                for k in enumerate_family(w, f, true).unwrap() {
                    assert!(cyc.contains(&k), "{k} missing from cyclic at weight {w}");
                }
            }
        }
    }

    #[test]
    fn compositions_are_lexicographic() {
        assert_eq!(compositions(4, 2), vec![vec![1, 3], vec![2, 2], vec![3, 1]]);
        assert!(compositions(2, 3).is_empty());
    }
}
