use serde::Serialize;

use super::{enumerate_family, generate, rank_exact, relation_matrix, Family, Relation};
use crate::error::{Error, Result};

/// Number of independent relations among MZVs of weight 3..=11, from the
/// known dimension conjecture; reported for comparison only, never computed.
pub const ALL_RELATIONS_REFERENCE: [(u32, u64); 9] = [
    (3, 1),
    (4, 3),
    (5, 6),
    (6, 14),
    (7, 29),
    (8, 60),
    (9, 123),
    (10, 249),
    (11, 503),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Table1Row {
    pub weight: u32,
    pub csf: Option<usize>,
    pub derivation: Option<usize>,
    pub cyclic: Option<usize>,
    /// Reference value, not computed.
    pub all_reference: Option<u64>,
}

impl Table1Row {
    pub fn get(&self, f: Family) -> Option<usize> {
        match f {
            Family::Csf => self.csf,
            Family::Derivation => self.derivation,
            Family::Cyclic => self.cyclic,
        }
    }
}

/// Exact ranks of the requested families at each weight.
pub fn table1(
    weights: std::ops::RangeInclusive<u32>,
    families: &[Family],
    include_d1_derivation: bool,
) -> Result<Vec<Table1Row>> {
    if *weights.end() > 11 {
        return Err(Error::Budget(format!(
            "weight {} is beyond the supported range (at most 11)",
            weights.end()
        )));
    }
    let mut out = Vec::new();
    for w in weights {
        let mut row = Table1Row {
            weight: w,
            csf: None,
            derivation: None,
            cyclic: None,
            all_reference: ALL_RELATIONS_REFERENCE.iter().find(|(x, _)| *x == w).map(|(_, n)| *n),
        };
        for &f in families {
            let rels: Vec<Relation> = enumerate_family(w, f, include_d1_derivation)?
                .iter()
                .map(|k| generate(f, k))
                .collect::<Result<_>>()?;
            let rank = rank_exact(&relation_matrix(&rels)?)?;
            match f {
                Family::Csf => row.csf = Some(rank),
                Family::Derivation => row.derivation = Some(rank),
                Family::Cyclic => row.cyclic = Some(rank),
            }
        }
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_three_to_five() {
        let t = table1(3..=5, &Family::ALL, true).unwrap();
        let got: Vec<(Option<usize>, Option<usize>, Option<usize>)> =
            t.iter().map(|r| (r.csf, r.derivation, r.cyclic)).collect();
        assert_eq!(
            got,
            vec![(Some(1), Some(1), Some(1)), (Some(2), Some(2), Some(2)), (Some(4), Some(5), Some(5))]
        );
        assert_eq!(t[2].all_reference, Some(6));
    }

    #[test]
    fn weight_cap() {
        assert!(matches!(table1(3..=12, &[Family::Csf], true), Err(Error::Budget(_))));
    }
}
