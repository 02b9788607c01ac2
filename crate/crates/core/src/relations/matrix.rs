use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::json;

use super::{Family, Provenance, Relation};
use crate::error::{Error, Result};
use crate::poset::{Composition, SymbolCombination};

/// Relations as sparse integer rows over a sorted list of symbols.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationMatrix {
    /// Common weight of the symbols; `None` for a matrix without symbols.
    pub weight: Option<u32>,
    pub symbols: Vec<Composition>,
    /// `(column, coefficient)` pairs with nonzero coefficients, by column.
    pub rows: Vec<Vec<(usize, BigInt)>>,
}

impl RelationMatrix {
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.symbols.len()
    }

    fn dense(&self) -> Vec<Vec<BigInt>> {
        self.rows
            .iter()
            .map(|row| {
                let mut d = vec![BigInt::zero(); self.ncols()];
                for (c, k) in row {
                    d[*c] = k.clone();
                }
                d
            })
            .collect()
    }
}

/// Builds the matrix of `rels`, with columns the sorted union of symbols.
pub fn relation_matrix(rels: &[Relation]) -> Result<RelationMatrix> {
    let mut weight: Option<u32> = None;
    let mut columns: BTreeMap<Composition, usize> = BTreeMap::new();
    for r in rels {
        for (c, _) in r.combo.iter() {
            match weight {
                None => weight = Some(c.weight()),
                Some(w) if w != c.weight() => return Err(Error::MixedWeights(w, c.weight())),
                _ => {}
            }
            columns.insert(c.clone(), 0);
        }
    }
    for (n, slot) in columns.values_mut().enumerate() {
        *slot = n;
    }
    let rows = rels
        .iter()
        .map(|r| r.combo.iter().map(|(c, k)| (columns[c], k.clone())).collect())
        .collect();
    Ok(RelationMatrix {
        weight,
        symbols: columns.into_keys().collect(),
        rows,
    })
}

/// Primes above `2^60` used to re-verify exact ranks.
pub const VERIFY_PRIMES: [u64; 2] = [(1 << 61) - 1, (1 << 62) - 57];

/// Rank over the rationals by fraction-free (Bareiss) elimination, checked
/// against the rank modulo each of [`VERIFY_PRIMES`].
pub fn rank_exact(m: &RelationMatrix) -> Result<usize> {
    let rank = bareiss_rank(m.dense())?;
    for p in VERIFY_PRIMES {
        let r = rank_mod_p(m, p);
        if r != rank {
            return Err(Error::Internal(format!(
                "exact rank {rank} disagrees with rank {r} modulo {p}"
            )));
        }
    }
    Ok(rank)
}

fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> Result<usize> {
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for c in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        let pivot = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let factor = std::mem::take(&mut row[c]);
            for cc in c + 1..ncols {
                let num = &pivot * &row[cc] - &factor * &pivot_row[cc];
                let (q, rem) = num.div_rem(&prev);
                if !rem.is_zero() {
                    return Err(Error::Internal("inexact division in fraction-free elimination".into()));
                }
                row[cc] = q;
            }
        }
        prev = pivot;
        rank += 1;
    }
    Ok(rank)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Rank of the matrix reduced modulo the prime `p`.
pub fn rank_mod_p(m: &RelationMatrix, p: u64) -> usize {
    let big_p = BigInt::from(p);
    let mut a: Vec<Vec<u64>> = m
        .dense()
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| x.mod_floor(&big_p).to_u64().expect("reduced below p"))
                .collect()
        })
        .collect();
    let nrows = a.len();
    let ncols = m.ncols();
    let mut rank = 0;
    for c in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(piv) = (rank..nrows).find(|&r| a[r][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = pow_mod(a[rank][c], p - 2, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in rest.iter_mut() {
            if row[c] == 0 {
                continue;
            }
            let f = mul_mod(row[c], inv, p);
            for cc in c..ncols {
                let sub = mul_mod(f, pivot_row[cc], p);
                row[cc] = (row[cc] + p - sub) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// A set of relations of one weight and family, as stored on disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationSet {
    pub weight: u32,
    pub family: Family,
    pub relations: Vec<Relation>,
}

impl RelationSet {
    pub fn matrix(&self) -> Result<RelationMatrix> {
        relation_matrix(&self.relations)
    }

    /// `{weight, family, symbols, rows: [{provenance, entries: [[col, "coeff"]]}]}`.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let m = self.matrix()?;
        let rows: Vec<serde_json::Value> = self
            .relations
            .iter()
            .zip(&m.rows)
            .map(|(r, row)| {
                let entries: Vec<serde_json::Value> =
                    row.iter().map(|(c, k)| json!([c, k.to_string()])).collect();
                json!({ "provenance": r.provenance.to_json(), "entries": entries })
            })
            .collect();
        let symbols: Vec<String> = m.symbols.iter().map(|c| c.to_string()).collect();
        Ok(json!({
            "weight": self.weight,
            "family": self.family.name(),
            "symbols": symbols,
            "rows": rows,
        }))
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("relation set: {what}"));
        let weight = v["weight"]
            .as_u64()
            .and_then(|w| u32::try_from(w).ok())
            .ok_or_else(|| bad("weight must be a non-negative integer"))?;
        let family: Family = v["family"].as_str().ok_or_else(|| bad("family must be a string"))?.parse()?;
        let symbols: Vec<Composition> = v["symbols"]
            .as_array()
            .ok_or_else(|| bad("symbols must be an array"))?
            .iter()
            .map(|s| s.as_str().ok_or_else(|| bad("symbol must be a string"))?.parse())
            .collect::<Result<_>>()?;
        if let Some(c) = symbols.iter().find(|c| c.weight() != weight) {
            return Err(bad(&format!("symbol {c} does not have weight {weight}")));
        }
        let mut relations = Vec::new();
        for row in v["rows"].as_array().ok_or_else(|| bad("rows must be an array"))? {
            let provenance = Provenance::from_json(&row["provenance"])?;
            let mut combo = SymbolCombination::new();
            for e in row["entries"].as_array().ok_or_else(|| bad("entries must be an array"))? {
                let col = e[0]
                    .as_u64()
                    .and_then(|c| symbols.get(c as usize))
                    .ok_or_else(|| bad("entry column out of range"))?;
                let k: BigInt = e[1]
                    .as_str()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad("entry coefficient must be a decimal string"))?;
                combo.add_term(col.clone(), k);
            }
            relations.push(Relation { combo, provenance });
        }
        Ok(RelationSet {
            weight,
            family,
            relations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IntArgs;
    use crate::relations::cyclic_relation;

    fn euler() -> Relation {
        cyclic_relation(&IntArgs::parse("2").unwrap()).unwrap()
    }

    #[test]
    fn euler_matrix() {
        let m = relation_matrix(&[euler()]).unwrap();
        assert_eq!(m.symbols.iter().map(|c| c.to_string()).collect::<Vec<_>>(), vec!["1,2", "3"]);
        assert_eq!(m.rows[0], vec![(0, BigInt::from(1)), (1, BigInt::from(-1))]);
        assert_eq!(rank_exact(&m).unwrap(), 1);
        let twice = relation_matrix(&[euler(), euler()]).unwrap();
        assert_eq!((twice.nrows(), twice.ncols()), (2, 2));
        assert_eq!(rank_exact(&twice).unwrap(), 1);
    }

    #[test]
    fn empty_and_zero() {
        let m = relation_matrix(&[]).unwrap();
        assert_eq!(rank_exact(&m).unwrap(), 0);
        let zero = RelationMatrix {
            weight: Some(3),
            symbols: vec!["3".parse().unwrap()],
            rows: vec![vec![], vec![]],
        };
        assert_eq!(rank_exact(&zero).unwrap(), 0);
    }

    #[test]
    fn mixed_weights_rejected() {
        let other = cyclic_relation(&IntArgs::parse("3").unwrap()).unwrap();
        assert!(matches!(relation_matrix(&[euler(), other]), Err(Error::MixedWeights(3, 4))));
    }

    #[test]
    fn bareiss_on_known_ranks() {
        let m = |rows: Vec<Vec<i64>>| rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        assert_eq!(bareiss_rank(m(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]])).unwrap(), 2);
        assert_eq!(bareiss_rank(m(vec![vec![0, 0, 1], vec![0, 2, 0], vec![3, 0, 0]])).unwrap(), 3);
        assert_eq!(bareiss_rank(m(vec![vec![0, 1, 1], vec![0, 1, 1], vec![0, 0, 5], vec![0, 7, 2]])).unwrap(), 2);
    }

    #[test]
    fn verification_primes_are_prime() {
        // Miller-Rabin with the deterministic base set for 64-bit integers.
        for p in VERIFY_PRIMES {
            assert!(p > 1 << 60);
            let (mut d, mut s) = (p - 1, 0);
            while d % 2 == 0 {
                d /= 2;
                s += 1;
            }
            for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
                let mut x = pow_mod(a, d, p);
                if x == 1 || x == p - 1 {
                    continue;
                }
                let mut composite = true;
                for _ in 1..s {
                    x = mul_mod(x, x, p);
                    if x == p - 1 {
                        composite = false;
                        break;
                    }
                }
                assert!(!composite, "{p} fails base {a}");
            }
        }
    }

    #[test]
    fn relation_set_round_trip() {
        let set = RelationSet {
            weight: 3,
            family: Family::Cyclic,
            relations: vec![euler()],
        };
        let back = RelationSet::from_json(&set.to_json().unwrap()).unwrap();
        assert_eq!(back, set);
        let mut bad = set.to_json().unwrap();
        bad["rows"][0]["entries"][0][0] = json!(9);
        assert!(RelationSet::from_json(&bad).is_err());
    }
}
