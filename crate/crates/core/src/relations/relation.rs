use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde_json::json;

use super::Family;
use crate::error::{Error, Result};
use crate::model::{
    build_constraints_s_i, build_constraints_s_ij, is_integer_point_in_w, IntArgs, VarId,
};
use crate::poset::{decompose_to_mzv, Composition, ExponentMap, SymbolCombination};
use crate::series::mzf_partial;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub family: Family,
    pub args: IntArgs,
}

impl Provenance {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "family": self.family.name(),
            "shape": self.args.shape().depths(),
            "args": self.args.to_string(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let family = v["family"]
            .as_str()
            .ok_or_else(|| Error::Parse("provenance.family must be a string".into()))?
            .parse()?;
        let args = IntArgs::parse(
            v["args"]
                .as_str()
                .ok_or_else(|| Error::Parse("provenance.args must be a string".into()))?,
        )?;
        if let Some(shape) = v.get("shape") {
            let depths: Vec<usize> = serde_json::from_value(shape.clone())
                .map_err(|e| Error::Parse(format!("provenance.shape: {e}")))?;
            if depths != args.shape().depths() {
                return Err(Error::Parse(format!(
                    "provenance shape {depths:?} does not match args {args}"
                )));
            }
        }
        Ok(Provenance { family, args })
    }
}

/// A linear combination of MZV symbols that vanishes on the true values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub combo: SymbolCombination,
    pub provenance: Provenance,
}

fn require_w(k: &IntArgs) -> Result<()> {
    if is_integer_point_in_w(k) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "integer point {k} is outside the convergence domain"
        )))
    }
}

fn base_exponents(k: &IntArgs) -> ExponentMap {
    k.shape()
        .positions()
        .map(|(i, j)| (VarId::Block(i, j), k.get(i, j)))
        .collect()
}

/// The cyclic identity at an integer point, split into MZV symbols:
/// the expansion of every pole sum over `S_{i,j}` minus the sums over `S_i`.
pub fn cyclic_relation(k: &IntArgs) -> Result<Relation> {
    require_w(k)?;
    let shape = k.shape();
    let mut combo = SymbolCombination::new();
    let one = BigInt::from(1);
    for (i, j) in shape.positions() {
        let cs = build_constraints_s_ij(shape, i, j)?;
        let kij = k.get(i, j);
        let start = u32::from(j == shape.depth(i));
        for m in start..kij {
            let mut e = base_exponents(k);
            e.insert(VarId::Block(i, j), kij - m);
            e.insert(VarId::Extra, m + 1);
            combo.add_scaled(&decompose_to_mzv(&cs, &e)?, &one);
        }
    }
    for i in 1..=shape.blocks() {
        let cs = build_constraints_s_i(shape, i)?;
        let mut e = base_exponents(k);
        e.insert(VarId::Extra, 1);
        combo -= &decompose_to_mzv(&cs, &e)?;
    }
    Ok(Relation {
        combo,
        provenance: Provenance {
            family: Family::Cyclic,
            args: k.clone(),
        },
    })
}

/// `ζ*(c)` as MZVs: one term for every way of merging adjacent parts.
pub fn zeta_star_expand(c: &Composition) -> Result<SymbolCombination> {
    if !c.is_admissible() {
        return Err(Error::NonAdmissible {
            composition: c.to_string(),
            partition: "zeta-star argument".into(),
        });
    }
    let parts = c.parts();
    let gaps = parts.len() - 1;
    let mut out = SymbolCombination::new();
    for mask in 0u64..(1 << gaps) {
        let mut merged = vec![parts[0]];
        for (g, &p) in parts[1..].iter().enumerate() {
            if mask & (1 << g) != 0 {
                *merged.last_mut().unwrap() += p;
            } else {
                merged.push(p);
            }
        }
        out.add_term(Composition::new(merged)?, BigInt::from(1));
    }
    Ok(out)
}

/// The cyclic sum formula for zeta-star values at an all-singleton point.
pub fn csf_relation(k: &IntArgs) -> Result<Relation> {
    if !k.shape().is_all_singleton() {
        return Err(Error::Invalid(format!(
            "the cyclic sum formula needs an all-singleton shape, got {}",
            k.shape()
        )));
    }
    require_w(k)?;
    let v = k.values();
    let d = v.len();
    let mut combo = SymbolCombination::new();
    for i in 0..d {
        for m in 1..v[i] {
            let mut parts = vec![v[i] - m];
            parts.extend((1..d).map(|t| v[(i + t) % d]));
            parts.push(m + 1);
            combo += &zeta_star_expand(&Composition::new(parts)?)?;
        }
    }
    let w = k.weight();
    combo.add_term(Composition::new(vec![w + 1])?, -BigInt::from(w));
    Ok(Relation {
        combo,
        provenance: Provenance {
            family: Family::Csf,
            args: k.clone(),
        },
    })
}

/// The relation a family attaches to a configuration.
pub fn generate(family: Family, k: &IntArgs) -> Result<Relation> {
    match family {
        Family::Csf => csf_relation(k),
        Family::Cyclic => cyclic_relation(k),
        Family::Derivation => {
            let mut r = cyclic_relation(k)?;
            r.provenance.family = Family::Derivation;
            Ok(r)
        }
    }
}

/// The combination evaluated with every symbol replaced by its partial sum
/// over `n_1 < ... < n_t <= N`.
pub fn evaluate_combo(combo: &SymbolCombination, n: u64) -> Result<f64> {
    let mut total = 0.0;
    for (c, coeff) in combo.iter() {
        let s: Vec<Complex64> = c.parts().iter().map(|&p| Complex64::new(p as f64, 0.0)).collect();
        let v = mzf_partial(&s, n)?.re;
        let k = coeff
            .to_f64()
            .ok_or_else(|| Error::Internal(format!("coefficient {coeff} does not fit a double")))?;
        total += k * v;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(s: &str) -> IntArgs {
        IntArgs::parse(s).unwrap()
    }

    fn comp(s: &str) -> Composition {
        s.parse().unwrap()
    }

    #[test]
    fn euler_relation() {
        let r = cyclic_relation(&k("2")).unwrap();
        assert_eq!(r.combo.to_string(), "ζ(1,2) - ζ(3)");
        assert!(matches!(cyclic_relation(&k("1")), Err(Error::Domain(_))));
    }

    #[test]
    fn depth_two_block_vanishes_numerically() {
        let r = cyclic_relation(&k("1,2")).unwrap();
        assert_eq!(r.combo.weight(), Some(4));
        // ζ(1,1,2) converges like log^2(N)/N, so 1e-3 is reached only near N = 1e5.
        let v: Vec<f64> = [10_000, 20_000, 100_000]
            .iter()
            .map(|&n| evaluate_combo(&r.combo, n).unwrap().abs())
            .collect();
        assert!(v[0] < 1e-2 && v[1] < v[0] && v[2] < 1e-3, "{v:?}");
    }

    #[test]
    fn star_expansion() {
        assert_eq!(zeta_star_expand(&comp("1,2")).unwrap().to_string(), "ζ(1,2) + ζ(3)");
        assert_eq!(zeta_star_expand(&comp("2")).unwrap().to_string(), "ζ(2)");
        assert_eq!(
            zeta_star_expand(&comp("1,1,2")).unwrap().to_string(),
            "ζ(1,1,2) + ζ(1,3) + ζ(2,2) + ζ(4)"
        );
        assert!(zeta_star_expand(&comp("2,1")).is_err());
    }

    #[test]
    fn cyclic_sum_formula() {
        let r = csf_relation(&k("2")).unwrap();
        assert_eq!(r.combo.to_string(), "ζ(1,2) - ζ(3)");
        let r = csf_relation(&k("1;2")).unwrap();
        assert_eq!(r.combo.weight(), Some(4));
        assert!(evaluate_combo(&r.combo, 100_000).unwrap().abs() < 1e-3);
        assert!(csf_relation(&k("1")).is_err());
        assert!(matches!(csf_relation(&k("1,2")), Err(Error::Invalid(_))));
    }

    #[test]
    fn provenance_round_trip() {
        let p = Provenance {
            family: Family::Derivation,
            args: k("1,2;1"),
        };
        assert_eq!(Provenance::from_json(&p.to_json()).unwrap(), p);
    }
}
