use std::collections::BTreeMap;
use std::fmt;
use std::ops::{AddAssign, Neg, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// An MZV index `(k_1, ..., k_t)`, read from the smallest summation
/// variable to the largest.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::Invalid(format!(
                "composition parts must be positive and nonempty, got {parts:?}"
            )));
        }
        Ok(Composition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Convergent as an MZV: the last part is at least 2.
    pub fn is_admissible(&self) -> bool {
        self.0.last().is_some_and(|&k| k >= 2)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Composition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad composition part {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Composition::new(parts).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A sparse integer combination of MZV symbols. Zero coefficients are never
/// stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SymbolCombination {
    terms: BTreeMap<Composition, BigInt>,
}

impl SymbolCombination {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(c: Composition, coeff: impl Into<BigInt>) -> Self {
        let mut s = Self::new();
        s.add_term(c, coeff.into());
        s
    }

    pub fn add_term(&mut self, c: Composition, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(c.clone()).or_default();
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&c);
        }
    }

    pub fn add_scaled(&mut self, other: &SymbolCombination, scale: &BigInt) {
        for (c, k) in &other.terms {
            self.add_term(c.clone(), k * scale);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, c: &Composition) -> BigInt {
        self.terms.get(c).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Composition, &BigInt)> {
        self.terms.iter()
    }

    /// Weight shared by all symbols, or `None` when empty or mixed.
    pub fn weight(&self) -> Option<u32> {
        let mut ws = self.terms.keys().map(Composition::weight);
        let w = ws.next()?;
        ws.all(|x| x == w).then_some(w)
    }

    /// JSON object mapping composition strings to decimal coefficient strings.
    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = self
            .terms
            .iter()
            .map(|(c, k)| (c.to_string(), serde_json::Value::String(k.to_string())))
            .collect();
        serde_json::Value::Object(map)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("symbol combination must be a JSON object".into()))?;
        let mut out = Self::new();
        for (key, val) in obj {
            let c: Composition = key.parse()?;
            let s = val
                .as_str()
                .ok_or_else(|| Error::Parse(format!("coefficient for {key} must be a string")))?;
            let k: BigInt = s
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {s:?}")))?;
            out.add_term(c, k);
        }
        Ok(out)
    }
}

impl AddAssign<&SymbolCombination> for SymbolCombination {
    fn add_assign(&mut self, rhs: &SymbolCombination) {
        for (c, k) in &rhs.terms {
            self.add_term(c.clone(), k.clone());
        }
    }
}

impl SubAssign<&SymbolCombination> for SymbolCombination {
    fn sub_assign(&mut self, rhs: &SymbolCombination) {
        for (c, k) in &rhs.terms {
            self.add_term(c.clone(), -k);
        }
    }
}

impl Neg for SymbolCombination {
    type Output = SymbolCombination;
    fn neg(self) -> Self {
        SymbolCombination {
            terms: self.terms.into_iter().map(|(c, k)| (c, -k)).collect(),
        }
    }
}

impl fmt::Display for SymbolCombination {
    /// Prints e.g. `ζ(1,2) - ζ(3)`; the empty combination prints `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (c, k)) in self.terms.iter().enumerate() {
            let sign = if k.is_negative() { "-" } else { "+" };
            if n == 0 {
                if k.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = k.abs();
            if mag != BigInt::from(1) {
                write!(f, "{mag}")?;
            }
            write!(f, "ζ({c})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Composition {
        s.parse().unwrap()
    }

    #[test]
    fn composition_basics() {
        assert!(c("1,2").is_admissible());
        assert!(!c("2,1").is_admissible());
        assert_eq!(c("1,1,2").weight(), 4);
        assert_eq!(c("3").to_string(), "3");
        assert!("1,0".parse::<Composition>().is_err());
        assert!("".parse::<Composition>().is_err());
    }

    #[test]
    fn combination_cancels() {
        let mut s = SymbolCombination::single(c("1,2"), 1);
        s.add_term(c("3"), BigInt::from(-1));
        assert_eq!(s.to_string(), "ζ(1,2) - ζ(3)");
        assert_eq!(s.weight(), Some(3));
        let t = s.clone();
        s -= &t;
        assert!(s.is_zero());
        assert_eq!(s.to_string(), "0");
    }

    #[test]
    fn json_keeps_big_coefficients() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let s = SymbolCombination::single(c("2,3"), big.clone());
        let back = SymbolCombination::from_json(&s.to_json()).unwrap();
        assert_eq!(back.coeff(&c("2,3")), big);
    }
}
