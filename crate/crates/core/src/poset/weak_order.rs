//! Weak orders (ordered set partitions) compatible with a constraint system,
//! and the resulting exact split of a constrained sum into MZV chains.
//!
//! A sum over a domain cut out by `<` / `<=` between variables is the
//! disjoint union, over every weak order compatible with the constraints, of
//! sums over strict chains whose links are the levels of the weak order.
//! With integer exponents each chain sum is one MZV, whose `p`-th part is the
//! total exponent of level `p`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use super::{Composition, SymbolCombination};
use crate::error::{Error, Result};
use crate::model::{Cmp, ConstraintSystem, VarId};

/// Levels listed from smallest value to largest; variables inside a level
/// share one value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedSetPartition {
    pub levels: Vec<Vec<VarId>>,
}

impl OrderedSetPartition {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }
}

impl fmt::Display for OrderedSetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for level in &self.levels {
            let names: Vec<String> = level.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", names.join(" "))?;
        }
        Ok(())
    }
}

/// Exponent of every variable of a constraint system.
pub type ExponentMap = BTreeMap<VarId, u32>;

/// Predecessor masks per variable, in canonical variable order.
struct Precedence {
    vars: Vec<VarId>,
    le_pred: Vec<u32>,
    lt_pred: Vec<u32>,
}

impl Precedence {
    fn new(cs: &ConstraintSystem) -> Self {
        let vars = cs.variables();
        assert!(vars.len() <= 32, "at most 32 summation variables supported");
        let idx = |v: VarId| vars.iter().position(|&w| w == v).expect("known variable");
        let mut le_pred = vec![0u32; vars.len()];
        let mut lt_pred = vec![0u32; vars.len()];
        for c in cs.constraints() {
            let (a, b) = (idx(c.lhs), idx(c.rhs));
            match c.cmp {
                Cmp::Lt => lt_pred[b] |= 1 << a,
                Cmp::Le => le_pred[b] |= 1 << a,
            }
        }
        Precedence {
            vars,
            le_pred,
            lt_pred,
        }
    }

    fn full(&self) -> u32 {
        if self.vars.len() == 32 {
            u32::MAX
        } else {
            (1u32 << self.vars.len()) - 1
        }
    }

    /// Visits every compatible weak order as a list of level masks.
    fn visit(&self, remaining: u32, levels: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if remaining == 0 {
            f(levels);
            return;
        }
        // Only variables with no strict predecessor left can sit on the
        // lowest remaining level.
        let candidates = bits(remaining)
            .filter(|&v| self.lt_pred[v] & remaining == 0)
            .fold(0u32, |m, v| m | (1 << v));
        for level in submasks_ascending(candidates) {
            let closed = bits(level).all(|v| (self.le_pred[v] & remaining) & !level == 0);
            if closed {
                levels.push(level);
                self.visit(remaining & !level, levels, f);
                levels.pop();
            }
        }
    }

    fn partition(&self, levels: &[u32]) -> OrderedSetPartition {
        OrderedSetPartition {
            levels: levels
                .iter()
                .map(|&m| bits(m).map(|v| self.vars[v]).collect())
                .collect(),
        }
    }
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |&b| mask & (1 << b) != 0)
}

/// Nonempty submasks of `mask` in increasing numeric order.
fn submasks_ascending(mask: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut sub = mask;
    while sub != 0 {
        out.push(sub);
        sub = (sub - 1) & mask;
    }
    out.reverse();
    out
}

/// All weak orders compatible with `cs`, in a fixed canonical order
/// (lowest level first; each level chosen by ascending variable bitmask).
pub fn weak_orders(cs: &ConstraintSystem) -> Vec<OrderedSetPartition> {
    let prec = Precedence::new(cs);
    let mut out = Vec::new();
    prec.visit(prec.full(), &mut Vec::new(), &mut |levels| {
        out.push(prec.partition(levels))
    });
    out
}

pub fn count_weak_orders(cs: &ConstraintSystem) -> usize {
    let prec = Precedence::new(cs);
    let mut n = 0;
    prec.visit(prec.full(), &mut Vec::new(), &mut |_| n += 1);
    n
}

/// Rewrites `sum over cs of prod v^{-e(v)}` as an integer combination of MZV
/// symbols, one symbol per compatible weak order.
///
/// A weak order whose top level has total exponent below 2 would give a
/// divergent symbol; that is reported as [`Error::NonAdmissible`] together
/// with the offending weak order.
pub fn decompose_to_mzv(cs: &ConstraintSystem, exponents: &ExponentMap) -> Result<SymbolCombination> {
    let prec = Precedence::new(cs);
    let e: Vec<u32> = prec
        .vars
        .iter()
        .map(|v| {
            exponents
                .get(v)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("no exponent given for {v}")))
        })
        .collect::<Result<_>>()?;
    let mut counts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
    let mut failure: Option<Error> = None;
    prec.visit(prec.full(), &mut Vec::new(), &mut |levels| {
        if failure.is_some() {
            return;
        }
        let parts: Vec<u32> = levels
            .iter()
            .map(|&m| bits(m).map(|v| e[v]).sum())
            .collect();
        if parts.last().is_some_and(|&k| k >= 2) && !parts.contains(&0) {
            *counts.entry(parts).or_default() += 1;
        } else {
            failure = Some(Error::NonAdmissible {
                composition: parts
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
                partition: prec.partition(levels).to_string(),
            });
        }
    });
    if let Some(err) = failure {
        return Err(err);
    }
    let mut out = SymbolCombination::new();
    for (parts, k) in counts {
        out.add_term(Composition::new(parts)?, BigInt::from(k));
    }
    Ok(out)
}

/// Default cap on `N` for the brute-force lattice-point oracle.
pub const ORACLE_CAP: u64 = 30;

/// Number of points of `[1, N]^vars` satisfying `cs`, by direct enumeration.
pub fn count_lattice_points(cs: &ConstraintSystem, n: u64) -> Result<BigUint> {
    count_lattice_points_capped(cs, n, ORACLE_CAP)
}

pub fn count_lattice_points_capped(cs: &ConstraintSystem, n: u64, cap: u64) -> Result<BigUint> {
    if n > cap {
        return Err(Error::Budget(format!("oracle cutoff {n} exceeds cap {cap}")));
    }
    let vars = cs.variables();
    let idx = |v: VarId| vars.iter().position(|&w| w == v).unwrap();
    // Constraints checked as soon as their later variable is assigned.
    let mut checks: Vec<Vec<(usize, Cmp, usize)>> = vec![Vec::new(); vars.len()];
    for c in cs.constraints() {
        let (a, b) = (idx(c.lhs), idx(c.rhs));
        checks[a.max(b)].push((a, c.cmp, b));
    }
    fn rec(k: usize, n: u64, vals: &mut Vec<u64>, checks: &[Vec<(usize, Cmp, usize)>]) -> u64 {
        if k == checks.len() {
            return 1;
        }
        let mut total = 0;
        for x in 1..=n {
            vals[k] = x;
            if checks[k].iter().all(|&(a, cmp, b)| cmp.holds(vals[a], vals[b])) {
                total += rec(k + 1, n, vals, checks);
            }
        }
        total
    }
    let mut vals = vec![0; vars.len()];
    Ok(BigUint::from(rec(0, n, &mut vals, &checks)))
}

/// `C(N, t)`: the number of strict chains of length `t` in `[1, N]`.
pub fn chain_count(t: usize, n: u64) -> BigUint {
    let t = t as u64;
    if t > n {
        return BigUint::default();
    }
    let mut acc = BigUint::one();
    for k in 0..t {
        acc = acc * BigUint::from(n - k) / BigUint::from(k + 1);
    }
    acc
}
