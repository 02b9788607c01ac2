//! Index-variable constraint systems for the summation domains `S`, `S_{i,j}`,
//! `S_i` and `T_i`.
//!
//! Every system is a conjunction of `a < b` / `a <= b` between summation
//! variables. Systems are kept canonical: tautologies `v <= v` are dropped, a
//! non-strict constraint already implied strictly by the rest is dropped, and
//! constraints are sorted by `(lhs, rhs, cmp)`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Shape;
use crate::error::{Error, Result};

/// A summation variable: `n_{i,j}` (1-based) or the auxiliary `n`.
///
/// The derived order puts block variables first in block-major order and the
/// auxiliary variable last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarId {
    Block(usize, usize),
    Extra,
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarId::Block(i, j) => write!(f, "n_{{{i},{j}}}"),
            VarId::Extra => f.write_str("n"),
        }
    }
}

/// Accepts the printed forms `n` and `n_{i,j}`, and the shorthand `n_i_j`.
impl FromStr for VarId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t == "n" {
            return Ok(VarId::Extra);
        }
        let bad = || Error::Parse(format!("bad variable {s:?} (expected n or n_{{i,j}})"));
        let body = t.strip_prefix("n_").ok_or_else(bad)?;
        let body = body
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .unwrap_or(body);
        let (i, j) = body.split_once([',', '_']).ok_or_else(bad)?;
        let i: usize = i.trim().parse().map_err(|_| bad())?;
        let j: usize = j.trim().parse().map_err(|_| bad())?;
        if i == 0 || j == 0 {
            return Err(bad());
        }
        Ok(VarId::Block(i, j))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Cmp {
    Lt,
    Le,
}

impl Cmp {
    pub fn holds(self, a: u64, b: u64) -> bool {
        match self {
            Cmp::Lt => a < b,
            Cmp::Le => a <= b,
        }
    }
}

impl fmt::Display for Cmp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Constraint {
    pub lhs: VarId,
    pub cmp: Cmp,
    pub rhs: VarId,
}

impl Constraint {
    pub fn lt(lhs: VarId, rhs: VarId) -> Self {
        Constraint { lhs, cmp: Cmp::Lt, rhs }
    }

    pub fn le(lhs: VarId, rhs: VarId) -> Self {
        Constraint { lhs, cmp: Cmp::Le, rhs }
    }

    fn key(&self) -> (VarId, VarId, Cmp) {
        (self.lhs, self.rhs, self.cmp)
    }
}

impl PartialOrd for Constraint {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Constraint {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

/// Parses `a < b`, `a <= b`, `a > b` or `a >= b`.
impl FromStr for Constraint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        for (op, cmp, flip) in [
            ("<=", Cmp::Le, false),
            (">=", Cmp::Le, true),
            ("<", Cmp::Lt, false),
            (">", Cmp::Lt, true),
        ] {
            if let Some((a, b)) = s.split_once(op) {
                let (a, b): (VarId, VarId) = (a.parse()?, b.parse()?);
                let (lhs, rhs) = if flip { (b, a) } else { (a, b) };
                return Ok(Constraint { lhs, cmp, rhs });
            }
        }
        Err(Error::Parse(format!("bad constraint {s:?}")))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.cmp, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSystem {
    shape: Shape,
    has_extra: bool,
    constraints: Vec<Constraint>,
}

impl ConstraintSystem {
    /// Builds a canonical system after validating variables and checking that
    /// no cycle passes through a strict edge.
    pub fn new(
        shape: Shape,
        has_extra: bool,
        constraints: impl IntoIterator<Item = Constraint>,
    ) -> Result<Self> {
        let constraints: Vec<Constraint> = constraints.into_iter().collect();
        for c in &constraints {
            for v in [c.lhs, c.rhs] {
                match v {
                    VarId::Block(i, j) => shape.check_position(i, j)?,
                    VarId::Extra if !has_extra => {
                        return Err(Error::Invalid(format!(
                            "constraint {c} uses n but the system has no auxiliary variable"
                        )))
                    }
                    VarId::Extra => {}
                }
            }
            if c.lhs == c.rhs && c.cmp == Cmp::Lt {
                return Err(Error::Invalid(format!("contradictory constraint {c}")));
            }
        }
        let cs = ConstraintSystem {
            shape,
            has_extra,
            constraints: canonicalize(constraints),
        };
        if cs.has_strict_cycle() {
            return Err(Error::Invalid(
                "constraint system has a cycle through a strict edge".into(),
            ));
        }
        Ok(cs)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn has_extra(&self) -> bool {
        self.has_extra
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Variables in canonical order.
    pub fn variables(&self) -> Vec<VarId> {
        let mut vars: Vec<VarId> = self
            .shape
            .positions()
            .map(|(i, j)| VarId::Block(i, j))
            .collect();
        if self.has_extra {
            vars.push(VarId::Extra);
        }
        vars
    }

    pub fn index_of(&self, v: VarId) -> Option<usize> {
        self.variables().iter().position(|&w| w == v)
    }

    pub fn is_satisfied(&self, value: impl Fn(VarId) -> u64) -> bool {
        self.constraints
            .iter()
            .all(|c| c.cmp.holds(value(c.lhs), value(c.rhs)))
    }

    fn has_strict_cycle(&self) -> bool {
        let vars = self.variables();
        let idx = |v: VarId| vars.iter().position(|&w| w == v).unwrap();
        let reach = reachability(vars.len(), self.constraints.iter().map(|c| (idx(c.lhs), idx(c.rhs))));
        self.constraints
            .iter()
            .any(|c| c.cmp == Cmp::Lt && reach[idx(c.rhs)][idx(c.lhs)])
    }
}

impl fmt::Display for ConstraintSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.constraints.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Reflexive-transitive reachability matrix of a small digraph.
fn reachability(n: usize, edges: impl Iterator<Item = (usize, usize)>) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (k, row) in r.iter_mut().enumerate() {
        row[k] = true;
    }
    for (a, b) in edges {
        r[a][b] = true;
    }
    for k in 0..n {
        for a in 0..n {
            if r[a][k] {
                for b in 0..n {
                    if r[k][b] {
                        r[a][b] = true;
                    }
                }
            }
        }
    }
    r
}

/// True when `from < to` follows from `edges` along a path with a strict edge.
fn strictly_implied(from: VarId, to: VarId, edges: &[Constraint]) -> bool {
    // Walk states (var, seen_strict).
    let mut seen: BTreeSet<(VarId, bool)> = BTreeSet::new();
    let mut stack = vec![(from, false)];
    while let Some((v, strict)) = stack.pop() {
        if !seen.insert((v, strict)) {
            continue;
        }
        if v == to && strict {
            return true;
        }
        for c in edges.iter().filter(|c| c.lhs == v) {
            stack.push((c.rhs, strict || c.cmp == Cmp::Lt));
        }
    }
    false
}

fn canonicalize(constraints: Vec<Constraint>) -> Vec<Constraint> {
    let set: BTreeSet<Constraint> = constraints
        .into_iter()
        .filter(|c| !(c.lhs == c.rhs && c.cmp == Cmp::Le))
        .collect();
    let all: Vec<Constraint> = set.into_iter().collect();
    let kept: Vec<Constraint> = all
        .iter()
        .enumerate()
        .filter(|&(k, c)| {
            if c.cmp == Cmp::Lt {
                return true;
            }
            let others: Vec<Constraint> = all
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != k)
                .map(|(_, c)| *c)
                .collect();
            !strictly_implied(c.lhs, c.rhs, &others)
        })
        .map(|(_, c)| *c)
        .collect();
    kept
}

fn block(i: usize, j: usize) -> VarId {
    VarId::Block(i, j)
}

/// Strict chains inside each block.
fn chains(shape: &Shape) -> Vec<Constraint> {
    (1..=shape.blocks())
        .flat_map(|i| (1..shape.depth(i)).map(move |j| Constraint::lt(block(i, j), block(i, j + 1))))
        .collect()
}

/// Cyclic link leaving block `k`: `n_{k,1} <= n_{k+1, r_{k+1}}`.
fn link(shape: &Shape, k: usize) -> Constraint {
    let next = shape.next_block(k);
    Constraint::le(block(k, 1), block(next, shape.depth(next)))
}

/// The domain `S`: block chains closed cyclically by non-strict links.
pub fn build_constraints_s(shape: &Shape) -> ConstraintSystem {
    let mut cs = chains(shape);
    cs.extend((1..=shape.blocks()).map(|k| link(shape, k)));
    ConstraintSystem::new(shape.clone(), false, cs).expect("S is consistent")
}

/// The domain `S_{i,j}`.
///
/// The link into block `i` carries `n_{i-1,1} <= max(n_{i,r_i}, n)`. For
/// `j < r_i` the rest of the system forces `n < n_{i,r_i}`, so the max is
/// `n_{i,r_i}`; for `j = r_i` it forces `n > n_{i,r_i}`, so the max is `n`.
pub fn build_constraints_s_ij(shape: &Shape, i: usize, j: usize) -> Result<ConstraintSystem> {
    shape.check_position(i, j)?;
    let prev = shape.prev_block(i);
    let top = shape.depth(i);
    let mut cs = chains(shape);
    for k in 1..=shape.blocks() {
        if k != prev {
            cs.push(link(shape, k));
        } else if j < top {
            cs.push(Constraint::le(block(prev, 1), block(i, top)));
        } else {
            cs.push(Constraint::le(block(prev, 1), VarId::Extra));
        }
    }
    cs.push(Constraint::lt(block(i, j), VarId::Extra));
    if j < top {
        cs.push(Constraint::lt(VarId::Extra, block(i, j + 1)));
    }
    ConstraintSystem::new(shape.clone(), true, cs)
}

/// The domain `S_i`: `S` plus `n_{i,1} <= n <= n_{i+1, r_{i+1}}`.
pub fn build_constraints_s_i(shape: &Shape, i: usize) -> Result<ConstraintSystem> {
    shape.check_block(i)?;
    let next = shape.next_block(i);
    let mut cs = chains(shape);
    cs.extend((1..=shape.blocks()).map(|k| link(shape, k)));
    cs.push(Constraint::le(block(i, 1), VarId::Extra));
    cs.push(Constraint::le(VarId::Extra, block(next, shape.depth(next))));
    ConstraintSystem::new(shape.clone(), true, cs)
}

/// The domain `T_i`: `S` with the link `n_{i-1,1} <= n_{i,r_i}` into block `i`
/// removed (for `i = 1` that is the closing link `n_{d,1} <= n_{1,r_1}`).
pub fn build_constraints_t_i(shape: &Shape, i: usize) -> Result<ConstraintSystem> {
    shape.check_block(i)?;
    let prev = shape.prev_block(i);
    let mut cs = chains(shape);
    cs.extend(
        (1..=shape.blocks())
            .filter(|&k| k != prev)
            .map(|k| link(shape, k)),
    );
    ConstraintSystem::new(shape.clone(), false, cs)
}
