//! Truncated summation over constrained index domains.
//!
//! The summand is a product of one factor per variable and a few factors
//! coupling two variables (the order constraints themselves, the pole
//! `1/(den - num)`, harmonic-range weights). Variables are summed out one
//! at a time: a variable touching at most two others becomes a new factor
//! on its neighbours. When one of its two edges is a pure order constraint
//! the inner sum is a prefix/suffix sum, so each step costs `O(N^2)`
//! instead of `O(N^3)`. All domains built by this crate are cycles with at
//! most one extra triangle, so they eliminate completely. Anything left
//! over is enumerated directly.

use std::collections::BTreeMap;
use std::rc::Rc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Cmp, ConstraintSystem, VarId};

const LESS: u8 = 1;
const EQUAL: u8 = 2;
const GREATER: u8 = 4;
const ANY: u8 = LESS | EQUAL | GREATER;

fn holds(mask: u8, x: usize, y: usize) -> bool {
    let bit = match x.cmp(&y) {
        std::cmp::Ordering::Less => LESS,
        std::cmp::Ordering::Equal => EQUAL,
        std::cmp::Ordering::Greater => GREATER,
    };
    mask & bit != 0
}

fn flip(mask: u8) -> u8 {
    (mask & EQUAL) | ((mask & LESS) << 2) | ((mask & GREATER) >> 2)
}

type PairFn = Rc<dyn Fn(usize, usize) -> Complex64>;

/// Resource caps for the summation engine.
#[derive(Clone, Copy, Debug)]
pub struct EngineLimits {
    /// Largest cutoff for which an `N x N` table may be materialized.
    pub max_dense_cutoff: u64,
    /// Cap on `N^3` work for eliminating a variable between two dense factors.
    pub max_cubic_work: u128,
    /// Cap on lattice points for the direct-enumeration fallback.
    pub max_enumeration: u128,
}

impl Default for EngineLimits {
    fn default() -> Self {
        EngineLimits {
            max_dense_cutoff: 2048,
            max_cubic_work: 4_000_000_000,
            max_enumeration: 1_000_000_000,
        }
    }
}

/// Factor between the variables `(p, q)` with `p < q`, as a function of
/// `(x_p, x_q)`. `mask` restricts the support to the allowed orderings.
enum Pair {
    Order(u8),
    Lazy(u8, PairFn),
    Dense(Vec<Complex64>),
}

/// Sum-product state over a set of summation variables.
pub(crate) struct FactorGraph {
    n: usize,
    vars: Vec<VarId>,
    alive: Vec<bool>,
    unary: Vec<Vec<Complex64>>,
    pairs: BTreeMap<(usize, usize), Pair>,
    limits: EngineLimits,
}

impl FactorGraph {
    /// Variables of `cs` over `1..=n`, with the order constraints as factors.
    pub fn new(cs: &ConstraintSystem, n: u64, limits: EngineLimits) -> Result<Self> {
        let vars = cs.variables();
        let n = usize::try_from(n).map_err(|_| Error::Budget(format!("cutoff {n} too large")))?;
        let mut g = FactorGraph {
            n,
            alive: vec![true; vars.len()],
            unary: vec![vec![Complex64::new(1.0, 0.0); n]; vars.len()],
            vars,
            pairs: BTreeMap::new(),
            limits,
        };
        for c in cs.constraints() {
            let a = g.index(c.lhs)?;
            let b = g.index(c.rhs)?;
            let mask = match c.cmp {
                Cmp::Lt => LESS,
                Cmp::Le => LESS | EQUAL,
            };
            g.restrict(a, b, mask);
        }
        Ok(g)
    }

    pub fn index(&self, v: VarId) -> Result<usize> {
        self.vars
            .iter()
            .position(|&w| w == v)
            .ok_or_else(|| Error::Invalid(format!("variable {v} is not part of the constraint system")))
    }

    /// Multiplies the factor of `v` by `table[x - 1]`.
    pub fn mul_unary(&mut self, v: VarId, table: &[Complex64]) -> Result<()> {
        let k = self.index(v)?;
        for (u, t) in self.unary[k].iter_mut().zip(table) {
            *u *= t;
        }
        Ok(())
    }

    /// Multiplies in `f(x_a, x_b)`. Only evaluated where the order constraints
    /// already present allow the pair of values.
    pub fn mul_pair(&mut self, a: VarId, b: VarId, f: impl Fn(usize, usize) -> Complex64 + 'static) -> Result<()> {
        let (ka, kb) = (self.index(a)?, self.index(b)?);
        if ka == kb {
            for x in 1..=self.n {
                let v = f(x, x);
                check_finite(v, a, b, x, x)?;
                self.unary[ka][x - 1] *= v;
            }
            return Ok(());
        }
        let (p, q) = (ka.min(kb), ka.max(kb));
        let g: PairFn = if ka == p {
            Rc::new(f)
        } else {
            Rc::new(move |xp, xq| f(xq, xp))
        };
        let merged = match self.pairs.remove(&(p, q)) {
            None => Pair::Lazy(ANY, g),
            Some(Pair::Order(m)) => Pair::Lazy(m, g),
            Some(Pair::Lazy(m, h)) => Pair::Lazy(m, Rc::new(move |x, y| h(x, y) * g(x, y))),
            Some(Pair::Dense(mut d)) => {
                let n = self.n;
                for x in 1..=n {
                    for y in 1..=n {
                        let e = &mut d[(x - 1) * n + y - 1];
                        if *e != Complex64::new(0.0, 0.0) {
                            *e *= g(x, y);
                        }
                    }
                }
                Pair::Dense(d)
            }
        };
        self.pairs.insert((p, q), merged);
        Ok(())
    }

    /// Restricts `x_a ? x_b` to the orderings in `mask`.
    fn restrict(&mut self, a: usize, b: usize, mask: u8) {
        let (p, q, m) = if a < b { (a, b, mask) } else { (b, a, flip(mask)) };
        let entry = self.pairs.remove(&(p, q));
        let merged = match entry {
            None => Pair::Order(m),
            Some(Pair::Order(old)) => Pair::Order(old & m),
            Some(Pair::Lazy(old, f)) => Pair::Lazy(old & m, f),
            Some(Pair::Dense(mut d)) => {
                let n = self.n;
                for x in 1..=n {
                    for y in 1..=n {
                        if !holds(m, x, y) {
                            d[(x - 1) * n + y - 1] = Complex64::new(0.0, 0.0);
                        }
                    }
                }
                Pair::Dense(d)
            }
        };
        self.pairs.insert((p, q), merged);
    }

    fn neighbours(&self, v: usize) -> Vec<usize> {
        self.pairs
            .keys()
            .filter_map(|&(p, q)| {
                if p == v {
                    Some(q)
                } else if q == v {
                    Some(p)
                } else {
                    None
                }
            })
            .collect()
    }

    fn key(v: usize, o: usize) -> (usize, usize) {
        (v.min(o), v.max(o))
    }

    fn is_order(&self, v: usize, o: usize) -> bool {
        matches!(self.pairs.get(&Self::key(v, o)), Some(Pair::Order(_)))
    }

    /// Mask of `x_v ? x_o` for an order pair.
    fn order_mask(&self, v: usize, o: usize) -> u8 {
        match self.pairs.get(&Self::key(v, o)) {
            Some(Pair::Order(m)) => {
                if v < o {
                    *m
                } else {
                    flip(*m)
                }
            }
            _ => unreachable!("order_mask on non-order pair"),
        }
    }

    /// Value of the factor on `(v, o)` at `x_v = xv`, `x_o = xo`.
    fn pair_value(&self, v: usize, o: usize, xv: usize, xo: usize) -> Result<Complex64> {
        let (x, y) = if v < o { (xv, xo) } else { (xo, xv) };
        Ok(match self.pairs.get(&Self::key(v, o)) {
            None => Complex64::new(1.0, 0.0),
            Some(Pair::Order(m)) => {
                if holds(*m, x, y) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Some(Pair::Lazy(m, f)) => {
                if holds(*m, x, y) {
                    let val = f(x, y);
                    check_finite(val, self.vars[v], self.vars[o], xv, xo)?;
                    val
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Some(Pair::Dense(d)) => d[(x - 1) * self.n + y - 1],
        })
    }

    /// Elimination class of `v`; lower is cheaper. `None` when `v` touches
    /// three or more variables.
    fn class(&self, v: usize) -> Option<u8> {
        let nb = self.neighbours(v);
        match nb.len() {
            0 => Some(0),
            1 => Some(1),
            2 => {
                let orders = nb.iter().filter(|&&o| self.is_order(v, o)).count();
                match orders {
                    // Grows an existing non-order factor along the cycle.
                    1 => Some(2),
                    0 => Some(5),
                    _ => {
                        if self.pairs.contains_key(&Self::key(nb[0], nb[1])) {
                            Some(3)
                        } else {
                            Some(4)
                        }
                    }
                }
            }
            _ => None,
        }
    }

    /// Sums out every variable and returns the total.
    pub fn sum(mut self) -> Result<Complex64> {
        let mut scalar = Complex64::new(1.0, 0.0);
        loop {
            let next = (0..self.vars.len())
                .filter(|&v| self.alive[v])
                .filter_map(|v| self.class(v).map(|c| (c, v)))
                .min();
            match next {
                Some((_, v)) => scalar *= self.eliminate(v)?,
                None => break,
            }
        }
        if self.alive.iter().any(|&a| a) {
            scalar *= self.enumerate_rest()?;
        }
        Ok(scalar)
    }

    /// Removes `v`, folding its factors into its neighbours. Returns the
    /// scalar produced when `v` has no neighbours (else 1).
    fn eliminate(&mut self, v: usize) -> Result<Complex64> {
        let n = self.n;
        let nb = self.neighbours(v);
        let u = std::mem::take(&mut self.unary[v]);
        self.alive[v] = false;
        let one = Complex64::new(1.0, 0.0);
        match nb.as_slice() {
            [] => Ok(u.iter().sum()),
            [a] => {
                let a = *a;
                let mut g = vec![Complex64::new(0.0, 0.0); n];
                if self.is_order(v, a) {
                    let sums = RangeSums::new(&u);
                    let m = self.order_mask(v, a);
                    for (xa, slot) in g.iter_mut().enumerate() {
                        *slot = sums.region(m, xa + 1);
                    }
                } else {
                    for (xa, slot) in g.iter_mut().enumerate() {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (xv, uv) in u.iter().enumerate() {
                            acc += uv * self.pair_value(v, a, xv + 1, xa + 1)?;
                        }
                        *slot = acc;
                    }
                }
                self.pairs.remove(&Self::key(v, a));
                for (t, gx) in self.unary[a].iter_mut().zip(&g) {
                    *t *= gx;
                }
                Ok(one)
            }
            [a, b] => {
                let (a, b) = (*a, *b);
                if n as u64 > self.limits.max_dense_cutoff {
                    return Err(Error::Budget(format!(
                        "cutoff {n} exceeds the dense-table cap {}",
                        self.limits.max_dense_cutoff
                    )));
                }
                // f[(xa - 1) * n + xb - 1] = sum_v P(v, a) u(v) Q(v, b)
                let mut f = vec![Complex64::new(0.0, 0.0); n * n];
                if self.is_order(v, a) || self.is_order(v, b) {
                    // Put the order edge on `ord`, iterate the other side.
                    let (ord, other) = if self.is_order(v, a) { (a, b) } else { (b, a) };
                    let m = self.order_mask(v, ord);
                    let mut w = vec![Complex64::new(0.0, 0.0); n];
                    for xo in 1..=n {
                        for (xv, slot) in w.iter_mut().enumerate() {
                            *slot = u[xv] * self.pair_value(v, other, xv + 1, xo)?;
                        }
                        let sums = RangeSums::new(&w);
                        for xd in 1..=n {
                            let val = sums.region(m, xd);
                            let (xa, xb) = if ord == a { (xd, xo) } else { (xo, xd) };
                            f[(xa - 1) * n + xb - 1] = val;
                        }
                    }
                } else {
                    let work = (n as u128).pow(3);
                    if work > self.limits.max_cubic_work {
                        return Err(Error::Budget(format!(
                            "eliminating {} needs {work} operations",
                            self.vars[v]
                        )));
                    }
                    let mut pa = vec![Complex64::new(0.0, 0.0); n * n];
                    let mut qb = vec![Complex64::new(0.0, 0.0); n * n];
                    for xv in 1..=n {
                        for xo in 1..=n {
                            pa[(xv - 1) * n + xo - 1] = u[xv - 1] * self.pair_value(v, a, xv, xo)?;
                            qb[(xv - 1) * n + xo - 1] = self.pair_value(v, b, xv, xo)?;
                        }
                    }
                    for xa in 0..n {
                        for xv in 0..n {
                            let p = pa[xv * n + xa];
                            if p == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            let row = &qb[xv * n..(xv + 1) * n];
                            let out = &mut f[xa * n..(xa + 1) * n];
                            for (o, q) in out.iter_mut().zip(row) {
                                *o += p * q;
                            }
                        }
                    }
                }
                self.pairs.remove(&Self::key(v, a));
                self.pairs.remove(&Self::key(v, b));
                self.merge_dense(a, b, f)?;
                Ok(one)
            }
            _ => unreachable!("eliminate called on a variable of degree >= 3"),
        }
    }

    /// Multiplies a dense table `f[(xa-1)*n + xb-1]` into the factor on `(a, b)`.
    fn merge_dense(&mut self, a: usize, b: usize, f: Vec<Complex64>) -> Result<()> {
        let n = self.n;
        let (p, q) = (a.min(b), a.max(b));
        let mut d = if a == p {
            f
        } else {
            let mut t = vec![Complex64::new(0.0, 0.0); n * n];
            for x in 0..n {
                for y in 0..n {
                    t[y * n + x] = f[x * n + y];
                }
            }
            t
        };
        if self.pairs.contains_key(&(p, q)) {
            for x in 1..=n {
                for y in 1..=n {
                    let e = &mut d[(x - 1) * n + y - 1];
                    if *e != Complex64::new(0.0, 0.0) {
                        *e *= self.pair_value(p, q, x, y)?;
                    }
                }
            }
        }
        self.pairs.insert((p, q), Pair::Dense(d));
        Ok(())
    }

    /// Direct enumeration over the variables that could not be eliminated.
    fn enumerate_rest(&self) -> Result<Complex64> {
        let rest: Vec<usize> = (0..self.vars.len()).filter(|&v| self.alive[v]).collect();
        let points = (self.n as u128).saturating_pow(rest.len() as u32);
        if points > self.limits.max_enumeration {
            return Err(Error::Budget(format!(
                "direct enumeration of {} variables at N = {} needs {points} points",
                rest.len(),
                self.n
            )));
        }
        let mut vals = vec![0usize; self.vars.len()];
        self.enumerate_from(&rest, 0, &mut vals)
    }

    fn enumerate_from(&self, rest: &[usize], k: usize, vals: &mut Vec<usize>) -> Result<Complex64> {
        if k == rest.len() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let v = rest[k];
        let mut total = Complex64::new(0.0, 0.0);
        'values: for x in 1..=self.n {
            vals[v] = x;
            let mut w = self.unary[v][x - 1];
            for &o in &rest[..k] {
                if self.pairs.contains_key(&Self::key(v, o)) {
                    let p = self.pair_value(v, o, x, vals[o])?;
                    if p == Complex64::new(0.0, 0.0) {
                        continue 'values;
                    }
                    w *= p;
                }
            }
            total += w * self.enumerate_from(rest, k + 1, vals)?;
        }
        Ok(total)
    }
}

fn check_finite(v: Complex64, a: VarId, b: VarId, xa: usize, xb: usize) -> Result<()> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(())
    } else {
        Err(Error::Internal(format!(
            "non-finite summand at {a} = {xa}, {b} = {xb} (pole not excluded by the domain)"
        )))
    }
}

/// Prefix and suffix sums of `w[x - 1]`, for region sums relative to a point.
struct RangeSums<'a> {
    w: &'a [Complex64],
    prefix: Vec<Complex64>,
    suffix: Vec<Complex64>,
}

impl<'a> RangeSums<'a> {
    fn new(w: &'a [Complex64]) -> Self {
        let n = w.len();
        let mut prefix = vec![Complex64::new(0.0, 0.0); n + 1];
        for x in 0..n {
            prefix[x + 1] = prefix[x] + w[x];
        }
        let mut suffix = vec![Complex64::new(0.0, 0.0); n + 2];
        for x in (0..n).rev() {
            suffix[x + 1] = suffix[x + 2] + w[x];
        }
        RangeSums { w, prefix, suffix }
    }

    /// Sum of `w(x)` over `x` with `x ? at` in `mask`.
    fn region(&self, mask: u8, at: usize) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        if mask & LESS != 0 {
            s += self.prefix[at - 1];
        }
        if mask & EQUAL != 0 {
            s += self.w[at - 1];
        }
        if mask & GREATER != 0 {
            s += self.suffix[at + 1];
        }
        s
    }
}

/// `x^{-e}` for `x = 1..=n`, as `exp(-e ln x)`.
pub fn power_table(e: Complex64, n: u64) -> Vec<Complex64> {
    (1..=n)
        .map(|x| {
            if e == Complex64::new(0.0, 0.0) {
                Complex64::new(1.0, 0.0)
            } else {
                (-e * (x as f64).ln()).exp()
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Constraint, Shape};

    fn sys(shape: &str, extra: bool, cons: &[Constraint]) -> ConstraintSystem {
        let shape: Shape = shape.parse().unwrap();
        ConstraintSystem::new(shape, extra, cons.iter().copied()).unwrap()
    }

    const A: VarId = VarId::Block(1, 1);
    const B: VarId = VarId::Block(2, 1);
    const C: VarId = VarId::Block(3, 1);

    #[test]
    fn masks() {
        assert_eq!(flip(LESS), GREATER);
        assert_eq!(flip(LESS | EQUAL), GREATER | EQUAL);
        assert!(holds(LESS | EQUAL, 3, 3));
        assert!(!holds(LESS, 3, 3));
    }

    #[test]
    fn range_sums() {
        let w: Vec<Complex64> = (1..=5).map(|x| Complex64::new(x as f64, 0.0)).collect();
        let s = RangeSums::new(&w);
        assert_eq!(s.region(LESS, 3).re, 3.0);
        assert_eq!(s.region(LESS | EQUAL, 3).re, 6.0);
        assert_eq!(s.region(GREATER, 3).re, 9.0);
        assert_eq!(s.region(ANY, 1).re, 15.0);
    }

    #[test]
    fn counts_points_of_a_triangle() {
        // a < b < c on [1, 6]: C(6, 3) = 20; a <= b <= c: C(8, 3) = 56.
        let cs = sys("1,1,1", false, &[Constraint::lt(A, B), Constraint::lt(B, C)]);
        let g = FactorGraph::new(&cs, 6, EngineLimits::default()).unwrap();
        assert_eq!(g.sum().unwrap().re, 20.0);
        let cs = sys("1,1,1", false, &[Constraint::le(A, B), Constraint::le(B, C), Constraint::le(A, C)]);
        let g = FactorGraph::new(&cs, 6, EngineLimits::default()).unwrap();
        assert_eq!(g.sum().unwrap().re, 56.0);
    }

    #[test]
    fn unconstrained_sum_is_a_product() {
        let cs = sys("1,1", false, &[]);
        let mut g = FactorGraph::new(&cs, 4, EngineLimits::default()).unwrap();
        let t: Vec<Complex64> = (1..=4).map(|x| Complex64::new(x as f64, 0.0)).collect();
        g.mul_unary(A, &t).unwrap();
        g.mul_unary(B, &t).unwrap();
        assert_eq!(g.sum().unwrap().re, 100.0);
    }

    #[test]
    fn pole_outside_support_is_never_evaluated() {
        let cs = sys("1", true, &[Constraint::lt(A, VarId::Extra)]);
        let mut g = FactorGraph::new(&cs, 3, EngineLimits::default()).unwrap();
        g.mul_pair(A, VarId::Extra, |a, n| Complex64::new(1.0 / (n as f64 - a as f64), 0.0))
            .unwrap();
        // (a, n) in {(1,2), (1,3), (2,3)}: 1 + 1/2 + 1 = 2.5
        assert_eq!(g.sum().unwrap().re, 2.5);
    }

    #[test]
    fn pole_on_the_diagonal_is_an_internal_error() {
        let cs = sys("1", true, &[]);
        let mut g = FactorGraph::new(&cs, 3, EngineLimits::default()).unwrap();
        g.mul_pair(A, VarId::Extra, |a, n| Complex64::new(1.0 / (n as f64 - a as f64), 0.0))
            .unwrap();
        assert!(matches!(g.sum(), Err(Error::Internal(_))));
    }

    #[test]
    fn dense_cap_is_enforced() {
        let cs = sys("1,1,1", false, &[Constraint::le(A, B), Constraint::le(B, C), Constraint::le(C, A)]);
        let limits = EngineLimits {
            max_dense_cutoff: 10,
            ..Default::default()
        };
        // Any elimination on a triangle needs an N x N table.
        let g = FactorGraph::new(&cs, 20, limits).unwrap();
        assert!(matches!(g.sum(), Err(Error::Budget(_))));
    }

    #[test]
    fn power_table_values() {
        let t = power_table(Complex64::new(2.0, 0.0), 3);
        assert_eq!(t[0].re, 1.0);
        assert!((t[2].re - 1.0 / 9.0).abs() < 1e-15);
        let z = power_table(Complex64::new(0.0, 0.0), 2);
        assert_eq!(z, vec![Complex64::new(1.0, 0.0); 2]);
    }
}
