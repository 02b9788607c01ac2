use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block structure `(d; r_1, ..., r_d)`: `d` blocks of depths `r_i`.
///
/// Block and position indices are 1-based throughout the crate so that
/// `n_{i,j}` reads the same in code, output and tests.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Shape {
    depths: Vec<usize>,
}

impl Shape {
    pub fn new(depths: Vec<usize>) -> Result<Self> {
        if depths.is_empty() {
            return Err(Error::Invalid("shape needs at least one block".into()));
        }
        if depths.contains(&0) {
            return Err(Error::Invalid(format!(
                "block depths must be positive, got {depths:?}"
            )));
        }
        Ok(Shape { depths })
    }

    pub fn blocks(&self) -> usize {
        self.depths.len()
    }

    /// Depth `r_i` of block `i` (1-based).
    pub fn depth(&self, i: usize) -> usize {
        self.depths[i - 1]
    }

    pub fn depths(&self) -> &[usize] {
        &self.depths
    }

    pub fn total_depth(&self) -> usize {
        self.depths.iter().sum()
    }

    pub fn is_all_singleton(&self) -> bool {
        self.depths.iter().all(|&r| r == 1)
    }

    /// Cyclic successor of block `i`: `d + 1` wraps to `1`.
    pub fn next_block(&self, i: usize) -> usize {
        if i == self.blocks() {
            1
        } else {
            i + 1
        }
    }

    /// Cyclic predecessor of block `i`: `0` wraps to `d`.
    pub fn prev_block(&self, i: usize) -> usize {
        if i == 1 {
            self.blocks()
        } else {
            i - 1
        }
    }

    pub fn check_block(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.blocks() {
            return Err(Error::Index(format!(
                "block {i} not in 1..={}",
                self.blocks()
            )));
        }
        Ok(())
    }

    pub fn check_position(&self, i: usize, j: usize) -> Result<()> {
        self.check_block(i)?;
        if j == 0 || j > self.depth(i) {
            return Err(Error::Index(format!(
                "position {j} not in 1..={} for block {i}",
                self.depth(i)
            )));
        }
        Ok(())
    }

    /// All positions `(i, j)` in block-major order.
    pub fn positions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.depths
            .iter()
            .enumerate()
            .flat_map(|(b, &r)| (1..=r).map(move |j| (b + 1, j)))
    }

    /// Flat offset of position `(i, j)` in block-major order.
    pub fn offset(&self, i: usize, j: usize) -> usize {
        self.depths[..i - 1].iter().sum::<usize>() + j - 1
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.depths.iter().map(|r| r.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Shape {
    type Err = Error;

    /// Accepts `"2,1"`; `;` is also accepted as a separator.
    fn from_str(s: &str) -> Result<Self> {
        let depths = s
            .split([',', ';'])
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad block depth {t:?} in shape {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Shape::new(depths).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl TryFrom<Vec<usize>> for Shape {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Shape::new(v)
    }
}

impl From<Shape> for Vec<usize> {
    fn from(s: Shape) -> Self {
        s.depths
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let s: Shape = "2,1".parse().unwrap();
        assert_eq!(s.blocks(), 2);
        assert_eq!(s.total_depth(), 3);
        assert_eq!(s.to_string(), "2,1");
        let t: Shape = "1;1".parse().unwrap();
        assert!(t.is_all_singleton());
        assert!("".parse::<Shape>().is_err());
        assert!("2,0".parse::<Shape>().is_err());
        assert!("x".parse::<Shape>().is_err());
    }

    #[test]
    fn wraparound() {
        let s = Shape::new(vec![2, 1, 3]).unwrap();
        assert_eq!(s.next_block(3), 1);
        assert_eq!(s.prev_block(1), 3);
        assert_eq!(s.offset(3, 2), 4);
        assert_eq!(s.positions().count(), 6);
        assert!(s.check_position(2, 2).is_err());
        assert!(s.check_block(4).is_err());
    }
}
