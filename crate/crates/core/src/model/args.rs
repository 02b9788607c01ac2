use std::fmt;

use num_complex::Complex64;

use super::Shape;
use crate::error::{Error, Result};

/// Complex arguments `s_{i,j}` laid out by block.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexArgs {
    shape: Shape,
    values: Vec<Complex64>,
}

impl ComplexArgs {
    pub fn new(shape: Shape, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != shape.total_depth() {
            return Err(Error::Invalid(format!(
                "shape {shape} needs {} arguments, got {}",
                shape.total_depth(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Invalid(format!("non-finite argument {v}")));
        }
        Ok(ComplexArgs { shape, values })
    }

    pub fn from_real(shape: Shape, values: &[f64]) -> Result<Self> {
        Self::new(shape, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Parses blocks separated by `;`, entries by `,`, each entry `a+bi`.
    /// The shape is read off the block lengths.
    pub fn parse(s: &str) -> Result<Self> {
        let mut depths = Vec::new();
        let mut values = Vec::new();
        for block in s.split(';') {
            let entries: Vec<Complex64> = block
                .split(',')
                .map(parse_complex)
                .collect::<Result<_>>()?;
            depths.push(entries.len());
            values.extend(entries);
        }
        let shape = Shape::new(depths).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(shape, values)
    }

    /// Parses with a given shape; entries may be a flat `,`-list or `;`-blocked.
    pub fn parse_with_shape(shape: Shape, s: &str) -> Result<Self> {
        let values: Vec<Complex64> = s
            .split([',', ';'])
            .map(parse_complex)
            .collect::<Result<_>>()?;
        if values.len() != shape.total_depth() {
            return Err(Error::Parse(format!(
                "shape {shape} needs {} arguments, got {}",
                shape.total_depth(),
                values.len()
            )));
        }
        Self::new(shape, values)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.shape.offset(i, j)]
    }

    pub fn block(&self, i: usize) -> &[Complex64] {
        let start = self.shape.offset(i, 1);
        &self.values[start..start + self.shape.depth(i)]
    }

    pub fn conj(&self) -> Self {
        ComplexArgs {
            shape: self.shape.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }
}

impl fmt::Display for ComplexArgs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = (1..=self.shape.blocks())
            .map(|i| {
                self.block(i)
                    .iter()
                    .map(format_complex)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        f.write_str(&blocks.join(";"))
    }
}

pub fn format_complex(z: &Complex64) -> String {
    if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `a`, `a+bi`, `a-bi`, `bi` with decimal reals.
pub fn parse_complex(t: &str) -> Result<Complex64> {
    let t = t.trim();
    let bad = || Error::Parse(format!("bad complex number {t:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return match t.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(Complex64::new(re, 0.0)),
            _ => Err(bad()),
        };
    };
    // Split at the last sign that is not leading and not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = match im {
        "+" | "" => 1.0,
        "-" => -1.0,
        s => s.parse().map_err(|_| bad())?,
    };
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// Positive-integer arguments `k_{i,j}` laid out by block.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntArgs {
    shape: Shape,
    values: Vec<u32>,
}

impl IntArgs {
    pub fn new(shape: Shape, values: Vec<u32>) -> Result<Self> {
        if values.len() != shape.total_depth() {
            return Err(Error::Invalid(format!(
                "shape {shape} needs {} arguments, got {}",
                shape.total_depth(),
                values.len()
            )));
        }
        if values.contains(&0) {
            return Err(Error::Invalid(format!(
                "integer arguments must be positive, got {values:?}"
            )));
        }
        Ok(IntArgs { shape, values })
    }

    /// Parses `"1,2;1"`: blocks by `;`, entries by `,`.
    pub fn parse(s: &str) -> Result<Self> {
        let mut depths = Vec::new();
        let mut values = Vec::new();
        for block in s.split(';') {
            let entries: Vec<u32> = block
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad integer {t:?}")))
                })
                .collect::<Result<_>>()?;
            depths.push(entries.len());
            values.extend(entries);
        }
        let shape = Shape::new(depths).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(shape, values).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.values[self.shape.offset(i, j)]
    }

    pub fn block(&self, i: usize) -> &[u32] {
        let start = self.shape.offset(i, 1);
        &self.values[start..start + self.shape.depth(i)]
    }

    pub fn weight(&self) -> u32 {
        self.values.iter().sum()
    }

    pub fn to_complex(&self) -> ComplexArgs {
        ComplexArgs {
            shape: self.shape.clone(),
            values: self
                .values
                .iter()
                .map(|&k| Complex64::new(k as f64, 0.0))
                .collect(),
        }
    }

    /// Rotates blocks cyclically: block `i + by` becomes block `i`.
    pub fn rotate(&self, by: usize) -> Self {
        let d = self.shape.blocks();
        let order: Vec<usize> = (0..d).map(|b| (b + by) % d + 1).collect();
        let depths = order.iter().map(|&i| self.shape.depth(i)).collect();
        let values = order.iter().flat_map(|&i| self.block(i).to_vec()).collect();
        IntArgs {
            shape: Shape::new(depths).expect("rotation keeps a valid shape"),
            values,
        }
    }
}

impl fmt::Display for IntArgs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = (1..=self.shape.blocks())
            .map(|i| {
                self.block(i)
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        f.write_str(&blocks.join(";"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("3+0i").unwrap(), Complex64::new(3.0, 0.0));
        assert_eq!(parse_complex("1.6+1i").unwrap(), Complex64::new(1.6, 1.0));
        assert_eq!(parse_complex("1.5-0.5i").unwrap(), Complex64::new(1.5, -0.5));
        assert_eq!(parse_complex("-2i").unwrap(), Complex64::new(0.0, -2.0));
        assert_eq!(parse_complex("2.5").unwrap(), Complex64::new(2.5, 0.0));
        assert_eq!(parse_complex("1e-1+2e+0i").unwrap(), Complex64::new(0.1, 2.0));
        assert_eq!(parse_complex("2+i").unwrap(), Complex64::new(2.0, 1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_complex("nan").is_err());
    }

    #[test]
    fn blocked_args() {
        let s = ComplexArgs::parse("1.2+0i,2.2+0i;1.5+0i").unwrap();
        assert_eq!(s.shape().depths(), &[2, 1]);
        assert_eq!(s.get(2, 1), Complex64::new(1.5, 0.0));
        assert_eq!(s.to_string(), "1.2+0i,2.2+0i;1.5+0i");
        let flat = ComplexArgs::parse_with_shape("2,1".parse().unwrap(), "1.2,2.2,1.5").unwrap();
        assert_eq!(flat.values(), s.values());
        assert!(ComplexArgs::parse_with_shape("2".parse().unwrap(), "1").is_err());
    }

    #[test]
    fn int_args() {
        let k = IntArgs::parse("1,2;1").unwrap();
        assert_eq!(k.weight(), 4);
        assert_eq!(k.to_string(), "1,2;1");
        let r = k.rotate(1);
        assert_eq!(r.to_string(), "1;1,2");
        assert_eq!(r.shape().depths(), &[1, 2]);
        assert!(IntArgs::parse("0,2").is_err());
    }
}
