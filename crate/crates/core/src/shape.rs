//! Tree shapes: the valency data `(d, k)` of a rooted tree `T_{d,k}`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Shape of the rooted tree `T_{d,k}`: the root has `k` children and every
/// other vertex has `d` children. Both valencies are at least 2, so the
/// boundary is a Cantor space.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Shape {
    d: u32,
    k: u32,
}

impl Shape {
    /// Builds a shape, rejecting degenerate valencies.
    pub fn new(d: u32, k: u32) -> Result<Shape> {
        if d < 2 || k < 2 {
            return Err(Error::Domain(format!(
                "shape requires d >= 2 and k >= 2, got d={d} k={k}"
            )));
        }
        Ok(Shape { d, k })
    }

    /// Number of children of a non-root vertex.
    pub fn d(&self) -> u32 {
        self.d
    }

    /// Number of children of the root.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Number of children of a vertex at the given depth (0 = root).
    pub fn arity_at(&self, depth: usize) -> u32 {
        if depth == 0 {
            self.k
        } else {
            self.d
        }
    }

    /// Checks that `other` is the same shape, for operations that mix values.
    pub(crate) fn expect_same(&self, other: Shape) -> Result<()> {
        if *self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch {
                expected: *self,
                found: other,
            })
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(d={}, k={})", self.d, self.k)
    }
}

impl FromStr for Shape {
    type Err = Error;

    /// Parses the compact `d,k` form used on the command line, e.g. `2,2`.
    fn from_str(s: &str) -> Result<Shape> {
        let (d, k) = s
            .split_once(',')
            .ok_or_else(|| Error::Syntax(format!("expected shape as d,k — got {s:?}")))?;
        let parse = |t: &str| {
            t.parse::<u32>()
                .map_err(|_| Error::Syntax(format!("bad valency {t:?} in shape {s:?}")))
        };
        Shape::new(parse(d)?, parse(k)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_valencies() {
        assert!(Shape::new(1, 2).is_err());
        assert!(Shape::new(2, 1).is_err());
        assert!(Shape::new(0, 0).is_err());
        assert!(Shape::new(2, 2).is_ok());
    }

    #[test]
    fn parses_compact_form() {
        let s: Shape = "3,2".parse().unwrap();
        assert_eq!((s.d(), s.k()), (3, 2));
        assert!("3".parse::<Shape>().is_err());
        assert!("a,b".parse::<Shape>().is_err());
        assert!("1,2".parse::<Shape>().is_err());
    }
}
