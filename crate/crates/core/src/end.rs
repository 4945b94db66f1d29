//! Eventually periodic ends of `T_{d,k}`.
//!
//! An end is an infinite digit ray from the root. The ends a finitary
//! almost automorphism can single out (fixed points, attractors) are the
//! eventually periodic ones, stored here as a finite preperiod plus a
//! repeating period in canonical form: the period is primitive and the
//! preperiod is as short as possible. The canonical form of a given ray is
//! unique, so equality of `End` values is equality of ends.
//!
//! Text form: `pre(period)` with dotted digits, e.g. `0.1(1.0)`, or `(1)`
//! for the purely periodic ray `1 1 1 …`.

use std::fmt;

use crate::error::{Error, Result};
use crate::shape::Shape;

/// An eventually periodic end, in canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct End {
    shape: Shape,
    pre: Vec<u32>,
    period: Vec<u32>,
}

impl End {
    /// Builds an end from any preperiod/period presentation; the stored form
    /// is canonicalized (primitive period, shortest preperiod).
    pub fn new(shape: Shape, pre: Vec<u32>, period: Vec<u32>) -> Result<End> {
        if period.is_empty() {
            return Err(Error::Domain("end period must be non-empty".into()));
        }
        for &digit in &period {
            if digit >= shape.d() {
                return Err(Error::Domain(format!(
                    "period digit {digit} out of range (arity {})",
                    shape.d()
                )));
            }
        }
        for (i, &digit) in pre.iter().enumerate() {
            let arity = shape.arity_at(i);
            if digit >= arity {
                return Err(Error::Domain(format!(
                    "preperiod digit {digit} at position {i} out of range (arity {arity})"
                )));
            }
        }
        if pre.is_empty() && period[0] >= shape.k() {
            return Err(Error::Domain(format!(
                "leading digit {} out of range (root arity {})",
                period[0],
                shape.k()
            )));
        }
        let mut end = End { shape, pre, period };
        end.canonicalize();
        Ok(end)
    }

    fn canonicalize(&mut self) {
        // Shrink the period to its primitive root.
        let m = self.period.len();
        for l in 1..m {
            if m.is_multiple_of(l) && self.period.chunks(l).all(|c| c == &self.period[..l]) {
                self.period.truncate(l);
                break;
            }
        }
        // Absorb period copies trailing the preperiod: while the last
        // preperiod digit matches the last period digit, rotate the period
        // right and drop that digit. This yields the shortest preperiod.
        while let Some(&last) = self.pre.last() {
            if last != *self.period.last().unwrap() {
                break;
            }
            self.pre.pop();
            self.period.rotate_right(1);
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Canonical (shortest) preperiod.
    pub fn preperiod(&self) -> &[u32] {
        &self.pre
    }

    /// Canonical (primitive) period.
    pub fn period(&self) -> &[u32] {
        &self.period
    }

    /// The digit of the ray at 0-based position `i`.
    pub fn digit_at(&self, i: usize) -> u32 {
        if i < self.pre.len() {
            self.pre[i]
        } else {
            self.period[(i - self.pre.len()) % self.period.len()]
        }
    }

    /// Whether the ray passes through the vertex at `addr`.
    pub fn starts_with(&self, addr: &crate::address::Address) -> bool {
        addr.shape() == self.shape
            && addr
                .digits()
                .iter()
                .enumerate()
                .all(|(i, &d)| self.digit_at(i) == d)
    }

    /// The tail of the ray after dropping its first `n` digits, as a raw
    /// preperiod/period pair (not itself a valid `End` of the whole tree
    /// unless re-prefixed, since the leading digit may exceed the root
    /// arity).
    pub(crate) fn drop_digits(&self, n: usize) -> (Vec<u32>, Vec<u32>) {
        if n <= self.pre.len() {
            (self.pre[n..].to_vec(), self.period.clone())
        } else {
            let shift = (n - self.pre.len()) % self.period.len();
            let mut period = self.period.clone();
            period.rotate_left(shift);
            (Vec::new(), period)
        }
    }

    /// Parses the `pre(period)` text form.
    pub fn parse(shape: Shape, text: &str) -> Result<End> {
        let open = text
            .find('(')
            .ok_or_else(|| Error::Syntax(format!("end {text:?} lacks a (period)")))?;
        if !text.ends_with(')') {
            return Err(Error::Syntax(format!("end {text:?} lacks a closing paren")));
        }
        let digits = |part: &str, what: &str| -> Result<Vec<u32>> {
            if part.is_empty() {
                return Ok(Vec::new());
            }
            part.split('.')
                .map(|token| {
                    if token.is_empty()
                        || !token.bytes().all(|b| b.is_ascii_digit())
                        || (token.len() > 1 && token.starts_with('0'))
                    {
                        return Err(Error::Syntax(format!("bad {what} digit {token:?}")));
                    }
                    token
                        .parse::<u32>()
                        .map_err(|_| Error::Syntax(format!("{what} digit {token:?} too large")))
                })
                .collect()
        };
        let pre = digits(&text[..open], "preperiod")?;
        let period = digits(&text[open + 1..text.len() - 1], "period")?;
        End::new(shape, pre, period)
    }
}

impl fmt::Display for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |digits: &[u32]| {
            digits
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(".")
        };
        write!(f, "{}({})", join(&self.pre), join(&self.period))
    }
}

impl fmt::Debug for End {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "End({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::Address;

    fn sh(d: u32, k: u32) -> Shape {
        Shape::new(d, k).unwrap()
    }

    #[test]
    fn canonicalizes_period_to_primitive_root() {
        let e = End::new(sh(2, 2), vec![], vec![1, 0, 1, 0]).unwrap();
        assert_eq!(e.period(), &[1, 0]);
        assert_eq!(e.preperiod(), &[] as &[u32]);
    }

    #[test]
    fn canonicalizes_preperiod_to_shortest() {
        // 0 1 0 (1 0)^inf is the purely periodic ray (0 1)^inf.
        let e = End::new(sh(2, 2), vec![0, 1, 0], vec![1, 0]).unwrap();
        assert_eq!(e.preperiod(), &[] as &[u32]);
        assert_eq!(e.period(), &[0, 1]);
        assert_eq!(e.to_string(), "(0.1)");
    }

    #[test]
    fn canonical_forms_decide_equality() {
        let a = End::new(sh(2, 2), vec![1], vec![1]).unwrap();
        let b = End::new(sh(2, 2), vec![], vec![1, 1, 1]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "(1)");
    }

    #[test]
    fn validates_digits() {
        // Root arity bounds the first digit only.
        assert!(End::new(sh(2, 3), vec![2], vec![0]).is_ok());
        assert!(End::new(sh(2, 3), vec![2, 2], vec![0]).is_err());
        assert!(End::new(sh(2, 3), vec![], vec![2]).is_err());
        assert!(End::new(sh(3, 2), vec![], vec![2]).is_err());
        assert!(End::new(sh(2, 2), vec![0], vec![]).is_err());
    }

    #[test]
    fn digit_access_and_prefix_test() {
        let e = End::new(sh(2, 2), vec![0], vec![1, 0]).unwrap();
        let digits: Vec<u32> = (0..6).map(|i| e.digit_at(i)).collect();
        assert_eq!(digits, vec![0, 1, 0, 1, 0, 1]);
        assert!(e.starts_with(&Address::parse(sh(2, 2), "0.1.0.1").unwrap()));
        assert!(!e.starts_with(&Address::parse(sh(2, 2), "0.1.1").unwrap()));
        assert!(e.starts_with(&Address::root(sh(2, 2))));
    }

    #[test]
    fn parse_display_round_trip() {
        for text in ["(1)", "(0.1)", "0(1)", "1.0(0.1)"] {
            let e = End::parse(sh(2, 2), text).unwrap();
            assert_eq!(e.to_string(), text, "canonical text should round-trip");
        }
        // Non-canonical input parses to the canonical form.
        let e = End::parse(sh(2, 2), "1(1)").unwrap();
        assert_eq!(e.to_string(), "(1)");
        assert!(End::parse(sh(2, 2), "1.1").is_err());
        assert!(End::parse(sh(2, 2), "(1").is_err());
        assert!(End::parse(sh(2, 2), "()").is_err());
    }

    #[test]
    fn drop_digits_rotates_into_the_period() {
        let e = End::parse(sh(2, 2), "0(1.0)").unwrap();
        // Ray 0 1 0 1 0 ...; dropping 2 digits leaves 0 1 0 1 ... = (0 1)^inf.
        let (pre, period) = e.drop_digits(2);
        assert!(pre.is_empty());
        assert_eq!(period, vec![0, 1]);
    }
}
