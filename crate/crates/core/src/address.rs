//! Vertex addresses in `T_{d,k}` and the planar (left-to-right) order.
//!
//! An address is the digit path from the root: the first digit selects one
//! of the `k` root children, every later digit one of `d` children. The
//! empty address is the root itself. Text form: dot-separated decimal
//! digits (`1.0.1`), with the literal token `root` for the empty address
//! where a context allows it.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::shape::Shape;

/// Address of a vertex of `T_{d,k}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Address {
    shape: Shape,
    digits: Vec<u32>,
}

impl Address {
    /// Builds an address, validating every digit against the shape.
    pub fn new(shape: Shape, digits: Vec<u32>) -> Result<Address> {
        for (i, &digit) in digits.iter().enumerate() {
            let arity = shape.arity_at(i);
            if digit >= arity {
                return Err(Error::Domain(format!(
                    "digit {digit} at position {i} out of range (arity {arity})"
                )));
            }
        }
        Ok(Address { shape, digits })
    }

    /// The root address (empty word).
    pub fn root(shape: Shape) -> Address {
        Address {
            shape,
            digits: Vec::new(),
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    /// Distance from the root; 0 exactly for the root.
    pub fn level(&self) -> usize {
        self.digits.len()
    }

    pub fn is_root(&self) -> bool {
        self.digits.is_empty()
    }

    /// The `j`-th child of this vertex.
    pub fn child(&self, j: u32) -> Result<Address> {
        let arity = self.shape.arity_at(self.digits.len());
        if j >= arity {
            return Err(Error::Domain(format!(
                "child index {j} out of range (arity {arity})"
            )));
        }
        let mut digits = self.digits.clone();
        digits.push(j);
        Ok(Address {
            shape: self.shape,
            digits,
        })
    }

    /// The parent vertex, or `None` at the root.
    pub fn parent(&self) -> Option<Address> {
        if self.digits.is_empty() {
            return None;
        }
        Some(Address {
            shape: self.shape,
            digits: self.digits[..self.digits.len() - 1].to_vec(),
        })
    }

    /// Whether `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Address) -> bool {
        self.shape == other.shape && other.digits.starts_with(&self.digits)
    }

    /// The digits of `other` past `self`, when `self` is a prefix.
    pub fn suffix_of<'a>(&self, other: &'a Address) -> Option<&'a [u32]> {
        if self.is_prefix_of(other) {
            Some(&other.digits[self.digits.len()..])
        } else {
            None
        }
    }

    /// `self` extended by a digit suffix. The suffix is trusted to contain
    /// non-root digits (`< d`); this holds for every suffix produced by
    /// [`Address::suffix_of`] on a non-root prefix.
    pub fn join(&self, suffix: &[u32]) -> Address {
        debug_assert!(
            self.is_root() || suffix.iter().all(|&t| t < self.shape.d()),
            "suffix digit out of range"
        );
        let mut digits = self.digits.clone();
        digits.extend_from_slice(suffix);
        Address {
            shape: self.shape,
            digits,
        }
    }

    /// Parses the dot-separated text form; `root` denotes the empty address.
    ///
    /// Digit tokens are plain decimal numbers without leading zeros, so that
    /// printing and parsing are mutually inverse byte-for-byte.
    pub fn parse(shape: Shape, text: &str) -> Result<Address> {
        if text == "root" {
            return Ok(Address::root(shape));
        }
        if text.is_empty() {
            return Err(Error::Syntax("empty address".into()));
        }
        let mut digits = Vec::new();
        for token in text.split('.') {
            if token.is_empty() {
                return Err(Error::Syntax(format!("empty digit in address {text:?}")));
            }
            if !token.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Syntax(format!(
                    "bad digit {token:?} in address {text:?}"
                )));
            }
            if token.len() > 1 && token.starts_with('0') {
                return Err(Error::Syntax(format!(
                    "leading zero in digit {token:?} of address {text:?}"
                )));
            }
            let digit: u32 = token
                .parse()
                .map_err(|_| Error::Syntax(format!("digit {token:?} too large")))?;
            digits.push(digit);
        }
        Address::new(shape, digits)
    }
}

/// Total lexicographic word order: compare digit-by-digit, a proper prefix
/// sorts before its extensions. On a set of pairwise incomparable addresses
/// (the parts of a partition) this coincides with the planar order.
impl Ord for Address {
    fn cmp(&self, other: &Self) -> Ordering {
        self.digits
            .cmp(&other.digits)
            .then_with(|| (self.shape.d(), self.shape.k()).cmp(&(other.shape.d(), other.shape.k())))
    }
}

impl PartialOrd for Address {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Left-to-right comparison of the subtrees hanging at two addresses.
///
/// Defined exactly when neither address is a proper prefix of the other;
/// equal addresses compare `Equal`.
pub fn planar_compare(a: &Address, b: &Address) -> Result<Ordering> {
    a.shape().expect_same(b.shape())?;
    if a == b {
        return Ok(Ordering::Equal);
    }
    if a.is_prefix_of(b) {
        return Err(Error::PrefixOrder {
            first: a.to_string(),
            second: b.to_string(),
        });
    }
    if b.is_prefix_of(a) {
        return Err(Error::PrefixOrder {
            first: b.to_string(),
            second: a.to_string(),
        });
    }
    Ok(a.digits.cmp(&b.digits))
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return f.write_str("root");
        }
        let mut first = true;
        for d in &self.digits {
            if !first {
                f.write_str(".")?;
            }
            write!(f, "{d}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Address({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sh(d: u32, k: u32) -> Shape {
        Shape::new(d, k).unwrap()
    }

    fn addr(text: &str) -> Address {
        Address::parse(sh(2, 2), text).unwrap()
    }

    #[test]
    fn validates_digit_ranges() {
        let s = sh(2, 3);
        // First digit may reach k-1 = 2, later digits only d-1 = 1.
        assert!(Address::new(s, vec![2, 1, 0]).is_ok());
        assert!(Address::new(s, vec![3]).is_err());
        assert!(Address::new(s, vec![2, 2]).is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in ["root", "0", "1", "1.0.1", "0.1.1.0"] {
            assert_eq!(addr(text).to_string(), text);
        }
        assert!(Address::parse(sh(2, 2), "").is_err());
        assert!(Address::parse(sh(2, 2), "1..0").is_err());
        assert!(Address::parse(sh(2, 2), "01").is_err());
        assert!(Address::parse(sh(2, 2), "x").is_err());
        assert!(Address::parse(sh(2, 2), "2").is_err());
    }

    #[test]
    fn multi_digit_tokens_parse_on_wide_shapes() {
        let s = sh(12, 15);
        let a = Address::parse(s, "14.11.0").unwrap();
        assert_eq!(a.digits(), &[14, 11, 0]);
        assert_eq!(a.to_string(), "14.11.0");
    }

    #[test]
    fn planar_compare_orders_disjoint_subtrees() {
        assert_eq!(
            planar_compare(&addr("0.1"), &addr("1.0")).unwrap(),
            Ordering::Less
        );
        assert_eq!(
            planar_compare(&addr("1.1"), &addr("1.0")).unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            planar_compare(&addr("1.0"), &addr("1.0")).unwrap(),
            Ordering::Equal
        );
    }

    #[test]
    fn planar_compare_rejects_prefix_pairs() {
        assert!(matches!(
            planar_compare(&addr("1"), &addr("1.0")),
            Err(Error::PrefixOrder { .. })
        ));
        assert!(matches!(
            planar_compare(&addr("1.0"), &addr("1")),
            Err(Error::PrefixOrder { .. })
        ));
        assert!(planar_compare(&addr("root"), &addr("0")).is_err());
    }

    #[test]
    fn prefix_and_suffix() {
        let a = addr("1");
        let b = addr("1.0.1");
        assert!(a.is_prefix_of(&b));
        assert!(!b.is_prefix_of(&a));
        assert_eq!(a.suffix_of(&b).unwrap(), &[0, 1]);
        assert_eq!(a.join(&[0, 1]), b);
    }
}
