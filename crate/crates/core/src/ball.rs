//! Proper balls of the boundary Cantor space.
//!
//! Under the visual metric `dist(x, y) = d^{-N}` (with `N` the length of the
//! longest common prefix), the balls of the boundary other than the whole
//! space are exactly the cylinder sets `∂T^a` over non-root addresses `a`,
//! and `diam(∂T^a) = d^{-level(a)}`. Two balls are equal, nested, or
//! disjoint according to the prefix relation of their addresses.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational, One};

use crate::address::Address;
use crate::error::{Error, Result};
use crate::shape::Shape;

/// A proper ball `∂T^a` of the boundary, addressed by a non-root vertex.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ball {
    addr: Address,
}

/// Outcome of the prefix trichotomy for a pair of balls.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BallRelation {
    Disjoint,
    Equal,
    FirstInsideSecond,
    SecondInsideFirst,
}

impl Ball {
    /// Wraps an address as a ball; the root is not a proper ball.
    pub fn new(addr: Address) -> Result<Ball> {
        if addr.is_root() {
            return Err(Error::Domain(
                "the whole boundary is not a proper ball".into(),
            ));
        }
        Ok(Ball { addr })
    }

    pub fn address(&self) -> &Address {
        &self.addr
    }

    pub fn shape(&self) -> Shape {
        self.addr.shape()
    }

    /// Depth of the defining address; always at least 1.
    pub fn level(&self) -> usize {
        self.addr.level()
    }

    /// Exact diameter `d^{-level}` as a rational number.
    pub fn diameter(&self) -> BigRational {
        let den = BigInt::from(self.shape().d()).pow(self.level() as u32);
        BigRational::new(BigInt::one(), den)
    }

    /// Whether `self` contains `other` (possibly equal).
    pub fn contains(&self, other: &Ball) -> bool {
        self.addr.is_prefix_of(&other.addr)
    }

    /// Whether `self` is strictly inside `other`.
    pub fn strictly_inside(&self, other: &Ball) -> bool {
        other.contains(self) && self != other
    }

    pub fn relation(&self, other: &Ball) -> Result<BallRelation> {
        ball_relation(self, other)
    }

    /// Parses the dotted address form (the `root` token is rejected).
    pub fn parse(shape: Shape, text: &str) -> Result<Ball> {
        Ball::new(Address::parse(shape, text)?)
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.addr.fmt(f)
    }
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ball({})", self.addr)
    }
}

/// Prefix trichotomy for balls: disjoint, equal, or nested.
pub fn ball_relation(first: &Ball, second: &Ball) -> Result<BallRelation> {
    first.shape().expect_same(second.shape())?;
    if first == second {
        return Ok(BallRelation::Equal);
    }
    if second.contains(first) {
        return Ok(BallRelation::FirstInsideSecond);
    }
    if first.contains(second) {
        return Ok(BallRelation::SecondInsideFirst);
    }
    Ok(BallRelation::Disjoint)
}

/// The final (rightmost) ball of the `n`-sphere: address `(k-1).(d-1)^{n-1}`.
pub fn last_ball(shape: Shape, n: u32) -> Result<Ball> {
    if n < 1 {
        return Err(Error::Domain("sphere index must be at least 1".into()));
    }
    let mut digits = vec![shape.k() - 1];
    digits.extend(std::iter::repeat_n(shape.d() - 1, n as usize - 1));
    Ball::new(Address::new(shape, digits)?)
}

/// The penultimate ball of the `n`-sphere: address `(k-1).(d-1)^{n-2}.(d-2)`,
/// defined for `n >= 2`.
pub fn penult_ball(shape: Shape, n: u32) -> Result<Ball> {
    if n < 2 {
        return Err(Error::Domain(
            "penultimate sphere ball needs index at least 2".into(),
        ));
    }
    let mut digits = vec![shape.k() - 1];
    digits.extend(std::iter::repeat_n(shape.d() - 1, n as usize - 2));
    digits.push(shape.d() - 2);
    Ball::new(Address::new(shape, digits)?)
}

/// Depth gap down the rightmost branch: the greatest `l >= 1` such that both
/// balls lie inside `last_ball(l)`. Undefined (an error) when either ball
/// leaves the rightmost branch already at level 1.
pub fn delta_depth(a: &Ball, b: &Ball) -> Result<u32> {
    a.shape().expect_same(b.shape())?;
    let shape = a.shape();
    let run = |ball: &Ball| -> u32 {
        let digits = ball.address().digits();
        if digits[0] != shape.k() - 1 {
            return 0;
        }
        let mut l = 1;
        for &digit in &digits[1..] {
            if digit == shape.d() - 1 {
                l += 1;
            } else {
                break;
            }
        }
        l
    };
    let depth = run(a).min(run(b));
    if depth < 1 {
        return Err(Error::Partiality(format!(
            "{a} and {b} do not both lie inside {}",
            last_ball(shape, 1)?
        )));
    }
    Ok(depth)
}

/// Planar comparison of the underlying addresses (undefined on nested balls).
pub fn planar_compare(a: &Ball, b: &Ball) -> Result<Ordering> {
    crate::address::planar_compare(a.address(), b.address())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sh(d: u32, k: u32) -> Shape {
        Shape::new(d, k).unwrap()
    }

    fn ball(text: &str) -> Ball {
        Ball::parse(sh(2, 2), text).unwrap()
    }

    #[test]
    fn root_is_not_a_ball() {
        assert!(Ball::new(Address::root(sh(2, 2))).is_err());
        assert!(Ball::parse(sh(2, 2), "root").is_err());
    }

    #[test]
    fn relation_examples() {
        assert_eq!(
            ball_relation(&ball("0.1"), &ball("0")).unwrap(),
            BallRelation::FirstInsideSecond
        );
        assert_eq!(
            ball_relation(&ball("0"), &ball("0.1")).unwrap(),
            BallRelation::SecondInsideFirst
        );
        assert_eq!(
            ball_relation(&ball("1.0"), &ball("1.1")).unwrap(),
            BallRelation::Disjoint
        );
        assert_eq!(
            ball_relation(&ball("1.0"), &ball("1.0")).unwrap(),
            BallRelation::Equal
        );
    }

    #[test]
    fn relation_is_a_trichotomy_on_small_trees() {
        // Exhaustive over all pairs of addresses up to level 5 at (2,2) and
        // level 3 at (3,3): exactly one relation holds and it is symmetric.
        for (d, k, max_level) in [(2u32, 2u32, 5usize), (3, 3, 3)] {
            let shape = sh(d, k);
            let mut all = Vec::new();
            let mut frontier = vec![Address::root(shape)];
            for _ in 0..max_level {
                let mut next = Vec::new();
                for a in &frontier {
                    for j in 0..shape.arity_at(a.level()) {
                        next.push(a.child(j).unwrap());
                    }
                }
                all.extend(next.iter().cloned());
                frontier = next;
            }
            let balls: Vec<Ball> = all.into_iter().map(|a| Ball::new(a).unwrap()).collect();
            for x in &balls {
                for y in &balls {
                    let r = ball_relation(x, y).unwrap();
                    let mirror = ball_relation(y, x).unwrap();
                    let expected = match r {
                        BallRelation::Disjoint => BallRelation::Disjoint,
                        BallRelation::Equal => BallRelation::Equal,
                        BallRelation::FirstInsideSecond => BallRelation::SecondInsideFirst,
                        BallRelation::SecondInsideFirst => BallRelation::FirstInsideSecond,
                    };
                    assert_eq!(mirror, expected, "asymmetric relation for {x}, {y}");
                    let by_prefix = (
                        x.address().is_prefix_of(y.address()),
                        y.address().is_prefix_of(x.address()),
                    );
                    let expected_r = match by_prefix {
                        (true, true) => BallRelation::Equal,
                        (true, false) => BallRelation::SecondInsideFirst,
                        (false, true) => BallRelation::FirstInsideSecond,
                        (false, false) => BallRelation::Disjoint,
                    };
                    assert_eq!(r, expected_r);
                }
            }
        }
    }

    #[test]
    fn diameter_is_exact() {
        let quarter = BigRational::new(BigInt::from(1), BigInt::from(4));
        assert_eq!(ball("1.0").diameter(), quarter);
        let ninth = BigRational::new(BigInt::from(1), BigInt::from(9));
        assert_eq!(
            Ball::parse(sh(3, 2), "1.2").unwrap().diameter(),
            ninth
        );
        // Diameter strictly decreases along proper nesting.
        assert!(ball("1.0").diameter() < ball("1").diameter());
    }

    #[test]
    fn rightmost_branch_balls() {
        assert_eq!(last_ball(sh(2, 2), 3).unwrap(), ball("1.1.1"));
        assert_eq!(penult_ball(sh(2, 2), 3).unwrap(), ball("1.1.0"));
        assert_eq!(
            last_ball(sh(3, 2), 2).unwrap(),
            Ball::parse(sh(3, 2), "1.2").unwrap()
        );
        assert_eq!(
            penult_ball(sh(3, 2), 2).unwrap(),
            Ball::parse(sh(3, 2), "1.1").unwrap()
        );
        assert!(penult_ball(sh(2, 2), 1).is_err());
        assert!(last_ball(sh(2, 2), 0).is_err());
    }

    #[test]
    fn rightmost_branch_nesting() {
        for (d, k) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            let shape = sh(d, k);
            for n in 2..=10 {
                let last_n = last_ball(shape, n).unwrap();
                let last_prev = last_ball(shape, n - 1).unwrap();
                let pen = penult_ball(shape, n).unwrap();
                assert!(last_n.strictly_inside(&last_prev));
                assert!(pen.strictly_inside(&last_prev));
                assert_eq!(
                    ball_relation(&pen, &last_n).unwrap(),
                    BallRelation::Disjoint
                );
                assert_eq!(pen.level(), last_n.level());
            }
        }
    }

    #[test]
    fn delta_depth_examples() {
        assert_eq!(delta_depth(&ball("1.1.0"), &ball("1.1.1")).unwrap(), 2);
        assert_eq!(delta_depth(&ball("1.1.1"), &ball("1.1.1.0")).unwrap(), 3);
        assert!(matches!(
            delta_depth(&ball("0"), &ball("1")),
            Err(Error::Partiality(_))
        ));
        assert!(delta_depth(&ball("1"), &ball("0.1")).is_err());
    }
}
