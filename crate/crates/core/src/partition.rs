//! Regular partitions of the boundary.
//!
//! A regular partition cuts the boundary of `T_{d,k}` into finitely many
//! proper balls: the ball addresses form a complete prefix code, so every
//! end passes through exactly one of them. Partitions are kept sorted in
//! planar (lexicographic) order, which makes equality structural and
//! display deterministic.
//!
//! Text form: comma-separated ball addresses in planar order, e.g.
//! `0.0,0.1,1`; parsing tolerates whitespace around the commas.

use std::fmt;

use crate::address::Address;
use crate::ball::Ball;
use crate::end::End;
use crate::error::{Error, Result};
use crate::shape::Shape;

/// Hard cap on the number of parts a constructed spherical partition may
/// have; guards against runaway `d^n` blow-ups from CLI input.
pub const SPHERICAL_PART_CAP: u64 = 1_000_000;

/// A finite partition of the boundary into proper balls, i.e. a complete
/// prefix code of non-root addresses, sorted in planar order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RegularPartition {
    shape: Shape,
    balls: Vec<Ball>,
}

impl RegularPartition {
    /// Builds a partition after checking the balls tile the whole boundary
    /// with no overlap.
    pub fn new(shape: Shape, mut balls: Vec<Ball>) -> Result<RegularPartition> {
        for ball in &balls {
            shape.expect_same(ball.address().shape())?;
        }
        balls.sort();
        let suffixes: Vec<&[u32]> = balls.iter().map(|b| b.address().digits()).collect();
        check_complete(shape, &mut Vec::new(), &suffixes)?;
        Ok(RegularPartition { shape, balls })
    }

    /// The spherical partition into all `k * d^(n-1)` balls of level `n >= 1`.
    pub fn spherical(shape: Shape, n: u32) -> Result<RegularPartition> {
        if n == 0 {
            return Err(Error::Domain(
                "spherical partitions exist for levels n >= 1 only".into(),
            ));
        }
        let mut size: u64 = shape.k() as u64;
        for _ in 1..n {
            size = size.saturating_mul(shape.d() as u64);
            if size > SPHERICAL_PART_CAP {
                return Err(Error::SizeCapExceeded {
                    cap: SPHERICAL_PART_CAP,
                });
            }
        }
        let mut balls = Vec::with_capacity(size as usize);
        let mut digits = vec![0u32; n as usize];
        loop {
            balls.push(Ball::new(Address::new(shape, digits.clone())?)?);
            // Increment the digit word odometer-style, least significant last.
            let mut pos = n as usize;
            loop {
                if pos == 0 {
                    return RegularPartition::new(shape, balls);
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < shape.arity_at(pos) {
                    break;
                }
                digits[pos] = 0;
            }
        }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// The parts, sorted in planar order.
    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Index of `ball` among the parts, if it is one.
    pub fn index_of(&self, ball: &Ball) -> Option<usize> {
        self.balls.binary_search(ball).ok()
    }

    /// The unique part containing the vertex at `addr` (i.e. whose address
    /// is a prefix of `addr`), if the vertex is deep enough to lie inside
    /// one.
    pub fn part_containing_address(&self, addr: &Address) -> Option<&Ball> {
        self.balls
            .iter()
            .find(|b| b.address().is_prefix_of(addr))
    }

    /// The unique part containing `ball`, if `ball` is small enough to sit
    /// inside one part.
    pub fn part_containing_ball(&self, ball: &Ball) -> Option<&Ball> {
        self.balls.iter().find(|b| b.contains(ball))
    }

    /// The unique part the end passes through.
    pub fn part_containing_end(&self, end: &End) -> &Ball {
        self.balls
            .iter()
            .find(|b| end.starts_with(b.address()))
            .expect("a complete prefix code covers every end")
    }

    /// Whether every part of `self` sits inside a part of `coarser`.
    pub fn refines(&self, coarser: &RegularPartition) -> Result<bool> {
        self.shape.expect_same(coarser.shape)?;
        Ok(self
            .balls
            .iter()
            .all(|b| coarser.part_containing_ball(b).is_some()))
    }

    /// The coarsest partition refining both inputs: for each pair of
    /// intersecting parts keep the smaller one.
    pub fn common_refinement(&self, other: &RegularPartition) -> Result<RegularPartition> {
        self.shape.expect_same(other.shape)?;
        let mut balls: Vec<Ball> = self
            .balls
            .iter()
            .filter(|b| other.part_containing_ball(b).is_some())
            .cloned()
            .collect();
        balls.extend(
            other
                .balls
                .iter()
                .filter(|c| self.balls.iter().any(|b| c.strictly_inside(b)))
                .cloned(),
        );
        RegularPartition::new(self.shape, balls)
    }

    /// Parses the comma-separated text form.
    pub fn parse(shape: Shape, text: &str) -> Result<RegularPartition> {
        let balls = text
            .split(',')
            .map(|token| Ball::parse(shape, token.trim()))
            .collect::<Result<Vec<_>>>()?;
        RegularPartition::new(shape, balls)
    }
}

/// Recursive completeness check: `suffixes` are the digit words of all code
/// addresses below the current prefix, with the prefix digits already
/// consumed and `prefix.len()` digits consumed so far.
fn check_complete(shape: Shape, prefix: &mut Vec<u32>, suffixes: &[&[u32]]) -> Result<()> {
    let here = |prefix: &[u32]| {
        if prefix.is_empty() {
            "root".to_string()
        } else {
            prefix
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    };
    if suffixes.len() == 1 && suffixes[0].is_empty() {
        return Ok(());
    }
    if let Some(pos) = suffixes.iter().position(|s| s.is_empty()) {
        // One code word is this prefix itself while others extend it (or
        // repeat it): two parts would overlap.
        let other = suffixes
            .iter()
            .enumerate()
            .find(|&(i, _)| i != pos)
            .map(|(_, s)| s)
            .expect("len > 1");
        let mut second = prefix.clone();
        second.extend_from_slice(other);
        return Err(Error::Overlap {
            first: here(prefix),
            second: here(&second),
        });
    }
    let arity = shape.arity_at(prefix.len());
    // Suffixes arrive sorted, so each first-digit group is contiguous.
    let mut start = 0usize;
    for digit in 0..arity {
        let end = suffixes[start..]
            .iter()
            .position(|s| s[0] != digit)
            .map_or(suffixes.len(), |p| start + p);
        if start == end {
            prefix.push(digit);
            let missing = here(prefix);
            prefix.pop();
            return Err(Error::Incomplete {
                missing_below: missing,
            });
        }
        let children: Vec<&[u32]> = suffixes[start..end].iter().map(|s| &s[1..]).collect();
        prefix.push(digit);
        let result = check_complete(shape, prefix, &children);
        prefix.pop();
        result?;
        start = end;
    }
    debug_assert_eq!(start, suffixes.len(), "digits are validated by Address");
    Ok(())
}

impl fmt::Display for RegularPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.balls.iter().map(|b| b.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl fmt::Debug for RegularPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sh(d: u32, k: u32) -> Shape {
        Shape::new(d, k).unwrap()
    }

    fn part(d: u32, k: u32, text: &str) -> RegularPartition {
        RegularPartition::parse(sh(d, k), text).unwrap()
    }

    #[test]
    fn accepts_complete_codes_and_sorts_them() {
        let p = part(2, 2, "1, 0.1, 0.0");
        assert_eq!(p.to_string(), "0.0,0.1,1");
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn rejects_gaps_and_overlaps() {
        match RegularPartition::parse(sh(2, 2), "0.0, 1") {
            Err(Error::Incomplete { missing_below }) => assert_eq!(missing_below, "0.1"),
            other => panic!("expected Incomplete, got {other:?}"),
        }
        match RegularPartition::parse(sh(2, 2), "0, 0.0, 1") {
            Err(Error::Overlap { first, second }) => {
                assert_eq!(first, "0");
                assert_eq!(second, "0.0");
            }
            other => panic!("expected Overlap, got {other:?}"),
        }
        match RegularPartition::parse(sh(2, 2), "0, 0, 1") {
            Err(Error::Overlap { first, second }) => {
                assert_eq!(first, "0");
                assert_eq!(second, "0");
            }
            other => panic!("expected Overlap, got {other:?}"),
        }
        // Root arity differs from interior arity: {0, 1} is incomplete at (2, 3).
        assert!(matches!(
            RegularPartition::parse(sh(2, 3), "0, 1"),
            Err(Error::Incomplete { .. })
        ));
        assert!(RegularPartition::parse(sh(2, 3), "0, 1, 2").is_ok());
    }

    #[test]
    fn spherical_partitions() {
        assert_eq!(
            RegularPartition::spherical(sh(2, 2), 1).unwrap().to_string(),
            "0,1"
        );
        assert_eq!(
            RegularPartition::spherical(sh(2, 2), 2).unwrap().to_string(),
            "0.0,0.1,1.0,1.1"
        );
        let s2 = RegularPartition::spherical(sh(3, 2), 2).unwrap();
        assert_eq!(s2.to_string(), "0.0,0.1,0.2,1.0,1.1,1.2");
        assert_eq!(s2.len(), 6);
        assert!(RegularPartition::spherical(sh(2, 2), 0).is_err());
        assert!(matches!(
            RegularPartition::spherical(sh(2, 2), 64),
            Err(Error::SizeCapExceeded { .. })
        ));
    }

    #[test]
    fn spherical_cap_bounds_allocation_not_level() {
        // Level 20 at (d, k) = (2, 2) has 2^20 = 1048576 balls, just over the cap.
        assert!(matches!(
            RegularPartition::spherical(sh(2, 2), 20),
            Err(Error::SizeCapExceeded { .. })
        ));
        assert!(RegularPartition::spherical(sh(2, 2), 19).is_ok());
    }

    #[test]
    fn refinement_order() {
        let s1 = part(2, 2, "0, 1");
        let p = part(2, 2, "0.0, 0.1, 1");
        let q = part(2, 2, "0, 1.0, 1.1");
        assert!(p.refines(&s1).unwrap());
        assert!(!s1.refines(&p).unwrap());
        assert!(p.refines(&p).unwrap());
        assert!(!p.refines(&q).unwrap());
        let s3 = RegularPartition::spherical(sh(2, 2), 3).unwrap();
        let s2 = RegularPartition::spherical(sh(2, 2), 2).unwrap();
        assert!(s3.refines(&s2).unwrap());
    }

    #[test]
    fn common_refinement_keeps_the_smaller_part() {
        let p = part(2, 2, "0, 1.0, 1.1");
        let q = part(2, 2, "0.0, 0.1, 1");
        let r = p.common_refinement(&q).unwrap();
        assert_eq!(r.to_string(), "0.0,0.1,1.0,1.1");
        // Refining against a coarser partition returns the finer one.
        let s1 = part(2, 2, "0, 1");
        assert_eq!(q.common_refinement(&s1).unwrap(), q);
        assert_eq!(s1.common_refinement(&q).unwrap(), q);
        assert!(r.refines(&p).unwrap() && r.refines(&q).unwrap());
    }

    #[test]
    fn lookup_by_address_ball_and_end() {
        let p = part(2, 2, "0.0, 0.1, 1");
        let shape = sh(2, 2);
        let a = Address::parse(shape, "0.1.1").unwrap();
        assert_eq!(
            p.part_containing_address(&a).unwrap().to_string(),
            "0.1"
        );
        assert!(p.part_containing_address(&Address::root(shape)).is_none());
        // The level-1 ball 0 is too big to fit inside any part.
        let b0 = Ball::parse(shape, "0").unwrap();
        assert!(p.part_containing_ball(&b0).is_none());
        let deep = Ball::parse(shape, "1.0.1").unwrap();
        assert_eq!(p.part_containing_ball(&deep).unwrap().to_string(), "1");
        let e = End::parse(shape, "0.1(0)").unwrap();
        assert_eq!(p.part_containing_end(&e).to_string(), "0.1");
        assert_eq!(p.index_of(&b0), None);
        assert_eq!(p.index_of(&Ball::parse(shape, "0.1").unwrap()), Some(1));
    }
}
