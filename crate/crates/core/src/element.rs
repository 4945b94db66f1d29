//! Finitary almost automorphisms of `T_{d,k}` in reduced leaf-map form.
//!
//! An element is stored as a finite bijection between two complete prefix
//! codes: a list of pairs `(p, q)` meaning every end `p.s` maps to `q.s`.
//! Construction always reduces to the canonical form in which no block of
//! `d` sibling pairs can be merged into its parents, so structural equality
//! of `AAutElement` values is equality in the group.
//!
//! The durable text form is a small line-based format:
//!
//! ```text
//! aaut v1
//! shape d=2 k=2
//! map 0.0 -> 0
//! map 0.1 -> 1.0
//! map 1 -> 1.1
//! ```
//!
//! [`AAutElement::serialize`] emits exactly this (maps sorted in planar
//! order, single trailing newline), and [`AAutElement::parse_text`] accepts
//! exactly this, so parse ∘ serialize is the identity on bytes for files in
//! canonical form.

use std::fmt;

use crate::address::Address;
use crate::ball::Ball;
use crate::end::End;
use crate::error::{Error, Result};
use crate::partition::RegularPartition;
use crate::shape::Shape;

/// A finitary almost automorphism, canonically reduced.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AAutElement {
    shape: Shape,
    /// `(domain leaf, range leaf)` pairs, sorted by domain leaf in planar
    /// order, with no collapsible sibling block.
    pairs: Vec<(Address, Address)>,
}

impl AAutElement {
    /// The identity, in canonical form: every level-1 ball fixed.
    pub fn identity(shape: Shape) -> AAutElement {
        let pairs = (0..shape.k())
            .map(|j| {
                let a = Address::root(shape).child(j).expect("j < k");
                (a.clone(), a)
            })
            .collect();
        AAutElement { shape, pairs }
    }

    /// Builds an element from leaf pairs, validating that the domain and
    /// range sides each form a complete prefix code, then reducing.
    pub fn from_pairs(shape: Shape, pairs: Vec<(Address, Address)>) -> Result<AAutElement> {
        let side = |addrs: Vec<Address>| -> Result<RegularPartition> {
            let balls = addrs
                .into_iter()
                .map(Ball::new)
                .collect::<Result<Vec<_>>>()?;
            RegularPartition::new(shape, balls)
        };
        side(pairs.iter().map(|(a, _)| a.clone()).collect())?;
        side(pairs.iter().map(|(_, b)| b.clone()).collect())?;
        let mut pairs = pairs;
        pairs.sort_by(|x, y| x.0.cmp(&y.0));
        reduce(shape, &mut pairs);
        Ok(AAutElement { shape, pairs })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// The reduced `(domain, range)` leaf pairs, sorted by domain leaf.
    pub fn pairs(&self) -> &[(Address, Address)] {
        &self.pairs
    }

    /// Number of leaves in the reduced form; always `≡ k (mod d-1)`.
    pub fn leaf_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|(a, b)| a == b)
    }

    /// The domain-side prefix code as a partition. This is the coarsest
    /// partition on whose every part the element acts as a homothety, so it
    /// is the coarsest admissible partition for this element.
    pub fn coarsest_admissible(&self) -> RegularPartition {
        self.code_partition(|(a, _)| a)
    }

    /// The range-side prefix code as a partition; equals
    /// `self.invert().coarsest_admissible()`.
    pub fn range_partition(&self) -> RegularPartition {
        self.code_partition(|(_, b)| b)
    }

    fn code_partition(&self, pick: fn(&(Address, Address)) -> &Address) -> RegularPartition {
        let balls = self
            .pairs
            .iter()
            .map(|p| Ball::new(pick(p).clone()).expect("leaves are non-root"))
            .collect();
        RegularPartition::new(self.shape, balls).expect("leaf code is complete by invariant")
    }

    /// Group operation: `self.compose(other)` applies `other` first, i.e.
    /// returns the element `self ∘ other`.
    pub fn compose(&self, other: &AAutElement) -> Result<AAutElement> {
        self.shape.expect_same(other.shape)?;
        let mut out = Vec::with_capacity(self.pairs.len().max(other.pairs.len()));
        // Split each range leaf of `other` until it sits inside a domain
        // leaf of `self`, then push it through `self`.
        let mut work: Vec<(Address, Address)> = other.pairs.clone();
        while let Some((a, b)) = work.pop() {
            match self.lookup(&b) {
                Some((p, q)) => {
                    let suffix = p.suffix_of(&b).expect("lookup returned a prefix");
                    out.push((a, q.join(suffix)));
                }
                None => {
                    // `b` is shallower than self's domain code; both `a` and
                    // `b` are non-root, so all children have arity d.
                    for j in 0..self.shape.d() {
                        work.push((a.child(j).expect("j < d"), b.child(j).expect("j < d")));
                    }
                }
            }
        }
        AAutElement::from_pairs(self.shape, out)
    }

    /// Group inverse: swaps every leaf pair. A reduced form stays reduced.
    pub fn invert(&self) -> AAutElement {
        let mut pairs: Vec<(Address, Address)> = self
            .pairs
            .iter()
            .map(|(a, b)| (b.clone(), a.clone()))
            .collect();
        pairs.sort_by(|x, y| x.0.cmp(&y.0));
        AAutElement {
            shape: self.shape,
            pairs,
        }
    }

    /// Integer power by repeated squaring; negative powers via the inverse.
    pub fn power(&self, n: i64) -> Result<AAutElement> {
        let mut base = if n < 0 { self.invert() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = AAutElement::identity(self.shape);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(acc)
    }

    /// The domain leaf pair governing `addr`, i.e. the pair whose domain
    /// leaf is a prefix of `addr` (there is at most one).
    fn lookup(&self, addr: &Address) -> Option<(&Address, &Address)> {
        self.pairs
            .iter()
            .find(|(p, _)| p.is_prefix_of(addr))
            .map(|(p, q)| (p, q))
    }

    /// Image of a vertex deep enough to lie under a domain leaf. Vertices
    /// above the domain code have no well-defined image vertex.
    pub fn apply_to_address(&self, addr: &Address) -> Result<Address> {
        self.shape.expect_same(addr.shape())?;
        match self.lookup(addr) {
            Some((p, q)) => Ok(q.join(p.suffix_of(addr).expect("prefix"))),
            None => Err(Error::NotDeepEnough {
                address: addr.to_string(),
            }),
        }
    }

    /// Image of a ball small enough to sit inside a domain leaf, on which
    /// the element therefore acts as a homothety.
    pub fn image_of_ball(&self, ball: &Ball) -> Result<Ball> {
        let image = self.apply_to_address(ball.address())?;
        Ok(Ball::new(image).expect("images of non-root vertices are non-root"))
    }

    /// Image of an end; total, since every end passes through a domain leaf.
    pub fn apply_to_end(&self, end: &End) -> Result<End> {
        self.shape.expect_same(end.shape())?;
        let (p, q) = self
            .pairs
            .iter()
            .find(|(p, _)| end.starts_with(p))
            .expect("a complete prefix code covers every end");
        let (tail_pre, tail_period) = end.drop_digits(p.level());
        let mut pre = q.digits().to_vec();
        pre.extend_from_slice(&tail_pre);
        End::new(self.shape, pre, tail_period)
    }

    /// Whether the element restricts to a single prefix substitution on
    /// `ball`: either `ball` lies inside a domain leaf, or every domain leaf
    /// below `ball` maps by replacing the ball's address with one common
    /// word. In reduced form the second case only survives reduction when
    /// that common word is empty (the ball maps onto the whole boundary),
    /// which is possible yet never yields a ball-to-ball map.
    pub fn is_homothety_on(&self, ball: &Ball) -> bool {
        if self.shape != ball.shape() {
            return false;
        }
        if self.lookup(ball.address()).is_some() {
            return true;
        }
        let prefix_len = ball.address().level();
        let mut below = false;
        for (p, q) in &self.pairs {
            if ball.address().is_prefix_of(p) {
                below = true;
                // Common word forced to be empty: a nonempty one would have
                // been collapsed into a single leaf by reduction.
                if q.digits() != &p.digits()[prefix_len..] {
                    return false;
                }
            }
        }
        below
    }

    /// Whether the element fixes every end passing through `ball`.
    pub fn fixes_pointwise(&self, ball: &Ball) -> bool {
        if self.shape != ball.shape() {
            return false;
        }
        for (p, q) in &self.pairs {
            if p.is_prefix_of(ball.address()) {
                return p == q;
            }
            if ball.address().is_prefix_of(p) && p != q {
                return false;
            }
        }
        true
    }

    /// Whether every moved end lies in `ball` (the support is inside it).
    pub fn supported_in(&self, ball: &Ball) -> bool {
        if self.shape != ball.shape() {
            return false;
        }
        self.pairs
            .iter()
            .all(|(p, q)| ball.address().is_prefix_of(p) || p == q)
    }

    /// The support as a minimal antichain of balls: the closure of the set
    /// of moved ends is exactly the union of the moved domain leaves, here
    /// merged into maximal balls. Empty exactly for the identity.
    pub fn support(&self) -> Vec<Ball> {
        let mut moved: Vec<Address> = self
            .pairs
            .iter()
            .filter(|(a, b)| a != b)
            .map(|(a, _)| a.clone())
            .collect();
        // Merge complete sibling families into their parent, repeatedly.
        loop {
            moved.sort();
            let mut merged = false;
            let mut out: Vec<Address> = Vec::with_capacity(moved.len());
            let d = self.shape.d() as usize;
            let mut i = 0;
            while i < moved.len() {
                let family = (i + d <= moved.len())
                    .then(|| moved[i].parent())
                    .flatten()
                    .filter(|p| !p.is_root())
                    .filter(|p| {
                        (0..d).all(|j| moved[i + j] == p.child(j as u32).expect("j < d"))
                    });
                if let Some(parent) = family {
                    out.push(parent);
                    i += d;
                    merged = true;
                } else {
                    out.push(moved[i].clone());
                    i += 1;
                }
            }
            moved = out;
            if !merged {
                break;
            }
        }
        moved
            .into_iter()
            .map(|a| Ball::new(a).expect("non-root"))
            .collect()
    }

    /// Whether the element maps the partition to itself: `p` must be
    /// admissible for the element and the part images must be exactly the
    /// parts again.
    pub fn in_stab(&self, p: &RegularPartition) -> Result<bool> {
        self.shape.expect_same(p.shape())?;
        let mut images = Vec::with_capacity(p.len());
        for ball in p.balls() {
            match self.image_of_ball(ball) {
                Ok(image) => images.push(image),
                Err(Error::NotDeepEnough { .. }) => return Ok(false),
                Err(e) => return Err(e),
            }
        }
        images.sort();
        Ok(images.as_slice() == p.balls())
    }

    /// The least `n` with the element in the stabilizer of the level-`n`
    /// spherical partition, or `None` if there is no such `n`. Some `n`
    /// works exactly when every leaf pair preserves level (the element is
    /// an isometry of the boundary), and the least one is then the depth of
    /// the leaf code.
    pub fn in_stab_spherical(&self) -> Option<u32> {
        let level_preserving = self.pairs.iter().all(|(a, b)| a.level() == b.level());
        level_preserving.then(|| {
            self.pairs
                .iter()
                .map(|(a, _)| a.level() as u32)
                .max()
                .expect("codes are non-empty")
        })
    }

    /// Parses the durable `aaut v1` text form (self-describing shape).
    pub fn parse_text(text: &str) -> Result<AAutElement> {
        let mut lines = text.split('\n');
        let header = lines
            .next()
            .ok_or_else(|| Error::Syntax("empty element text".into()))?;
        if header != "aaut v1" {
            return Err(Error::Syntax(format!(
                "expected header \"aaut v1\", found {header:?}"
            )));
        }
        let shape_line = lines
            .next()
            .ok_or_else(|| Error::Syntax("missing shape line".into()))?;
        let rest = shape_line
            .strip_prefix("shape d=")
            .ok_or_else(|| Error::Syntax(format!("bad shape line {shape_line:?}")))?;
        let (d_text, k_text) = rest
            .split_once(" k=")
            .ok_or_else(|| Error::Syntax(format!("bad shape line {shape_line:?}")))?;
        let parse_num = |t: &str| -> Result<u32> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Syntax(format!("bad shape number {t:?}")));
            }
            t.parse()
                .map_err(|_| Error::Syntax(format!("shape number {t:?} too large")))
        };
        let shape = Shape::new(parse_num(d_text)?, parse_num(k_text)?)?;
        let mut pairs = Vec::new();
        let mut saw_trailing_empty = false;
        for line in lines {
            if saw_trailing_empty {
                return Err(Error::Syntax("content after trailing newline".into()));
            }
            if line.is_empty() {
                saw_trailing_empty = true;
                continue;
            }
            let body = line
                .strip_prefix("map ")
                .ok_or_else(|| Error::Syntax(format!("bad map line {line:?}")))?;
            let (a, b) = body
                .split_once(" -> ")
                .ok_or_else(|| Error::Syntax(format!("bad map line {line:?}")))?;
            pairs.push((Address::parse(shape, a)?, Address::parse(shape, b)?));
        }
        if pairs.is_empty() {
            return Err(Error::Syntax("element has no map lines".into()));
        }
        AAutElement::from_pairs(shape, pairs)
    }

    /// Parses the inline one-line form `0.0 -> 0; 0.1 -> 1.0; 1 -> 1.1`
    /// (an optional `map ` prefix per entry is tolerated).
    pub fn parse_leaf_map(shape: Shape, text: &str) -> Result<AAutElement> {
        let mut pairs = Vec::new();
        for entry in text.split(';') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let body = entry.strip_prefix("map ").unwrap_or(entry);
            let (a, b) = body
                .split_once("->")
                .ok_or_else(|| Error::Syntax(format!("bad map entry {entry:?}")))?;
            pairs.push((
                Address::parse(shape, a.trim())?,
                Address::parse(shape, b.trim())?,
            ));
        }
        if pairs.is_empty() {
            return Err(Error::Syntax("element has no map entries".into()));
        }
        AAutElement::from_pairs(shape, pairs)
    }

    /// Emits the durable text form: header, shape, one `map` line per leaf
    /// pair in planar order, and a single trailing newline.
    pub fn serialize(&self) -> String {
        let mut out = format!(
            "aaut v1\nshape d={} k={}\n",
            self.shape.d(),
            self.shape.k()
        );
        for (a, b) in &self.pairs {
            out.push_str(&format!("map {a} -> {b}\n"));
        }
        out
    }
}

/// The commutator `a b a⁻¹ b⁻¹`.
pub fn commutator(a: &AAutElement, b: &AAutElement) -> Result<AAutElement> {
    a.compose(b)?.compose(&a.invert())?.compose(&b.invert())
}

/// Reduces sorted leaf pairs to canonical form: repeatedly replaces any
/// block of `d` sibling pairs `(p.j, q.j)` for `j = 0..d` (with `p`, `q`
/// non-root) by the single pair `(p, q)`. Collapsing preserves the domain
/// sort order, and the standard confluence of this rewriting makes the
/// result independent of scan order.
fn reduce(shape: Shape, pairs: &mut Vec<(Address, Address)>) {
    let d = shape.d() as usize;
    loop {
        let mut changed = false;
        let mut out: Vec<(Address, Address)> = Vec::with_capacity(pairs.len());
        let mut i = 0;
        while i < pairs.len() {
            if i + d <= pairs.len() {
                if let Some(merged) = collapse_window(&pairs[i..i + d]) {
                    out.push(merged);
                    i += d;
                    changed = true;
                    continue;
                }
            }
            out.push(pairs[i].clone());
            i += 1;
        }
        *pairs = out;
        if !changed {
            return;
        }
    }
}

/// If `window` is exactly the `d` pairs `(p.0, q.0) … (p.(d-1), q.(d-1))`
/// for non-root `p`, `q`, returns the merged pair `(p, q)`.
fn collapse_window(window: &[(Address, Address)]) -> Option<(Address, Address)> {
    let p = window[0].0.parent().filter(|p| !p.is_root())?;
    let q = window[0].1.parent().filter(|q| !q.is_root())?;
    for (j, (a, b)) in window.iter().enumerate() {
        let j = j as u32;
        if *a != p.child(j).expect("j < d") || *b != q.child(j).expect("j < d") {
            return None;
        }
    }
    Some((p, q))
}

impl fmt::Display for AAutElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self
            .pairs
            .iter()
            .map(|(a, b)| format!("{a} -> {b}"))
            .collect();
        write!(f, "{{{}}}", entries.join("; "))
    }
}

impl fmt::Debug for AAutElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AAutElement{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sh(d: u32, k: u32) -> Shape {
        Shape::new(d, k).unwrap()
    }

    fn el(d: u32, k: u32, text: &str) -> AAutElement {
        AAutElement::parse_leaf_map(sh(d, k), text).unwrap()
    }

    /// The fundamental translation at (2, 2).
    fn x0() -> AAutElement {
        el(2, 2, "0.0 -> 0; 0.1 -> 1.0; 1 -> 1.1")
    }

    /// The level-1 swap at (2, 2).
    fn sigma() -> AAutElement {
        el(2, 2, "0 -> 1; 1 -> 0")
    }

    /// An order-3 rotation at (2, 2).
    fn rot3() -> AAutElement {
        el(2, 2, "0 -> 1.0; 1.0 -> 1.1; 1.1 -> 0")
    }

    #[test]
    fn identity_is_canonical_level_one() {
        let id = AAutElement::identity(sh(2, 2));
        assert!(id.is_identity());
        assert_eq!(id.to_string(), "{0 -> 0; 1 -> 1}");
        // A padded presentation reduces back to it.
        let padded = el(2, 2, "0.0 -> 0.0; 0.1 -> 0.1; 1 -> 1");
        assert_eq!(padded, id);
    }

    #[test]
    fn reduction_collapses_sibling_blocks() {
        let fat_sigma = el(2, 2, "0.0 -> 1.0; 0.1 -> 1.1; 1.0 -> 0.0; 1.1 -> 0.1");
        assert_eq!(fat_sigma, sigma());
        assert_eq!(fat_sigma.leaf_count(), 2);
        // Cascading collapse over two levels.
        let deep = el(
            2,
            2,
            "0.0.0 -> 1.0.0; 0.0.1 -> 1.0.1; 0.1 -> 1.1; 1.0 -> 0.0; 1.1 -> 0.1",
        );
        assert_eq!(deep, sigma());
    }

    #[test]
    fn from_pairs_rejects_bad_codes() {
        let shape = sh(2, 2);
        let addr = |t: &str| Address::parse(shape, t).unwrap();
        // Domain gap.
        assert!(matches!(
            AAutElement::from_pairs(shape, vec![(addr("0.0"), addr("0")), (addr("1"), addr("1"))]),
            Err(Error::Incomplete { .. })
        ));
        // Range overlap (two leaves map onto nested balls).
        assert!(matches!(
            AAutElement::from_pairs(
                shape,
                vec![
                    (addr("0.0"), addr("0")),
                    (addr("0.1"), addr("1")),
                    (addr("1.0"), addr("1.0")),
                    (addr("1.1"), addr("1.1")),
                ]
            ),
            Err(Error::Overlap { .. })
        ));
        // Root leaves are not allowed.
        assert!(AAutElement::from_pairs(
            shape,
            vec![(Address::root(shape), Address::root(shape))]
        )
        .is_err());
    }

    #[test]
    fn composition_matches_hand_computation() {
        let sq = x0().compose(&x0()).unwrap();
        assert_eq!(
            sq,
            el(2, 2, "0.0.0 -> 0; 0.0.1 -> 1.0; 0.1 -> 1.1.0; 1 -> 1.1.1")
        );
        // Composing with the inverse gives the identity from both sides.
        let inv = x0().invert();
        assert!(x0().compose(&inv).unwrap().is_identity());
        assert!(inv.compose(&x0()).unwrap().is_identity());
    }

    #[test]
    fn inverse_swaps_the_leaf_pairs() {
        assert_eq!(x0().invert(), el(2, 2, "0 -> 0.0; 1.0 -> 0.1; 1.1 -> 1"));
        assert_eq!(sigma().invert(), sigma());
    }

    #[test]
    fn powers_by_repeated_squaring() {
        assert!(x0().power(0).unwrap().is_identity());
        assert_eq!(x0().power(1).unwrap(), x0());
        assert_eq!(x0().power(2).unwrap(), x0().compose(&x0()).unwrap());
        assert_eq!(x0().power(-1).unwrap(), x0().invert());
        let x3 = x0().power(3).unwrap();
        assert_eq!(
            x3.compose(&x0().power(-3).unwrap()).unwrap(),
            AAutElement::identity(sh(2, 2))
        );
        // rot3 has order 3.
        let r = rot3();
        assert!(!r.is_identity());
        assert!(!r.power(2).unwrap().is_identity());
        assert!(r.power(3).unwrap().is_identity());
    }

    #[test]
    fn vertex_and_ball_images() {
        let shape = sh(2, 2);
        let g = x0();
        let a = |t: &str| Address::parse(shape, t).unwrap();
        assert_eq!(g.apply_to_address(&a("1.0")).unwrap(), a("1.1.0"));
        assert_eq!(g.apply_to_address(&a("0.0.1")).unwrap(), a("0.1"));
        match g.apply_to_address(&a("0")) {
            Err(Error::NotDeepEnough { address }) => assert_eq!(address, "0"),
            other => panic!("expected NotDeepEnough, got {other:?}"),
        }
        let b = Ball::parse(shape, "1").unwrap();
        assert_eq!(g.image_of_ball(&b).unwrap().to_string(), "1.1");
        assert!(g.is_homothety_on(&b));
        assert!(!g.is_homothety_on(&Ball::parse(shape, "0").unwrap()));
        assert!(g.is_homothety_on(&Ball::parse(shape, "0.0.1").unwrap()));
    }

    #[test]
    fn homothety_onto_whole_boundary() {
        // At (2, 3) a reduced element can strip a level-1 prefix entirely:
        // the restriction to that ball is a prefix substitution whose target
        // word is empty, so it is a homothety but has no image ball.
        let g = el(2, 3, "0.0 -> 0; 0.1 -> 1; 1 -> 2.0; 2 -> 2.1");
        assert_eq!(g.leaf_count(), 4); // no root-level collapse
        let b = Ball::parse(sh(2, 3), "0").unwrap();
        assert!(g.is_homothety_on(&b));
        assert!(g.image_of_ball(&b).is_err());
        // A mismatched deep pair breaks coherence.
        assert!(!x0().is_homothety_on(&Ball::parse(sh(2, 2), "0").unwrap()));
    }

    #[test]
    fn end_images_are_canonical() {
        let shape = sh(2, 2);
        let g = x0();
        let e = |t: &str| End::parse(shape, t).unwrap();
        // Both fixed ends of the translation.
        assert_eq!(g.apply_to_end(&e("(0)")).unwrap(), e("(0)"));
        assert_eq!(g.apply_to_end(&e("(1)")).unwrap(), e("(1)"));
        // A moved end, with re-canonicalization of the image.
        assert_eq!(g.apply_to_end(&e("0.1(0)")).unwrap(), e("1(0)"));
        // Orbit drifts toward the attracting end (1)^inf.
        assert_eq!(g.apply_to_end(&e("1(0)")).unwrap(), e("1.1(0)"));
    }

    #[test]
    fn admissibility_and_stabilizers() {
        let shape = sh(2, 2);
        let id = AAutElement::identity(shape);
        assert_eq!(
            id.coarsest_admissible(),
            RegularPartition::spherical(shape, 1).unwrap()
        );
        assert_eq!(
            x0().coarsest_admissible(),
            RegularPartition::parse(shape, "0.0, 0.1, 1").unwrap()
        );
        assert_eq!(
            x0().range_partition(),
            RegularPartition::parse(shape, "0, 1.0, 1.1").unwrap()
        );

        let p = RegularPartition::parse(shape, "0.0, 0.1, 1").unwrap();
        let s1 = RegularPartition::spherical(shape, 1).unwrap();
        assert!(sigma().in_stab(&s1).unwrap());
        assert!(!x0().in_stab(&p).unwrap());
        assert!(!x0().in_stab(&s1).unwrap());
        let swap = el(2, 2, "0.0 -> 0.1; 0.1 -> 0.0; 1 -> 1");
        assert!(swap.in_stab(&p).unwrap());
        // Not admissible for S_1, hence not in its stabilizer.
        assert!(!swap.in_stab(&s1).unwrap());

        assert_eq!(swap.in_stab_spherical(), Some(2));
        assert_eq!(sigma().in_stab_spherical(), Some(1));
        assert_eq!(id.in_stab_spherical(), Some(1));
        assert_eq!(x0().in_stab_spherical(), None);
        assert_eq!(rot3().in_stab_spherical(), None);
    }

    #[test]
    fn support_and_pointwise_fixing() {
        let shape = sh(2, 2);
        let b = |t: &str| Ball::parse(shape, t).unwrap();
        let swap_deep = el(
            2,
            2,
            "1.0.0 -> 1.0.1; 1.0.1 -> 1.0.0; 1.1 -> 1.1; 0 -> 0",
        );
        assert_eq!(swap_deep.support(), vec![b("1.0")]);
        assert!(swap_deep.supported_in(&b("1.0")));
        assert!(swap_deep.supported_in(&b("1")));
        assert!(!swap_deep.supported_in(&b("1.0.0")));
        assert!(!swap_deep.supported_in(&b("0")));
        assert!(swap_deep.fixes_pointwise(&b("0")));
        assert!(swap_deep.fixes_pointwise(&b("1.1")));
        assert!(!swap_deep.fixes_pointwise(&b("1")));
        assert!(!swap_deep.fixes_pointwise(&b("1.0.0")));

        assert_eq!(sigma().support(), vec![b("0"), b("1")]);
        assert!(AAutElement::identity(shape).support().is_empty());
        assert!(AAutElement::identity(shape).fixes_pointwise(&b("0")));
        assert!(!x0().fixes_pointwise(&b("0")));
        assert!(!x0().supported_in(&b("1")));
    }

    #[test]
    fn serialize_and_parse_are_mutually_inverse() {
        let text = "aaut v1\nshape d=2 k=2\nmap 0.0 -> 0\nmap 0.1 -> 1.0\nmap 1 -> 1.1\n";
        assert_eq!(x0().serialize(), text);
        let parsed = AAutElement::parse_text(text).unwrap();
        assert_eq!(parsed, x0());
        assert_eq!(parsed.serialize(), text);
        // Missing trailing newline is tolerated on input.
        assert_eq!(
            AAutElement::parse_text(text.trim_end()).unwrap(),
            x0()
        );
        // Malformed inputs are rejected.
        assert!(AAutElement::parse_text("aaut v2\nshape d=2 k=2\nmap 0 -> 0\nmap 1 -> 1\n").is_err());
        assert!(AAutElement::parse_text("aaut v1\nshape d=2\nmap 0 -> 0\n").is_err());
        assert!(AAutElement::parse_text("aaut v1\nshape d=2 k=2\n").is_err());
        assert!(
            AAutElement::parse_text("aaut v1\nshape d=2 k=2\nmap 0 -> 0\nmap 1 -> 1\n\nextra")
                .is_err()
        );
    }

    #[test]
    fn inline_form_accepts_map_prefixes_and_whitespace() {
        let a = AAutElement::parse_leaf_map(
            sh(2, 2),
            "map 0.0 -> 0; map 0.1 -> 1.0; map 1 -> 1.1",
        )
        .unwrap();
        let b = el(2, 2, "0.0->0;0.1->1.0;1->1.1");
        assert_eq!(a, x0());
        assert_eq!(b, x0());
    }

    #[test]
    fn commutator_of_commuting_elements_is_trivial() {
        let g = el(2, 2, "0.0 -> 0.1; 0.1 -> 0.0; 1 -> 1");
        let h = el(2, 2, "0 -> 0; 1.0 -> 1.1; 1.1 -> 1.0");
        assert!(commutator(&g, &h).unwrap().is_identity());
        assert!(!commutator(&sigma(), &x0()).unwrap().is_identity());
    }

    #[test]
    fn works_at_other_shapes() {
        // (3, 2): a translation analogue.
        let g = el(3, 2, "0.0 -> 0; 0.1 -> 1.0; 0.2 -> 1.1; 1 -> 1.2");
        assert_eq!(g.leaf_count(), 4);
        assert!(g.compose(&g.invert()).unwrap().is_identity());
        // (2, 3): root arity 3.
        let h = el(2, 3, "0 -> 1; 1 -> 2; 2 -> 0");
        assert!(h.power(3).unwrap().is_identity());
        assert_eq!(h.in_stab_spherical(), Some(1));
        // Composing across shapes fails.
        assert!(matches!(
            g.compose(&h),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
