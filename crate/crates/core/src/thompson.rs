//! Order-preserving and cyclic-order-preserving subgroups, the canonical
//! rightmost translation, and the breaking-triple machinery: verified
//! configurations of balls and elements that certify rigidity obstructions,
//! plus the two-ball commutator experiment driven by a translation
//! certificate.

use std::cmp::Ordering;

use crate::address::{planar_compare, Address};
use crate::ball::{ball_relation, last_ball, penult_ball, Ball, BallRelation};
use crate::classify::{verify_witness, TranslationCert};
use crate::element::{commutator, AAutElement};
use crate::error::{Error, Result};
use crate::shape::Shape;

pub use crate::ball::delta_depth as delta_gap;

/// Whether `g` preserves the planar (lexicographic) order of the boundary:
/// its range code, read against the planar-sorted domain code, is itself
/// planar-sorted.
pub fn is_in_f(g: &AAutElement) -> bool {
    g.pairs().windows(2).all(|w| {
        planar_compare(&w[0].1, &w[1].1)
            .map(|o| o == Ordering::Less)
            .unwrap_or(false)
    })
}

/// Whether `g` preserves the cyclic planar order of the boundary: its range
/// code, read against the planar-sorted domain code, is a cyclic rotation
/// of a planar-sorted sequence (at most one descent cyclically).
pub fn is_in_t(g: &AAutElement) -> bool {
    let pairs = g.pairs();
    let n = pairs.len();
    if n < 2 {
        return true;
    }
    let mut descents = 0;
    for i in 0..n {
        let a = &pairs[i].1;
        let b = &pairs[(i + 1) % n].1;
        match planar_compare(a, b) {
            Ok(Ordering::Greater) => descents += 1,
            Ok(_) => {}
            Err(_) => return false,
        }
    }
    descents <= 1
}

/// The standard pair of generators of the order-preserving subgroup at the
/// binary shape with two root branches; other shapes are not covered by
/// this constructor.
pub fn f_generators(shape: Shape) -> Result<[AAutElement; 2]> {
    if (shape.d(), shape.k()) != (2, 2) {
        return Err(Error::UnsupportedShape {
            shape,
            msg: "standard order-preserving generators are only built at d=2, k=2".into(),
        });
    }
    let x0 = AAutElement::parse_leaf_map(shape, "0.0 -> 0; 0.1 -> 1.0; 1 -> 1.1")?;
    let x1 = AAutElement::parse_leaf_map(
        shape,
        "0 -> 0; 1.0.0 -> 1.0; 1.0.1 -> 1.1.0; 1.1 -> 1.1.1",
    )?;
    Ok([x0, x1])
}

/// The order-preserving element that shifts the rightmost branch down one
/// level: it splits the leftmost root branch, keeps the middle root
/// branches, and pushes everything one slot to the right into a split of
/// the rightmost root branch. It maps the final ball of every sphere onto
/// the final ball of the next sphere, and likewise for penultimate balls.
pub fn rightmost_translation(shape: Shape) -> AAutElement {
    let d = shape.d();
    let k = shape.k();
    let addr = |digits: Vec<u32>| Address::new(shape, digits).expect("digits are in range");
    let mut domain: Vec<Address> = (0..d).map(|j| addr(vec![0, j])).collect();
    domain.extend((1..k).map(|j| addr(vec![j])));
    let mut range: Vec<Address> = (0..k - 1).map(|j| addr(vec![j])).collect();
    range.extend((0..d).map(|j| addr(vec![k - 1, j])));
    AAutElement::from_pairs(shape, domain.into_iter().zip(range).collect())
        .expect("the shifted codes are complete and aligned")
}

/// Whether every moved point of `g` lies inside one of the given balls.
pub fn supported_in_any(g: &AAutElement, balls: &[Ball]) -> bool {
    g.support()
        .iter()
        .all(|s| balls.iter().any(|b| b.contains(s)))
}

/// From a verified contraction certificate, extract a pair of disjoint
/// balls `(b1, b2)` inside the certificate ball together with the power:
/// `b2` is the contracted image, `b1` is disjoint from it, and the powered
/// witness maps both strictly inside `b2`.
pub fn two_balls_from_translation(cert: &TranslationCert) -> Result<(Ball, Ball, i64)> {
    let report = verify_witness(cert);
    if !report.valid {
        return Err(Error::Certificate(format!(
            "certificate does not verify: {}",
            report.reason.as_deref().unwrap_or("unknown reason")
        )));
    }
    let b2 = cert.image.clone();
    // Walk down from the certificate ball toward b2, taking the first
    // child disjoint from it; descend into the child containing it when no
    // disjoint sibling precedes.
    let mut current = cert.ball.clone();
    let b1 = 'search: loop {
        let arity = current.shape().d();
        let mut descend: Option<Ball> = None;
        for j in 0..arity {
            let child = Ball::new(current.address().child(j)?)
                .expect("children of a ball are non-root");
            match ball_relation(&b2, &child)? {
                BallRelation::Disjoint => break 'search child,
                BallRelation::Equal => continue,
                BallRelation::FirstInsideSecond => {
                    descend = Some(child);
                    break;
                }
                BallRelation::SecondInsideFirst => {
                    return Err(Error::Verification(format!(
                        "image ball {b2} contains a descendant of its own ancestor {child}"
                    )));
                }
            }
        }
        match descend {
            Some(child) => current = child,
            None => {
                return Err(Error::Verification(format!(
                    "no ball disjoint from {b2} found inside {}",
                    cert.ball
                )));
            }
        }
    };
    let h = cert.witness.power(cert.power)?;
    for b in [&b1, &b2] {
        let image = h.image_of_ball(b).map_err(|_| {
            Error::Verification(format!("powered witness is not a homothety on {b}"))
        })?;
        if !image.strictly_inside(&b2) {
            return Err(Error::Verification(format!(
                "powered witness does not carry {b} strictly inside {b2}"
            )));
        }
    }
    Ok((b1, b2, cert.power))
}

/// One step of the two-ball commutator experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranBranchCheck {
    pub k: u64,
    /// Where the powered witness carries the first ball.
    pub conjugate_ball: Ball,
    /// The conjugated copy of `x` is supported in `conjugate_ball`, which is
    /// disjoint from the first ball.
    pub support_ok: bool,
    /// `[[x, h^k], y]` equals `[x, y]` exactly.
    pub commutator_matches: bool,
}

/// Full report of the two-ball commutator experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranBranchReport {
    pub b1: Ball,
    pub b2: Ball,
    pub power: i64,
    pub checks: Vec<TranBranchCheck>,
    pub all_hold: bool,
}

/// Run the two-ball commutator experiment: extract `(b1, b2)` from the
/// certificate, then for each exponent `k` conjugate `x` off `b1` by the
/// `k`-th contraction power `h^k` and check that the double commutator
/// `[[x, h^k], y]` collapses to `[x, y]` exactly, because the conjugated
/// copy of `x` lands in `b2`, disjoint from the supports of `x` and `y`.
///
/// Preconditions: `x` and `y` are supported in `b1`.
pub fn tran_branch_experiment(
    cert: &TranslationCert,
    x: &AAutElement,
    y: &AAutElement,
    ks: &[u64],
) -> Result<TranBranchReport> {
    let (b1, b2, power) = two_balls_from_translation(cert)?;
    cert.witness.shape().expect_same(x.shape())?;
    cert.witness.shape().expect_same(y.shape())?;
    if !x.supported_in(&b1) {
        return Err(Error::Precondition(format!(
            "first element is not supported in {b1}"
        )));
    }
    if !y.supported_in(&b1) {
        return Err(Error::Precondition(format!(
            "second element is not supported in {b1}"
        )));
    }
    let base = commutator(x, y)?;
    let mut checks = Vec::with_capacity(ks.len());
    let mut all_hold = true;
    for &k in ks {
        let exponent = power
            .checked_mul(k as i64)
            .ok_or(Error::SizeCapExceeded { cap: i64::MAX as u64 })?;
        let h_k = cert.witness.power(exponent)?;
        let conjugate_ball = h_k.image_of_ball(&b1).map_err(|_| {
            Error::Verification(format!(
                "contraction power {exponent} is not a homothety on {b1}"
            ))
        })?;
        let conjugated = h_k.compose(x)?.compose(&h_k.invert())?;
        let support_ok = ball_relation(&conjugate_ball, &b1)? == BallRelation::Disjoint
            && conjugate_ball.strictly_inside(&b2)
            && conjugated.supported_in(&conjugate_ball);
        let u_k = commutator(x, &h_k)?;
        let v_k = commutator(&u_k, y)?;
        let commutator_matches = v_k == base;
        all_hold = all_hold && support_ok && commutator_matches;
        checks.push(TranBranchCheck {
            k,
            conjugate_ball,
            support_ok,
            commutator_matches,
        });
    }
    Ok(TranBranchReport {
        b1,
        b2,
        power,
        checks,
        all_hold,
    })
}

/// The group identity `[[g,k],h] = (gkg⁻¹) · k⁻¹ · (hkh⁻¹) · ((hg) k⁻¹ (hg)⁻¹)`,
/// checked by exact computation of both sides.
pub fn double_commutator_identity(
    g: &AAutElement,
    k: &AAutElement,
    h: &AAutElement,
) -> Result<bool> {
    let lhs = commutator(&commutator(g, k)?, h)?;
    let conj = |a: &AAutElement, b: &AAutElement| -> Result<AAutElement> {
        a.compose(b)?.compose(&a.invert())
    };
    let hg = h.compose(g)?;
    let rhs = conj(g, k)?
        .compose(&k.invert())?
        .compose(&conj(h, k)?)?
        .compose(&conj(&hg, &k.invert())?)?;
    Ok(lhs == rhs)
}

/// A certified rigidity obstruction: either a ball with two same-diameter
/// subballs, one fixed pointwise and one carried off the ball by a single
/// element, or a spherical element breaking the rightmost branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TripleCert {
    Breaking {
        h: AAutElement,
        u: Ball,
        w: Ball,
        b: Ball,
    },
    WeaklyBreaking {
        z: AAutElement,
        n: u32,
    },
}

/// Verify a breaking configuration from scratch. For the two-ball form:
/// `u` and `w` have equal diameters, both lie inside `b`, `h` fixes `w`
/// pointwise, and `h` carries `u` homothetically onto a ball disjoint from
/// `b`. The spherical form delegates to [`is_weakly_breaking`].
pub fn is_breaking_triple(cert: &TripleCert) -> Result<()> {
    match cert {
        TripleCert::Breaking { h, u, w, b } => {
            h.shape().expect_same(u.shape())?;
            h.shape().expect_same(w.shape())?;
            h.shape().expect_same(b.shape())?;
            if u.diameter() != w.diameter() {
                return Err(Error::Verification(format!(
                    "balls {u} and {w} have different diameters"
                )));
            }
            if !b.contains(u) {
                return Err(Error::Verification(format!("{u} is not inside {b}")));
            }
            if !b.contains(w) {
                return Err(Error::Verification(format!("{w} is not inside {b}")));
            }
            if !h.fixes_pointwise(w) {
                return Err(Error::Verification(format!(
                    "element does not fix {w} pointwise"
                )));
            }
            let image = h.image_of_ball(u).map_err(|_| {
                Error::Verification(format!("element is not a homothety on {u}"))
            })?;
            if ball_relation(&image, b)? != BallRelation::Disjoint {
                return Err(Error::Verification(format!(
                    "image {image} of {u} is not disjoint from {b}"
                )));
            }
            Ok(())
        }
        TripleCert::WeaklyBreaking { z, n } => is_weakly_breaking(z, *n),
    }
}

/// Verify that `z` breaks the rightmost branch at sphere `n`: it preserves
/// the `n`-sphere partition but not the `(n-1)`-sphere one, fixes the final
/// ball of the `n`-sphere pointwise, and carries the penultimate ball
/// homothetically onto a ball disjoint from the final ball of the
/// `(n-1)`-sphere. No element satisfies this below sphere 2.
pub fn is_weakly_breaking(z: &AAutElement, n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::Verification(
            "the spherical breaking conditions are unsatisfiable below sphere 2".into(),
        ));
    }
    let shape = z.shape();
    match z.in_stab_spherical() {
        Some(m) if m == n => {}
        Some(m) => {
            return Err(Error::Verification(format!(
                "element sits exactly in the sphere-{m} stabilizer, not sphere-{n}"
            )));
        }
        None => {
            return Err(Error::Verification(
                "element does not preserve any sphere partition".into(),
            ));
        }
    }
    let last = last_ball(shape, n)?;
    if !z.fixes_pointwise(&last) {
        return Err(Error::Verification(format!(
            "element does not fix {last} pointwise"
        )));
    }
    let penult = penult_ball(shape, n)?;
    let image = z.image_of_ball(&penult).map_err(|_| {
        Error::Verification(format!("element is not a homothety on {penult}"))
    })?;
    let last_above = last_ball(shape, n - 1)?;
    if ball_relation(&image, &last_above)? != BallRelation::Disjoint {
        return Err(Error::Verification(format!(
            "image {image} of {penult} is not disjoint from {last_above}"
        )));
    }
    Ok(())
}

/// Compose two spherical breaking elements at strictly increasing sphere
/// indices: applying the index-`i` element first and the index-`j` element
/// second breaks the rightmost branch at sphere `j` again. Both inputs and
/// the product are verified from scratch.
pub fn compose_weakly_breaking(
    za: &AAutElement,
    i: u32,
    zb: &AAutElement,
    j: u32,
) -> Result<(AAutElement, u32)> {
    if j <= i {
        return Err(Error::Precondition(format!(
            "sphere indices must strictly increase, got {i} then {j}"
        )));
    }
    is_weakly_breaking(za, i)?;
    is_weakly_breaking(zb, j)?;
    let prod = zb.compose(za)?;
    is_weakly_breaking(&prod, j)?;
    Ok((prod, j))
}
