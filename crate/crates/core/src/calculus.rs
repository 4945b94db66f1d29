//! Partition calculus: pushing regular partitions through group elements,
//! carving a ball into the minimal images of partition parts, and testing
//! whether an element fixes a partition setwise.

use crate::ball::Ball;
use crate::element::AAutElement;
use crate::error::{Error, Result};
use crate::partition::RegularPartition;

/// Image partition `g.p`, obtained by applying `g` to every part. Fails with
/// `NotAdmissible` on the first part on which `g` is not a ball-to-ball
/// homothety.
pub fn apply_element(g: &AAutElement, p: &RegularPartition) -> Result<RegularPartition> {
    g.shape().expect_same(p.shape())?;
    let mut balls = Vec::with_capacity(p.len());
    for b in p.balls() {
        match g.image_of_ball(b) {
            Ok(image) => balls.push(image),
            Err(_) => {
                return Err(Error::NotAdmissible {
                    part: b.to_string(),
                })
            }
        }
    }
    RegularPartition::new(p.shape(), balls)
}

/// The inclusion-minimal members of a family of balls: duplicates are
/// dropped, and a ball is kept exactly when no other member sits strictly
/// inside it. The result is sorted in planar order.
pub fn minimal_balls(candidates: &[Ball]) -> Vec<Ball> {
    let mut distinct: Vec<Ball> = Vec::with_capacity(candidates.len());
    for b in candidates {
        if !distinct.contains(b) {
            distinct.push(b.clone());
        }
    }
    let mut kept: Vec<Ball> = distinct
        .iter()
        .filter(|b| !distinct.iter().any(|c| c.strictly_inside(b)))
        .cloned()
        .collect();
    kept.sort_by(|x, y| x.address().cmp(y.address()));
    kept
}

/// Carve the ball `r` by the images of parts of `x` under the listed
/// elements: collect every `a(z)` with `z` a part of `x` and `a` in `a_list`
/// that is contained in `r`, and keep the inclusion-minimal ones. When no
/// image fits inside `r`, the result is `{r}` itself. Every listed element
/// must be a homothety on every part of `x`.
pub fn theta(r: &Ball, x: &RegularPartition, a_list: &[AAutElement]) -> Result<Vec<Ball>> {
    let mut fits: Vec<Ball> = Vec::new();
    for a in a_list {
        a.shape().expect_same(x.shape())?;
        for z in x.balls() {
            let image = a.image_of_ball(z).map_err(|_| Error::NotAdmissible {
                part: z.to_string(),
            })?;
            if r.contains(&image) {
                fits.push(image);
            }
        }
    }
    if fits.is_empty() {
        Ok(vec![r.clone()])
    } else {
        Ok(minimal_balls(&fits))
    }
}

/// One targeted refinement step: carve every part of `g.p` by the images of
/// parts of `p` under the listed elements, then collect the pieces. The
/// result is a regular partition that refines `g.p`; its pullback through
/// `g` refines `p`.
pub fn delta_refinement(
    g: &AAutElement,
    a_list: &[AAutElement],
    p: &RegularPartition,
) -> Result<RegularPartition> {
    let gp = apply_element(g, p)?;
    let mut balls = Vec::with_capacity(gp.len());
    for q in gp.balls() {
        balls.extend(theta(q, p, a_list)?);
    }
    RegularPartition::new(p.shape(), balls)
}

/// The parts of `g.p` that strictly contain some part of `p`. Empty exactly
/// when `g.p = p`, i.e. when `g` fixes the partition setwise.
pub fn omega(p: &RegularPartition, g: &AAutElement) -> Result<Vec<Ball>> {
    let gp = apply_element(g, p)?;
    Ok(gp
        .balls()
        .iter()
        .filter(|q| p.balls().iter().any(|b| b.strictly_inside(q)))
        .cloned()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::Shape;

    fn sh(d: u32, k: u32) -> Shape {
        Shape::new(d, k).unwrap()
    }

    fn part(text: &str) -> RegularPartition {
        RegularPartition::parse(sh(2, 2), text).unwrap()
    }

    fn el(text: &str) -> AAutElement {
        AAutElement::parse_leaf_map(sh(2, 2), text).unwrap()
    }

    fn x0() -> AAutElement {
        el("0.0 -> 0; 0.1 -> 1.0; 1 -> 1.1")
    }

    fn sigma() -> AAutElement {
        el("0 -> 1; 1 -> 0")
    }

    fn ball(text: &str) -> Ball {
        Ball::parse(sh(2, 2), text).unwrap()
    }

    #[test]
    fn image_partition_of_translation() {
        let p = part("0.0, 0.1, 1");
        let gp = apply_element(&x0(), &p).unwrap();
        assert_eq!(gp.to_string(), "0,1.0,1.1");
    }

    #[test]
    fn image_partition_requires_admissibility() {
        let p = part("0, 1");
        match apply_element(&x0(), &p) {
            Err(Error::NotAdmissible { part }) => assert_eq!(part, "0"),
            other => panic!("expected NotAdmissible, got {other:?}"),
        }
    }

    #[test]
    fn minimal_balls_drop_nests_and_duplicates() {
        let family = vec![ball("0"), ball("0.0"), ball("1"), ball("1"), ball("0.0")];
        let min = minimal_balls(&family);
        assert_eq!(min, vec![ball("0.0"), ball("1")]);
        // A lone ball is minimal.
        assert_eq!(minimal_balls(&[ball("0")]), vec![ball("0")]);
        assert!(minimal_balls(&[]).is_empty());
    }

    #[test]
    fn theta_carves_with_identity_images() {
        let id = AAutElement::identity(sh(2, 2));
        let p = part("0.0, 0.1, 1");
        // Two parts fit inside the left half and tile it.
        let got = theta(&ball("0"), &p, std::slice::from_ref(&id)).unwrap();
        assert_eq!(got, vec![ball("0.0"), ball("0.1")]);
        // Nothing fits strictly below 1.0, so the ball itself comes back.
        let got = theta(&ball("1.0"), &p, std::slice::from_ref(&id)).unwrap();
        assert_eq!(got, vec![ball("1.0")]);
    }

    #[test]
    fn theta_uses_only_the_listed_elements() {
        // With just the swap available, the left part's image tiles the
        // right ball; the identity is not consulted.
        let p = part("0, 1");
        let got = theta(&ball("1"), &p, std::slice::from_ref(&sigma())).unwrap();
        assert_eq!(got, vec![ball("1")]);
    }

    #[test]
    fn theta_rejects_inadmissible_list_entries() {
        let p = part("0, 1");
        match theta(&ball("0"), &p, std::slice::from_ref(&x0())) {
            Err(Error::NotAdmissible { part }) => assert_eq!(part, "0"),
            other => panic!("expected NotAdmissible, got {other:?}"),
        }
    }

    #[test]
    fn delta_refines_the_translation_image() {
        let id = AAutElement::identity(sh(2, 2));
        let p = part("0.0, 0.1, 1");
        let refined = delta_refinement(&x0(), std::slice::from_ref(&id), &p).unwrap();
        assert_eq!(refined.to_string(), "0.0,0.1,1.0,1.1");
        // The refined partition refines the image partition.
        let gp = apply_element(&x0(), &p).unwrap();
        assert!(refined.refines(&gp).unwrap());
    }

    #[test]
    fn delta_fixes_identity_and_swap() {
        let id = AAutElement::identity(sh(2, 2));
        let p = part("0.0, 0.1, 1");
        let same = delta_refinement(&id, std::slice::from_ref(&id), &p).unwrap();
        assert_eq!(same, p);
        let q = part("0, 1");
        let same = delta_refinement(&sigma(), std::slice::from_ref(&id), &q).unwrap();
        assert_eq!(same, q);
    }

    #[test]
    fn omega_flags_parts_that_grew() {
        let p = part("0.0, 0.1, 1");
        assert_eq!(omega(&p, &x0()).unwrap(), vec![ball("0")]);
        let q = part("0, 1");
        assert!(omega(&q, &sigma()).unwrap().is_empty());
        let id = AAutElement::identity(sh(2, 2));
        assert!(omega(&p, &id).unwrap().is_empty());
    }
}
