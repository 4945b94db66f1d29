//! Seeded random generation of codes, elements, and partitions. All
//! functions are deterministic in the supplied generator, so a fixed seed
//! reproduces the same objects byte for byte.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::address::Address;
use crate::ball::{last_ball, penult_ball, Ball};
use crate::element::AAutElement;
use crate::error::{Error, Result};
use crate::partition::RegularPartition;
use crate::shape::Shape;
use crate::thompson::is_weakly_breaking;

/// Check that `leaf_count` is reachable by splitting leaves from the level-1
/// code: each split trades one leaf for `d`, so counts are exactly
/// `k + m(d-1)` for `m >= 0`.
fn check_leaf_count(shape: Shape, leaf_count: usize) -> Result<()> {
    let k = shape.k() as usize;
    let d = shape.d() as usize;
    if leaf_count < k || !(leaf_count - k).is_multiple_of(d - 1) {
        return Err(Error::Domain(format!(
            "no complete code at {shape} has {leaf_count} leaves: counts are k + m(d-1)"
        )));
    }
    Ok(())
}

/// A uniform-split random complete prefix code with exactly `leaf_count`
/// leaves, sorted in planar order: starting from the level-1 code, a leaf
/// chosen uniformly is replaced by its children until the count is reached.
pub fn random_code<R: Rng + ?Sized>(
    shape: Shape,
    leaf_count: usize,
    rng: &mut R,
) -> Result<Vec<Address>> {
    check_leaf_count(shape, leaf_count)?;
    let root = Address::root(shape);
    let mut leaves: Vec<Address> = (0..shape.k())
        .map(|j| root.child(j).expect("j < k"))
        .collect();
    while leaves.len() < leaf_count {
        let i = rng.gen_range(0..leaves.len());
        let parent = leaves.swap_remove(i);
        for j in 0..shape.d() {
            leaves.push(parent.child(j).expect("j < d"));
        }
    }
    leaves.sort();
    Ok(leaves)
}

/// A random element with at most `leaf_count` leaves (reduction may merge
/// some): two independent random codes of that size, paired by a random
/// bijection.
pub fn random_element<R: Rng + ?Sized>(
    shape: Shape,
    leaf_count: usize,
    rng: &mut R,
) -> Result<AAutElement> {
    let domain = random_code(shape, leaf_count, rng)?;
    let mut range = random_code(shape, leaf_count, rng)?;
    range.shuffle(rng);
    AAutElement::from_pairs(shape, domain.into_iter().zip(range).collect())
}

/// A random planar-order-preserving element: two independent random codes
/// of the given size, paired in planar order.
pub fn random_order_preserving<R: Rng + ?Sized>(
    shape: Shape,
    leaf_count: usize,
    rng: &mut R,
) -> Result<AAutElement> {
    let domain = random_code(shape, leaf_count, rng)?;
    let range = random_code(shape, leaf_count, rng)?;
    AAutElement::from_pairs(shape, domain.into_iter().zip(range).collect())
}

/// A random regular partition with exactly `part_count` parts.
pub fn random_partition<R: Rng + ?Sized>(
    shape: Shape,
    part_count: usize,
    rng: &mut R,
) -> Result<RegularPartition> {
    let balls = random_code(shape, part_count, rng)?
        .into_iter()
        .map(|a| Ball::new(a).expect("code addresses are non-root"))
        .collect();
    RegularPartition::new(shape, balls)
}

/// A random element preserving the given partition setwise: its parts are
/// permuted by a uniformly shuffled bijection.
pub fn random_stab_element<R: Rng + ?Sized>(
    partition: &RegularPartition,
    rng: &mut R,
) -> Result<AAutElement> {
    let domain: Vec<Address> = partition.balls().iter().map(|b| b.address().clone()).collect();
    let mut range = domain.clone();
    range.shuffle(rng);
    AAutElement::from_pairs(partition.shape(), domain.into_iter().zip(range).collect())
}

/// A random non-identity element supported inside `ball`: a code obtained
/// by `splits >= 1` uniform splits of the ball is permuted nontrivially,
/// and everything outside the ball is fixed leaf by leaf.
pub fn random_supported_in<R: Rng + ?Sized>(
    ball: &Ball,
    splits: usize,
    rng: &mut R,
) -> Result<AAutElement> {
    if splits == 0 {
        return Err(Error::Domain(
            "at least one split is needed for a nontrivial permutation inside a ball".into(),
        ));
    }
    let shape = ball.shape();
    // Fixed complement: at each vertex along the path to the ball, all
    // sibling subtrees off the path are single fixed leaves.
    let mut pairs: Vec<(Address, Address)> = Vec::new();
    let path = ball.address().digits();
    let mut walk = Address::root(shape);
    for (depth, &digit) in path.iter().enumerate() {
        for j in 0..shape.arity_at(depth) {
            if j != digit {
                let sibling = walk.child(j).expect("arity checked");
                pairs.push((sibling.clone(), sibling));
            }
        }
        walk = walk.child(digit).expect("arity checked");
    }
    // Code inside the ball.
    let mut leaves = vec![walk];
    for _ in 0..splits {
        let i = rng.gen_range(0..leaves.len());
        let parent = leaves.swap_remove(i);
        for j in 0..shape.d() {
            leaves.push(parent.child(j).expect("j < d"));
        }
    }
    leaves.sort();
    let mut images = leaves.clone();
    loop {
        images.shuffle(rng);
        if images != leaves {
            break;
        }
    }
    pairs.extend(leaves.into_iter().zip(images));
    AAutElement::from_pairs(shape, pairs)
}

/// A random element breaking the rightmost branch at sphere `n`: a
/// permutation of the `n`-sphere parts that fixes the final part, sends the
/// penultimate part to a part disjoint from the final ball of the
/// `(n-1)`-sphere, and shuffles the rest. The result is verified before it
/// is returned.
pub fn random_weakly_breaking<R: Rng + ?Sized>(
    shape: Shape,
    n: u32,
    rng: &mut R,
) -> Result<AAutElement> {
    if n < 2 {
        return Err(Error::Domain(
            "spherical breaking elements exist only from sphere 2 on".into(),
        ));
    }
    let sphere = RegularPartition::spherical(shape, n)?;
    let last = last_ball(shape, n)?;
    let penult = penult_ball(shape, n)?;
    let last_above = last_ball(shape, n - 1)?;
    let last_i = sphere.index_of(&last).expect("final ball is a sphere part");
    let penult_i = sphere
        .index_of(&penult)
        .expect("penultimate ball is a sphere part");
    let pool: Vec<usize> = (0..sphere.len())
        .filter(|&i| !last_above.contains(&sphere.balls()[i]))
        .collect();
    for _ in 0..16 {
        let target = pool[rng.gen_range(0..pool.len())];
        let mut perm: Vec<usize> = (0..sphere.len()).collect();
        perm.swap(penult_i, target);
        let rest: Vec<usize> = (0..sphere.len())
            .filter(|&i| i != penult_i && i != target && i != last_i)
            .collect();
        let mut images = rest.clone();
        images.shuffle(rng);
        for (&slot, value) in rest.iter().zip(images) {
            perm[slot] = value;
        }
        let pairs = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                (
                    sphere.balls()[i].address().clone(),
                    sphere.balls()[j].address().clone(),
                )
            })
            .collect();
        let candidate = AAutElement::from_pairs(shape, pairs)?;
        if is_weakly_breaking(&candidate, n).is_ok() {
            return Ok(candidate);
        }
    }
    Err(Error::Verification(
        "failed to sample a spherical breaking element".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sh(d: u32, k: u32) -> Shape {
        Shape::new(d, k).unwrap()
    }

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn codes_have_the_requested_size_and_are_sorted() {
        for (d, k) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
            let shape = sh(d, k);
            let k = k as usize;
            let d = d as usize;
            for m in 0..5 {
                let count = k + m * (d - 1);
                let code = random_code(shape, count, &mut rng(7)).unwrap();
                assert_eq!(code.len(), count);
                let balls: Vec<Ball> = code.iter().map(|a| Ball::new(a.clone()).unwrap()).collect();
                RegularPartition::new(shape, balls).expect("code is complete");
                assert!(code.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn unreachable_counts_are_rejected() {
        assert!(matches!(
            random_code(sh(3, 2), 3, &mut rng(0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            random_code(sh(2, 2), 1, &mut rng(0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            random_element(sh(3, 3), 4, &mut rng(0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn same_seed_reproduces_the_same_objects() {
        for shape in [sh(2, 2), sh(3, 3)] {
            let a = random_element(shape, shape.k() as usize + 3 * (shape.d() as usize - 1), &mut rng(42)).unwrap();
            let b = random_element(shape, shape.k() as usize + 3 * (shape.d() as usize - 1), &mut rng(42)).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.serialize(), b.serialize());
        }
    }

    #[test]
    fn order_preserving_samples_land_in_the_planar_subgroup() {
        use crate::thompson::is_in_f;
        for seed in 0..20 {
            let g = random_order_preserving(sh(2, 2), 8, &mut rng(seed)).unwrap();
            assert!(is_in_f(&g), "seed {seed} gave a non-monotone element");
        }
    }

    #[test]
    fn stab_samples_preserve_their_partition() {
        for seed in 0..20 {
            let mut r = rng(seed);
            let p = random_partition(sh(2, 2), 6, &mut r).unwrap();
            let g = random_stab_element(&p, &mut r).unwrap();
            assert!(g.in_stab(&p).unwrap(), "seed {seed} left the stabilizer");
        }
    }

    #[test]
    fn supported_samples_stay_inside_their_ball() {
        let ball = Ball::parse(sh(2, 2), "1.0").unwrap();
        for seed in 0..20 {
            let g = random_supported_in(&ball, 2, &mut rng(seed)).unwrap();
            assert!(g.supported_in(&ball), "seed {seed} escaped the ball");
            assert!(!g.is_identity());
        }
        assert!(random_supported_in(&ball, 0, &mut rng(0)).is_err());
    }

    #[test]
    fn breaking_samples_verify_at_their_sphere() {
        for (d, k) in [(2, 2), (3, 2), (2, 3)] {
            for n in 2..=3 {
                let z = random_weakly_breaking(sh(d, k), n, &mut rng(11)).unwrap();
                assert!(is_weakly_breaking(&z, n).is_ok());
            }
        }
        assert!(random_weakly_breaking(sh(2, 2), 1, &mut rng(0)).is_err());
    }
}
