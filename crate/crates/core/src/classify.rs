//! Deciding how elements and finitely generated subgroups act on the
//! boundary: a certificate-producing partition-refinement engine, verdict
//! types, a brute-force power-scanning oracle for cross-checks, and a
//! verifier for contraction certificates.

use std::collections::{HashMap, HashSet, VecDeque};

use num::integer::lcm;

use crate::ball::Ball;
use crate::calculus::{apply_element, omega};
use crate::element::AAutElement;
use crate::error::{Error, Result};
use crate::partition::RegularPartition;
use crate::shape::Shape;

/// Safety limits: `iter_cap` bounds refinement and power-scanning loops,
/// `closure_cap` bounds group-closure enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub iter_cap: u64,
    pub closure_cap: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            iter_cap: 10_000,
            closure_cap: 1_000_000,
        }
    }
}

/// Certificate that `witness` raised to `power` restricts to a homothety on
/// `ball` mapping it onto `image`, strictly inside `ball`. Such an element
/// generates an unbounded (non-relatively-compact) cyclic subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationCert {
    pub witness: AAutElement,
    pub ball: Ball,
    pub power: i64,
    pub image: Ball,
}

/// Verdict for a single element: either it preserves a regular partition
/// setwise (and then has the stated finite order), or it admits a verified
/// contraction certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Elliptic {
        invariant_partition: RegularPartition,
        order: u64,
    },
    Translation(TranslationCert),
}

/// Exact enumerated order of a finite subgroup, or a marker that the
/// enumeration stopped at the configured cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgroupOrder {
    Exact(u64),
    CapExceeded { cap: u64 },
}

/// Certificate for a finite subgroup: a partition every generator preserves
/// setwise, the induced part permutations (one per generator, in input
/// order), and the group order obtained by closing the permutations under
/// composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSubgroupCert {
    pub base_partition: RegularPartition,
    pub generator_perms: Vec<Vec<usize>>,
    pub order: SubgroupOrder,
}

/// Verdict for a finitely generated subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubgroupClassification {
    Elliptic(FiniteSubgroupCert),
    Translation(TranslationCert),
}

/// Exact order of a single element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementOrder {
    Finite(u64),
    Infinite,
}

/// Verdict of the brute-force power-scanning oracle. `Unknown` means the
/// scan exhausted its power budget without reaching the identity or seeing
/// a contracted leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Elliptic { order: u64 },
    Translation { power: i64, ball: Ball },
    Unknown,
}

/// Outcome of a certificate check, with the first failed clause when the
/// certificate is invalid and the recomputed image when one exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessReport {
    pub valid: bool,
    pub reason: Option<String>,
    pub computed_image: Option<Ball>,
}

/// A finite group acting on a fixed base partition by permuting its parts;
/// each restriction to a part preserves the relative address exactly, so
/// orbits of balls inside parts are computed on part indices alone.
#[derive(Debug, Clone)]
pub struct StabilizerGroup {
    base: RegularPartition,
    gens: Vec<AAutElement>,
    perms: Vec<Vec<usize>>,
}

impl StabilizerGroup {
    /// The trivial group on the level-1 partition.
    pub fn trivial(shape: Shape) -> StabilizerGroup {
        StabilizerGroup {
            base: RegularPartition::spherical(shape, 1).expect("level 1 is always enumerable"),
            gens: Vec::new(),
            perms: Vec::new(),
        }
    }

    /// Wrap generators that each preserve `base` setwise, recording their
    /// part permutations. Fails with a verification error otherwise.
    pub fn from_elements(base: RegularPartition, gens: Vec<AAutElement>) -> Result<StabilizerGroup> {
        let mut perms = Vec::with_capacity(gens.len());
        for g in &gens {
            perms.push(part_permutation(g, &base)?);
        }
        Ok(StabilizerGroup { base, gens, perms })
    }

    pub fn base(&self) -> &RegularPartition {
        &self.base
    }

    pub fn gens(&self) -> &[AAutElement] {
        &self.gens
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    /// The canonical element inducing the part permutation `perm`: it maps
    /// the i-th part onto the perm(i)-th by plain prefix substitution.
    fn element_of_perm(&self, perm: &[usize]) -> AAutElement {
        let pairs = perm
            .iter()
            .enumerate()
            .map(|(i, &j)| {
                (
                    self.base.balls()[i].address().clone(),
                    self.base.balls()[j].address().clone(),
                )
            })
            .collect();
        AAutElement::from_pairs(self.base.shape(), pairs)
            .expect("a part permutation is a valid leaf map")
    }

    /// The orbit of `z` under the whole group, together with a group element
    /// carrying `z` onto each orbit member. `z` must sit inside a base part;
    /// members preserve z's relative address, so the orbit is found by a
    /// breadth-first search over part indices.
    pub fn orbit_with_witness(&self, z: &Ball) -> Result<Vec<(Ball, AAutElement)>> {
        let start = self
            .base
            .balls()
            .iter()
            .position(|b| b.contains(z))
            .ok_or_else(|| {
                Error::Verification(format!("ball {z} is not inside any base part"))
            })?;
        let suffix = self.base.balls()[start]
            .address()
            .suffix_of(z.address())
            .expect("containment gives a prefix");
        let n = self.base.len();
        let identity: Vec<usize> = (0..n).collect();
        let inverses: Vec<Vec<usize>> = self.perms.iter().map(|p| invert_perm(p)).collect();
        let mut reached: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut queue: VecDeque<usize> = VecDeque::new();
        reached.insert(start, identity);
        queue.push_back(start);
        let mut order_out: Vec<usize> = vec![start];
        while let Some(cur) = queue.pop_front() {
            let cur_perm = reached[&cur].clone();
            for step in self.perms.iter().chain(inverses.iter()) {
                let next = step[cur];
                if let std::collections::hash_map::Entry::Vacant(slot) = reached.entry(next) {
                    slot.insert(cur_perm.iter().map(|&j| step[j]).collect());
                    queue.push_back(next);
                    order_out.push(next);
                }
            }
        }
        let mut out = Vec::with_capacity(order_out.len());
        for idx in order_out {
            let perm = &reached[&idx];
            let ball = Ball::new(self.base.balls()[perm[start]].address().join(suffix))
                .expect("joining onto a non-root address stays non-root");
            out.push((ball, self.element_of_perm(perm)));
        }
        Ok(out)
    }

    /// Every part permutation in the generated group, by breadth-first
    /// closure under the generators; errors when the count passes `cap`.
    pub fn closure(&self, cap: u64) -> Result<Vec<Vec<usize>>> {
        let n = self.base.len();
        let identity: Vec<usize> = (0..n).collect();
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
        seen.insert(identity.clone());
        out.push(identity.clone());
        queue.push_back(identity);
        while let Some(cur) = queue.pop_front() {
            for gen in &self.perms {
                let next: Vec<usize> = cur.iter().map(|&j| gen[j]).collect();
                if seen.insert(next.clone()) {
                    if seen.len() as u64 > cap {
                        return Err(Error::SizeCapExceeded { cap });
                    }
                    out.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        Ok(out)
    }

    /// Group order by closure enumeration, degrading to a cap marker.
    pub fn order(&self, cap: u64) -> SubgroupOrder {
        match self.closure(cap) {
            Ok(all) => SubgroupOrder::Exact(all.len() as u64),
            Err(_) => SubgroupOrder::CapExceeded { cap },
        }
    }
}

/// The permutation of `base` parts induced by `g`, which must preserve the
/// partition setwise.
fn part_permutation(g: &AAutElement, base: &RegularPartition) -> Result<Vec<usize>> {
    let mut perm = Vec::with_capacity(base.len());
    for b in base.balls() {
        let image = g.image_of_ball(b).map_err(|_| {
            Error::Verification(format!(
                "element is not a homothety on base part {b}"
            ))
        })?;
        let idx = base.index_of(&image).ok_or_else(|| {
            Error::Verification(format!(
                "element maps base part {b} onto {image}, which is not a base part"
            ))
        })?;
        perm.push(idx);
    }
    let mut check: Vec<usize> = perm.clone();
    check.sort_unstable();
    if check.iter().enumerate().any(|(i, &j)| i != j) {
        return Err(Error::Verification(
            "part images do not form a permutation".into(),
        ));
    }
    Ok(perm)
}

fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// How a part of a refinement iterate arose.
#[derive(Debug, Clone)]
pub enum PartOrigin {
    /// Present in the starting partition.
    Initial,
    /// No candidate image fit strictly inside its image ball; kept as-is.
    Carried,
    /// Pulled back from a candidate: the ball equals `via(from)` where
    /// `from` is a part of the previous iterate and `via` composes the
    /// inverse of the driving element with a group member.
    Mapped { via: AAutElement, from: Ball },
}

/// One part of a refinement iterate with its provenance: `witness` maps the
/// originating part `source` of the starting partition onto `ball`.
#[derive(Debug, Clone)]
pub struct TaggedPart {
    pub ball: Ball,
    pub witness: AAutElement,
    pub source: Ball,
    pub origin: PartOrigin,
}

/// A full refinement iterate.
pub type TaggedPartition = Vec<TaggedPart>;

/// Terminal state of the refinement run.
#[derive(Debug, Clone)]
pub enum EngineOutcome {
    /// The iteration reached a partition fixed setwise by the driving
    /// element and by every group generator.
    Stabilized(RegularPartition),
    /// Two provenance tags over the same source pinned down an element of
    /// the generated group mapping `ball` strictly inside itself.
    Witness { element: AAutElement, ball: Ball },
}

/// Result of a refinement run: the outcome plus every iterate with full
/// provenance, for audit.
#[derive(Debug, Clone)]
pub struct EngineRun {
    pub outcome: EngineOutcome,
    pub steps: Vec<TaggedPartition>,
    pub iterations: u64,
}

/// Iteratively refine `p0` under the driving element `g` and the finite
/// group `k`: each step carves every part of `g.P` by the smallest group
/// images of parts of `P` that fit inside it, then pulls the pieces back
/// through `g`. Stops when the partition is fixed (every iterate refines
/// the previous one, so a fixed partition is preserved by `g` and all of
/// `k`), or as soon as two provenance tags over one source part exhibit a
/// strict self-contraction.
///
/// Preconditions: `p0` refines `k`'s base partition and is admissible
/// for `g`.
pub fn refinement_engine(
    g: &AAutElement,
    k: &StabilizerGroup,
    p0: &RegularPartition,
    caps: Caps,
) -> Result<EngineRun> {
    g.shape().expect_same(p0.shape())?;
    g.shape().expect_same(k.base().shape())?;
    if !p0.refines(k.base())? {
        return Err(Error::Precondition(
            "starting partition does not refine the group's base partition".into(),
        ));
    }
    apply_element(g, p0).map_err(|e| {
        Error::Precondition(format!("starting partition not admissible: {e}"))
    })?;

    let g_inv = g.invert();
    let identity = AAutElement::identity(g.shape());
    let mut parts: TaggedPartition = p0
        .balls()
        .iter()
        .map(|b| TaggedPart {
            ball: b.clone(),
            witness: identity.clone(),
            source: b.clone(),
            origin: PartOrigin::Initial,
        })
        .collect();
    // Every ball each source part has ever been carried onto, with the
    // group-word witness that realizes it.
    let mut ancestry: HashMap<Ball, Vec<(AAutElement, Ball)>> = parts
        .iter()
        .map(|p| (p.ball.clone(), vec![(identity.clone(), p.ball.clone())]))
        .collect();
    let mut steps: Vec<TaggedPartition> = vec![parts.clone()];

    for iteration in 0..caps.iter_cap {
        // Candidate pool: all group images of all current parts, first
        // occurrence per ball.
        let mut pool: Vec<(Ball, AAutElement, usize)> = Vec::new();
        let mut pool_seen: HashSet<Ball> = HashSet::new();
        for (zi, part) in parts.iter().enumerate() {
            for (ball, witness) in k.orbit_with_witness(&part.ball)? {
                if pool_seen.insert(ball.clone()) {
                    pool.push((ball, witness, zi));
                }
            }
        }

        let mut next: TaggedPartition = Vec::with_capacity(parts.len());
        for part in &parts {
            let image = g.image_of_ball(&part.ball).map_err(|_| {
                Error::Verification(format!(
                    "iterate lost admissibility on part {}",
                    part.ball
                ))
            })?;
            let fits: Vec<&(Ball, AAutElement, usize)> =
                pool.iter().filter(|(b, _, _)| image.contains(b)).collect();
            if fits.is_empty() {
                next.push(TaggedPart {
                    ball: part.ball.clone(),
                    witness: part.witness.clone(),
                    source: part.source.clone(),
                    origin: PartOrigin::Carried,
                });
                continue;
            }
            for fit in &fits {
                let (ball, witness, zi) = fit;
                if fits.iter().any(|(b2, _, _)| b2.strictly_inside(ball)) {
                    continue;
                }
                let new_ball = g_inv.image_of_ball(ball).expect("inverse homothety");
                let via = g_inv.compose(witness)?;
                let src = &parts[*zi];
                next.push(TaggedPart {
                    ball: new_ball,
                    witness: via.compose(&src.witness)?,
                    source: src.source.clone(),
                    origin: PartOrigin::Mapped {
                        via,
                        from: src.ball.clone(),
                    },
                });
            }
        }
        next.sort_by(|a, b| a.ball.cmp(&b.ball));
        let next_partition = RegularPartition::new(
            p0.shape(),
            next.iter().map(|p| p.ball.clone()).collect(),
        )
        .map_err(|e| Error::Verification(format!("refinement step is not a partition: {e}")))?;

        let unchanged = next.len() == parts.len()
            && next.iter().zip(parts.iter()).all(|(a, b)| a.ball == b.ball);

        steps.push(next.clone());

        if unchanged {
            if !omega(&next_partition, g)?.is_empty() {
                return Err(Error::Verification(
                    "fixed partition is not preserved by the driving element".into(),
                ));
            }
            for gen in k.gens() {
                if !omega(&next_partition, gen)?.is_empty() {
                    return Err(Error::Verification(
                        "fixed partition is not preserved by a group generator".into(),
                    ));
                }
            }
            return Ok(EngineRun {
                outcome: EngineOutcome::Stabilized(next_partition),
                steps,
                iterations: iteration + 1,
            });
        }

        // Pigeonhole scan: a freshly mapped ball nested with an earlier ball
        // over the same source yields a strict self-contraction.
        for part in &next {
            if !matches!(part.origin, PartOrigin::Mapped { .. }) {
                continue;
            }
            let Some(entries) = ancestry.get(&part.source) else {
                continue;
            };
            for (old_witness, old_ball) in entries {
                let (inner, outer) = if part.ball.strictly_inside(old_ball) {
                    (&part.witness, old_witness)
                } else if old_ball.strictly_inside(&part.ball) {
                    (old_witness, &part.witness)
                } else {
                    continue;
                };
                let element = outer.invert().compose(inner)?;
                let contracted = element.image_of_ball(&part.source).map_err(|_| {
                    Error::Certificate(format!(
                        "extracted element is not a homothety on {}",
                        part.source
                    ))
                })?;
                if !contracted.strictly_inside(&part.source) {
                    return Err(Error::Certificate(format!(
                        "extracted element does not contract {}",
                        part.source
                    )));
                }
                return Ok(EngineRun {
                    outcome: EngineOutcome::Witness {
                        element,
                        ball: part.source.clone(),
                    },
                    steps,
                    iterations: iteration + 1,
                });
            }
        }

        for part in &next {
            if matches!(part.origin, PartOrigin::Mapped { .. }) {
                let entries = ancestry.entry(part.source.clone()).or_default();
                if entries.iter().all(|(_, b)| b != &part.ball) {
                    entries.push((part.witness.clone(), part.ball.clone()));
                }
            }
        }
        parts = next;
    }
    Err(Error::IterationCapExceeded { cap: caps.iter_cap })
}

/// Scan powers of `h` for a leaf mapped strictly below itself (or strictly
/// above, for the inverse direction), producing a contraction certificate
/// with `h` as the witness. Used to canonicalize engine witnesses.
fn attracting_cert(h: &AAutElement, caps: Caps) -> Result<TranslationCert> {
    let mut acc = h.clone();
    for m in 1..=caps.iter_cap {
        if acc.is_identity() {
            return Err(Error::Verification(
                "power scan reached the identity while extracting a contraction".into(),
            ));
        }
        for (p, q) in acc.pairs() {
            if p != q && p.is_prefix_of(q) {
                return Ok(TranslationCert {
                    witness: h.clone(),
                    ball: Ball::new(p.clone()).expect("leaves are non-root"),
                    power: m as i64,
                    image: Ball::new(q.clone()).expect("leaves are non-root"),
                });
            }
        }
        for (p, q) in acc.pairs() {
            if p != q && q.is_prefix_of(p) {
                return Ok(TranslationCert {
                    witness: h.clone(),
                    ball: Ball::new(q.clone()).expect("leaves are non-root"),
                    power: -(m as i64),
                    image: Ball::new(p.clone()).expect("leaves are non-root"),
                });
            }
        }
        acc = acc.compose(h)?;
    }
    Err(Error::IterationCapExceeded { cap: caps.iter_cap })
}

/// The order of `g` as a permutation of the parts of a partition it
/// preserves setwise: the least common multiple of its cycle lengths. Since
/// each restriction preserves relative addresses, `g` to this power is the
/// identity exactly.
fn stabilized_order(g: &AAutElement, q: &RegularPartition) -> Result<u64> {
    let perm = part_permutation(g, q)?;
    let mut seen = vec![false; perm.len()];
    let mut order: u128 = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len: u128 = 0;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = perm[cur];
            len += 1;
        }
        order = lcm(order, len);
        if order > u64::MAX as u128 {
            return Err(Error::SizeCapExceeded { cap: u64::MAX });
        }
    }
    Ok(order as u64)
}

/// Decide whether `g` preserves some regular partition setwise (finite
/// order, with the partition and exact order returned) or admits a verified
/// contraction certificate (infinite order).
pub fn classify_element(g: &AAutElement, caps: Caps) -> Result<Classification> {
    let trivial = StabilizerGroup::trivial(g.shape());
    let p0 = g.coarsest_admissible();
    let run = refinement_engine(g, &trivial, &p0, caps)?;
    match run.outcome {
        EngineOutcome::Stabilized(q) => {
            let order = stabilized_order(g, &q)?;
            Ok(Classification::Elliptic {
                invariant_partition: q,
                order,
            })
        }
        EngineOutcome::Witness { .. } => Ok(Classification::Translation(attracting_cert(g, caps)?)),
    }
}

/// Decide whether the subgroup generated by `gens` is finite (returning a
/// preserved partition, the generator permutations, and the enumerated
/// order) or contains an element with a verified contraction certificate.
/// Generators are absorbed one at a time: each runs the refinement engine
/// against the group built so far, and on stabilization the group is
/// re-expressed on the refined partition.
pub fn classify_subgroup(gens: &[AAutElement], caps: Caps) -> Result<SubgroupClassification> {
    let Some(first) = gens.first() else {
        return Err(Error::Precondition(
            "subgroup classification needs at least one generator".into(),
        ));
    };
    let shape = first.shape();
    for g in gens {
        shape.expect_same(g.shape())?;
    }
    let mut group = StabilizerGroup::trivial(shape);
    let mut absorbed: Vec<AAutElement> = Vec::new();
    for g in gens {
        let p0 = group.base().common_refinement(&g.coarsest_admissible())?;
        let run = refinement_engine(g, &group, &p0, caps)?;
        match run.outcome {
            EngineOutcome::Stabilized(q) => {
                absorbed.push(g.clone());
                group = StabilizerGroup::from_elements(q, absorbed.clone())?;
            }
            EngineOutcome::Witness { element, .. } => {
                return Ok(SubgroupClassification::Translation(attracting_cert(
                    &element, caps,
                )?));
            }
        }
    }
    let order = group.order(caps.closure_cap);
    Ok(SubgroupClassification::Elliptic(FiniteSubgroupCert {
        base_partition: group.base().clone(),
        generator_perms: group.perms().to_vec(),
        order,
    }))
}

/// Check a contraction certificate from scratch: the witness raised to the
/// stated power must restrict to a homothety on the ball, the computed
/// image must be strictly inside the ball, and it must equal the stated
/// image.
pub fn verify_witness(cert: &TranslationCert) -> WitnessReport {
    let fail = |reason: &str, image: Option<Ball>| WitnessReport {
        valid: false,
        reason: Some(reason.to_string()),
        computed_image: image,
    };
    if cert.power == 0 {
        return fail("power is zero", None);
    }
    if cert.witness.shape() != cert.ball.shape() || cert.ball.shape() != cert.image.shape() {
        return fail("shape mismatch between witness, ball, and image", None);
    }
    let powered = match cert.witness.power(cert.power) {
        Ok(h) => h,
        Err(_) => return fail("witness power cannot be formed", None),
    };
    let image = match powered.image_of_ball(&cert.ball) {
        Ok(b) => b,
        Err(_) => return fail("witness power is not a homothety on the ball", None),
    };
    if !image.strictly_inside(&cert.ball) {
        return fail(
            "computed image is not strictly inside the ball",
            Some(image),
        );
    }
    if image != cert.image {
        return fail("stated image differs from the computed image", Some(image));
    }
    WitnessReport {
        valid: true,
        reason: None,
        computed_image: Some(image),
    }
}

/// Brute-force oracle: walk `g, g^2, …, g^max_power` in reduced form. The
/// identity at power m proves order m; a leaf mapped strictly below itself
/// proves a contraction at power m (strictly above: at power -m). Returns
/// `Unknown` when the budget runs out undecided.
pub fn oracle_classify(g: &AAutElement, max_power: u64) -> Result<OracleVerdict> {
    if max_power == 0 {
        return Err(Error::Precondition("power budget must be at least 1".into()));
    }
    let mut acc = g.clone();
    for m in 1..=max_power {
        if acc.is_identity() {
            return Ok(OracleVerdict::Elliptic { order: m });
        }
        if let Some((p, _)) = acc.pairs().iter().find(|(p, q)| p != q && p.is_prefix_of(q)) {
            return Ok(OracleVerdict::Translation {
                power: m as i64,
                ball: Ball::new(p.clone()).expect("leaves are non-root"),
            });
        }
        if let Some((_, q)) = acc.pairs().iter().find(|(p, q)| p != q && q.is_prefix_of(p)) {
            return Ok(OracleVerdict::Translation {
                power: -(m as i64),
                ball: Ball::new(q.clone()).expect("leaves are non-root"),
            });
        }
        if m < max_power {
            acc = acc.compose(g)?;
        }
    }
    Ok(OracleVerdict::Unknown)
}

/// Exact order of a single element.
pub fn order_of(g: &AAutElement, caps: Caps) -> Result<ElementOrder> {
    Ok(match classify_element(g, caps)? {
        Classification::Elliptic { order, .. } => ElementOrder::Finite(order),
        Classification::Translation(_) => ElementOrder::Infinite,
    })
}
