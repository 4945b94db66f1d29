//! Exact computation with the finitary almost automorphisms of the rooted
//! trees `T_{d,k}` — equivalently, the Higman–Thompson groups `V_{d,k}`
//! acting on the boundary Cantor space by prefix substitutions.
//!
//! The library works entirely with exact combinatorial data: vertex
//! [`Address`]es, proper metric [`Ball`]s, complete prefix codes
//! ([`RegularPartition`]), and elements in reduced leaf-map form
//! ([`AAutElement`]). On top of those it provides
//!
//! * the partition calculus (orbit minimisation, partition refinement and
//!   displacement operators) in [`calculus`],
//! * a certified elliptic/translation classifier for single elements and
//!   finitely generated subgroups in [`classify`],
//! * Thompson-family predicates and the supporting constructions
//!   (translations down the rightmost branch, nested-ball extraction,
//!   commutator experiments, breaking triples) in [`thompson`],
//! * seeded, reproducible random generation of elements and partitions in
//!   [`random`].
//!
//! Every verdict is backed by a finite certificate that can be re-checked
//! independently: an invariant partition together with the induced part
//! permutation for finite (elliptic) behaviour, or a witness element that
//! maps a ball strictly inside itself for infinite (translation) behaviour.

pub mod address;
pub mod ball;
pub mod calculus;
pub mod classify;
pub mod element;
pub mod end;
pub mod error;
pub mod partition;
pub mod random;
pub mod shape;
pub mod thompson;

pub use address::Address;
pub use ball::{ball_relation, delta_depth, last_ball, penult_ball, Ball, BallRelation};
pub use element::AAutElement;
pub use end::End;
pub use error::{Error, Result};
pub use partition::RegularPartition;
pub use shape::Shape;
