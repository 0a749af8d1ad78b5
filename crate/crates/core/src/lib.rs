//! Numerical holomorphic dynamics in the unit disc.
//!
//! The crate builds canonical holomorphic models (Koenigs maps) for
//! univalent self-maps of the disc, evaluates continuous one-parameter
//! semigroups through the Abel equation or an infinitesimal generator,
//! tests commutativity and affinity of self-maps against a semigroup, and
//! explores petals and boundary fixed points. A catalog of closed-form
//! example families exercises every dynamical regime: hyperbolic groups,
//! parabolic automorphisms, zero-step semigroups with parabolic and
//! hyperbolic petals, a positive-step half-plane map, an elliptic
//! semigroup, and a model-level comb domain.

pub mod catalog;
pub mod centralizer;
pub mod error;
pub mod formula;
pub mod koenigs;
pub mod map;
pub mod metric;
pub mod petals;
pub mod report;
pub mod semigroup;
pub mod util;

pub use error::{Error, Result};
pub use formula::{parse, Dual, Expr};
pub use map::{
    BaseSpace, DomainTag, Holomorphic, Inversion, KoenigsDescriptor, KoenigsFn, MapDescriptor,
    Mobius, OmegaPredicate,
};
pub use metric::{classify, ClassificationReport, MapKind};
pub use semigroup::{SemigroupForm, SemigroupSpec};
