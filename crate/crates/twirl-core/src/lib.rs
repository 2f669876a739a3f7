//! Quantum dynamical semigroups induced by a finite-dimensional unitary
//! Lie-group representation and a convolution semigroup of measures
//! ("twirling semigroups"): exact generators, GKLS canonical forms,
//! state evolution, and Monte-Carlo cross-validation against Brownian
//! and jump processes on the group.

pub mod analyzer;
pub mod error;
pub mod kit;
pub mod lie;
pub mod linalg;
pub mod oracle;
pub mod sampler;
pub mod superop;

pub use error::{Error, Result};
pub use kit::{classify, drift_correction, truncate, HuntEvaluator, KitClass, LevyMeasure, RepresentationKit};
pub use lie::{GroupElement, LieRepresentation, ReprFamily};
pub use superop::{
    apply, evolve, full_generator, gaussian_generator, gkls_canonical, jump_generator,
    kit_from_gkls, twirl_exact, uvee, GklsForm, Superoperator,
};
