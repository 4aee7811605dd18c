//! Core algorithms for synthesizing lock-synchronized process models.
//!
//! The crate is `no_std` (it only needs `alloc`). Everything that touches the
//! file system, the clock or the command line lives in the `locksynth` crate.
//!
//! Pipeline overview:
//!
//! * [`spec`] holds process and system specifications written in a first-order
//!   logic with reflexive-transitive closure ([`logic`]).
//! * [`finder`] grounds a specification at a fixed state bound, hands it to the
//!   CDCL solver in [`sat`] and decodes models back into [`lts::Lts`] values.
//! * [`product`] composes candidate processes asynchronously and [`ltl`] checks
//!   the composition against a global LTL\X property, producing lasso
//!   counterexamples.
//! * [`synth`] drives the search (plain backtracking and the batched,
//!   counterexample-refined variant) and [`codegen`] turns solutions into
//!   guarded-command programs.

#![no_std]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod codegen;
pub mod dsl;
pub mod finder;
pub mod logic;
pub mod ltl;
pub mod lts;
pub mod product;
pub mod sat;
pub mod spec;
pub mod synth;
pub mod syntax;

pub use lts::{Action, ActionKind, FinitePath, Lts, PropSet, StateId, TransitionSystem, Vocabulary};
