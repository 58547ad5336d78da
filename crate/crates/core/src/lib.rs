//! Quantum Fisher information (QFI) and effective sizes of macroscopic
//! quantum states, together with certified lower bounds on the QFI
//! extracted from measurement records.
//!
//! The QFI here is the convex roof of the variance,
//! `I_ρ(X) = min Σ p_n Var_{ψ_n}(X)`, i.e. one quarter of the usual
//! metrological QFI. Pure states have `I = Var(X)`.
//!
//! Modules:
//! - [`state_space`]: truncated Fock and Dicke spaces, operators, eigensolver.
//! - [`states`]: benchmark states and analytic fringe models.
//! - [`qfi`]: exact QFI, QFI matrices, generator optimization, effective size.
//! - [`bounds`]: uncertainty-relation and Bhattacharyya lower bounds.
//! - [`fit`]: weighted least-squares fits of fringe records.
//! - [`datasets`]: record files, the experiment registry and a simulator.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod datasets;
pub mod error;
pub mod fit;
mod optim;
pub mod qfi;
pub mod rng;
pub mod state_space;
pub mod states;

pub use error::{Error, Result};
