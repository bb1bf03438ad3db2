//! Adaptive component-wise multiple-try Metropolis samplers.
//!
//! The crate is organised bottom-up: [`rng`] streams feed the [`kernels`],
//! which update one coordinate of a [`targets`] density at a time;
//! [`adaptation`] tunes the proposal scales between sweeps, [`diagnostics`]
//! summarises a chain and [`harness`] runs configured experiments.

pub mod adaptation;
pub mod diagnostics;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod rng;
pub mod targets;

pub use error::{Error, Result};
