//! Tabular Markov games: occupancy measures, imitation errors, best responses,
//! Nash gaps, regularised zero-sum solving, counterexample fixtures and the
//! perturbation experiments built on them.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bimatrix;
pub mod dynamics;
pub mod equilibrium;
pub mod fixtures;
pub mod error;
pub mod experiments;
pub mod game;
pub mod io;
pub mod linalg;
pub mod registry;
pub mod sampling;
pub mod tol;

pub use error::{Error, Result};
