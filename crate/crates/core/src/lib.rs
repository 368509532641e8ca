//! Simulation and inference for the hidden subgroup problem over finite
//! abelian groups.
//!
//! The crate covers the exact quantum routine (coset states, group QFT,
//! Fourier sampling, kernel intersection), inference from finite labelled
//! data by data-annihilator overlap, VC dimension and sample-complexity
//! tooling, and leakage analysis of Fourier sampling under sparse data.

pub mod dao;
pub mod error;
pub mod fourier;
pub mod group;
pub mod leakage;
pub mod pac;
pub mod rng;
pub mod solver;
pub mod states;

pub use error::{Error, Result};
pub use group::{CosetTable, Group, GroupElement, Subgroup};
