//! Statistical detectability of an underlying discrete spatial grid.
//!
//! A forced displacement on a grid of spacing `l_eff` is realized as a
//! Poisson-distributed number of cells, so repeated identical
//! displacements carry an intrinsic standard deviation `sqrt(l_eff * d)`.
//! This crate evaluates the closed-form thresholds for when that variance
//! clears the Compton and Planck measurement floors — both for a single
//! particle and for a particle recoil-coupled to a heavy object through
//! mass-dipole conservation, which amplifies the object's grid variance
//! by the mass ratio — and verifies the statistics with a seeded,
//! reproducible Monte Carlo engine.

pub mod bounds;
pub mod cli;
pub mod logq;
pub mod model;
pub mod montecarlo;
pub mod sweep;
