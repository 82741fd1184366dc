//! Numerical laboratory for focusing Gibbs measures of the mass-critical
//! NLS and gKdV equations on the one-dimensional torus.
//!
//! The crate is organised around the objects that the experiments consume:
//!
//! * [`field`] — truncated Fourier fields, norms, Hamiltonians, snapshots;
//! * [`measure`] — the base Gaussian, the mass-cutoff Gibbs weight, importance
//!   ensembles and a prior-preserving MCMC chain;
//! * [`dynamics`] — Galerkin-truncated NLS and gKdV flows with spectral
//!   accuracy and exact mass conservation;
//! * [`soliton`] — the ground state, sharp constants, scaled cutoff solitons
//!   and the blow-up exponent of the critical density;
//! * [`orlicz`] — the stretched-exponential Young function family, its
//!   conjugate, Luxemburg norms, and tail-bound constants;
//! * [`experiments`] — invariance, tail, integrability, growth and
//!   union-bound studies built from the pieces above.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod field;
pub mod measure;
pub mod orlicz;
pub mod rng;
pub mod soliton;
pub mod stats;

pub use dynamics::{ConservationReport, Direction, EvolutionSpec, Trajectory};
pub use error::{Error, Result};
pub use field::{
    analyze, dealias_grid_size, hamiltonian, synthesize, Equation, GridSample, NormSpec, Symmetry,
    TorusField,
};
pub use measure::{ChainState, GaussianLaw, GibbsSpec, WeightedEnsemble};
pub use orlicz::{OrliczNormEstimate, YoungFn, YoungParams};
pub use soliton::{ScaledCutoffSoliton, SolitonProfile};
