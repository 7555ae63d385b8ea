//! Numerical workbench for steady solitary water waves.
//!
//! The crate computes fully nonlinear solitary waves (deep-water
//! capillary-gravity and finite-depth gravity) with a conformal-variables
//! pseudospectral Newton method, evaluates the energy functionals of the
//! free-surface problem from boundary traces, and audits the exact integral
//! identities these energies satisfy, against closed-form harmonic oracles.


pub mod audit;
pub mod energy;
pub mod oracle;
pub mod solver;
pub mod spectral;
