//! Numerical laboratory for the complex cubic log-gas model
//!
//! The model is the ensemble with cubic potential `V(z;t) = -z^3/3 + t*z` on an
//! unbounded contour running from `e^{i pi} inf` to `e^{i pi/3} inf`, with a
//! complex coupling `t`. This crate computes, in extended precision:
//!
//! * the spectral branch `x(t)` of `x^3 - t x - 1 = 0` and the phase diagram of
//!   the one-cut region ([`spectral`]),
//! * trajectories of the quadratic differential `-Q(z;t) dz^2`, its critical
//!   graph and the S-contour carrying the equilibrium measure ([`quaddiff`]),
//! * the equilibrium measure, g-function, Szego function and the genus-zero
//!   free energy ([`eqmeasure`]),
//! * exact finite-N moments, recurrence coefficients, partition functions and
//!   their structural identities (string equations, Toda) ([`finiten`]),
//! * quantitative checks of the asymptotic theorems: decay-rate fits for the
//!   recurrence coefficients, strong polynomial asymptotics and the free-energy
//!   expansion ([`asymcheck`]).
//!
//! All numerics run on MPFR floats via [`mpnum`], with reproducible results for
//! a fixed [`mpnum::PrecisionContext`].

pub mod asymcheck;
pub mod eqmeasure;
mod error;
pub mod finiten;
pub mod mpnum;
pub mod quaddiff;
pub mod spectral;

pub use error::{Error, Result};
