//! Extended-precision numeric services: complex arithmetic on MPFR floats,
//! adaptive contour quadrature, unit-speed path tracing, and cubic root
//! finding. Everything downstream builds on this module.
//!
//! All routines are pure functions of their inputs and a [`PrecisionContext`];
//! given the same context they are bit-reproducible and safe to call
//! concurrently.

mod ctx;
mod cx;
mod ode;
mod quad;
mod roots;

pub use ctx::PrecisionContext;
pub use cx::{fmt_float_sci, Cx};
pub use ode::{hermite_real_axis_crossing, trace_unit_speed, Polyline, StopRule, Trace};
pub use quad::{integrate_polyline, integrate_ray, integrate_segment, integrate_segment_sqrt, SqrtEnd};
pub use roots::{cubic_roots, CubicRoots};
