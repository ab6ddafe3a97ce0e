//! Radial solutions of the sigma_k Yamabe equation `sigma_k(A_g) = const`
//! for conformal metrics `v^{-2}(|x|) |dx|^2` on annular domains.
//!
//! Everything happens in log coordinates `t = ln r`, `xi = ln(v/r)`, where
//! the equation reduces to an autonomous second-order ODE in `xi(t)` with the
//! first integral `h = e^{(2k-n)xi} (1 - xi_t^2)^k - s e^{-n xi}` (sign `s` of
//! the normalized constant). The crate provides:
//!
//! - [`params`] — dimension/order bookkeeping and binomial constants
//! - [`schouten`] — pointwise curvature algebra and the log variable change
//! - [`first_integral`] — the conserved quantity, the profile `D(xi)`,
//!   critical thresholds, and turning/null points
//! - [`classifier`] — the exhaustive case analysis of solution behavior
//! - [`ode`] — adaptive integration of the reduced dynamics with event
//!   detection at `xi_t^2 = 1`
//! - [`quadrature`] — the independent time-of-flight oracle `t(xi)` and
//!   periods of closed orbits
//! - [`closed_forms`] — exact reference solutions (sphere, cylinder,
//!   hyperbolic, and the three flat families)
//! - [`verify`] — numerical verification suites used by the CLI and the
//!   acceptance tests

pub mod classifier;
pub mod closed_forms;
pub mod error;
pub mod first_integral;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod schouten;
mod util;
pub mod verify;

pub use error::{Error, Result};
pub use params::{MetricParams, SigmaSign};
pub use schouten::{Branch, ConeClass, EigenPair, LogState, RadialJet};
