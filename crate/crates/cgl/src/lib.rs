//! Numerical laboratory for the complex Ginzburg-Landau equation
//!
//! ```text
//! u_t = e^{i theta} (Lap u + |u|^alpha u) + gamma u
//! ```
//!
//! on a periodic box standing in for R^N. The crate simulates solutions
//! pseudo-spectrally with an exponential integrator and adaptive steps
//! ([`solver`]), evaluates the mass/energy/variational functionals
//! ([`functionals`]), decides the closed-form blowup and global-existence
//! conditions on concrete data ([`criteria`]), classifies the associated
//! spatially homogeneous equation exactly ([`ode`]), and corroborates the
//! differential identities and convexity inequalities along computed
//! trajectories ([`monitors`]).

pub mod criteria;
pub mod domain;
pub mod functionals;
pub mod monitors;
pub mod ode;
pub mod solver;
mod spectral;

pub use domain::{DiagnosticsRecord, Field, Grid, Params, TimeSeries};
