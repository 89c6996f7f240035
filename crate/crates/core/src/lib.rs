//! Exponential convergence-rate certificates for perturbed M/M/1 queues.
//!
//! An M/M/1 queue that starts in the equilibrium of one parameter setting
//! `(lambda0, mu0)` and then operates under another `(lambda, mu)` relaxes to
//! the new equilibrium exponentially fast in total variation:
//!
//! ```text
//! || L(X_t) - pi(lambda, mu) ||_TV  <=  C * exp(-alpha * b * t)
//! ```
//!
//! This crate computes certified `(alpha, C)` pairs from closed-form moment
//! generating functions of hitting times to the empty state, and verifies
//! every analytic formula against an event-driven Monte Carlo simulator.
//!
//! Module map:
//!
//! - [`model`] — parameter validation, geometric stationary laws, exact TV
//!   between two equilibria, inverse-CDF stationary sampling.
//! - [`mgf`] — closed-form MGFs of hitting times to zero and their exact
//!   domain logic.
//! - [`bounds`] — certificate construction: the two rate cases, the
//!   truncation bound, general-perturbation time rescaling, and the
//!   exponential drift (Lyapunov) rate.
//! - [`sim`] — seeded, reproducible Monte Carlo: path simulation, hitting
//!   times, empirical MGFs, plug-in TV estimation, ordered coupling.
//! - [`cli`] — the `mixbound` command-line front end (CSV/JSON output).

pub mod bounds;
pub mod cli;
pub mod error;
pub mod mgf;
pub mod model;
pub mod sim;

pub use bounds::{BoundCertificate, BoundCurve, CaseLabel};
pub use error::Error;
pub use mgf::MgfDomain;
pub use model::{PerturbationSpec, QueueParams};
pub use sim::{CoupledTriple, EstimateWithError, InitialCondition, TrajectoryPath, WorkloadPath};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
