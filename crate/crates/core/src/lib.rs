//! Numerical few-body spectral toolkit.
//!
//! Two-body Birman-Schwinger operators and thresholds live in [`twobody`],
//! the three-body Faddeev block system and the operator bounds in
//! [`faddeev`], the correlated-Gaussian solver in [`variational`], and the
//! threshold scenarios that combine them in [`experiments`].
//!
//! Units: hbar = 1 and Jacobi coordinates scaled so that the free
//! Hamiltonian is `-Laplace_x - Laplace_y`.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod faddeev;
pub mod linalg;
pub mod model;
pub mod quadrature;
pub mod twobody;
pub mod variational;

pub use error::{Error, Result};
