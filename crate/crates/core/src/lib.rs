//! Realignment-based separability criteria, entanglement-measure lower bounds
//! and multipartite extensions for finite-dimensional quantum states.
//!
//! The central object is the augmented realignment matrix
//!
//! ```text
//!            | mu nu^T          mu Vec(rho_B)^T |
//! Q(rho)  =  |                                  |
//!            | Vec(rho_A) nu^T  R(rho)          |
//! ```
//!
//! whose trace norm is at most `sqrt((|mu|^2 + 1)(|nu|^2 + 1))` for every
//! separable `rho`. See [`criteria::q_margin`].

pub mod criteria;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod multipartite;
pub mod optimizer;
pub mod reproduce;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;
