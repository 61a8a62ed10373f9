//! Solvers, rate certificates and benchmark instances for strongly convex
//! minimization under linear equality constraints `min f(x) s.t. Ex = q`.
//!
//! The crate is organized around five pieces:
//! - [`numkit`]: self-contained dense vector/matrix kernels, a one-sided
//!   Jacobi SVD, power iteration and quadratic roots;
//! - [`problems`]: logistic / smooth-l1 / quadratic objectives and seeded
//!   instance generation with a prescribed constraint spectrum;
//! - [`solvers`]: the interpolated-gradient method plus GDA and PAPC
//!   baselines, with per-iteration matvec accounting;
//! - [`certificate`]: closed-form worst-case rates and the grid checks of
//!   the frequency-domain design conditions behind them;
//! - [`oracle`]: high-accuracy reference solutions and rate fitting.

pub mod certificate;
pub mod error;
pub mod numkit;
pub mod oracle;
pub mod problems;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
