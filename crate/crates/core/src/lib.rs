//! Gaussian-state simulation of spontaneous parametric down-conversion in a
//! ring of evanescently coupled χ⁽²⁾ waveguides.
//!
//! Covariance matrices use quadratures `x = A + A†`, `y = i(A† − A)` ordered
//! `(x₁, y₁, …, x_N, y_N)`, with vacuum equal to the identity.

pub mod cli;
pub mod error;
pub mod fourier;
pub mod gaussian;
pub mod io;
pub mod model;
pub mod propagate;
pub mod witness;

pub use error::{Error, Result};
pub use fourier::{FourierBasis, Shift};
pub use gaussian::{apply_loss, covariance_at, CovarianceMatrix, Route};
pub use model::{ArrayConfig, Basis, PumpProfile};
pub use propagate::{Method, Propagator};
