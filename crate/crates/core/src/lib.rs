//! Causal prediction and high-pass filtering of signals whose spectrum
//! vanishes on an arc of the unit circle.
//!
//! Transfer functions are real polynomials in `u(ω) = 1/(1 - e^{-iω})`, the
//! transfer function of the running sum. Such a polynomial is realized in
//! the time domain as a cascade of cumulative sums ([`apply`]) whose state
//! before the observation window is estimated from data ([`fit`]).
//! Coefficients come from a least-squares design on the region outside the
//! gap or from a closed-form exponential construction ([`approx`]).

pub mod apply;
pub mod approx;
pub mod cli;
pub mod error;
pub mod fit;
pub mod io;
pub mod lstsq;
pub mod signals;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{SpectrumGap, TransferPoly};
