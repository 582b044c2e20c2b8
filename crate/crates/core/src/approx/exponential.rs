//! Closed-form one-step predictor from a truncated exponential.
//!
//! With `z = e^{iω}` the function `z(1 - exp(ν/(1 - z)))`, `ν < 0`, is close to
//! `z` away from `z = 1`, and `|z(1 - exp(ν/(1-z))) - z| = e^{ν/2}` exactly
//! because `Re(1/(1 - z)) = 1/2`. Expanding the exponential and using
//!
//! ```text
//! z/(1 - z) = -u,    1/(1 - z) = 1 - u
//! ```
//!
//! turns each series term into `(ν^k/k!) u (1-u)^{k-1}`, which is a polynomial
//! in the unit-step basis.

use serde::Serialize;

use crate::error::{invalid, Result};
use num_complex::Complex64;

use crate::spectral::{expand_one_minus_u_power, poly_multiply, u_of_omega, TransferPoly};

/// The untruncated response `z(1 - exp(ν/(1 - z)))` at `z = e^{iω}`, written
/// as `z - z·exp(ν(1 - u))`.
pub fn exponential_response(nu: f64, omega: f64) -> Result<Complex64> {
    let u = u_of_omega(omega)?;
    let z = Complex64::from_polar(1.0, omega);
    Ok(z - z * (nu * (1.0 - u)).exp())
}

/// Degree-`d` truncation `Σ_{k=1}^{d} (ν^k/k!) u (1-u)^{k-1}` approximating `e^{iω}`.
pub fn exponential_predictor(nu: f64, degree: usize) -> Result<TransferPoly> {
    if !nu.is_finite() || nu >= 0.0 {
        return Err(invalid("nu", format!("ν must be negative and finite, got {nu}")));
    }
    if degree == 0 {
        return Err(invalid("degree", "the exponential predictor needs d ≥ 1"));
    }
    let mut acc = TransferPoly::zero(degree);
    let mut weight = 1.0;
    for k in 1..=degree {
        weight *= nu / k as f64;
        let term = poly_multiply(&TransferPoly::monomial(1), &expand_one_minus_u_power(k - 1));
        acc = acc.add(&term.scaled(weight));
    }
    Ok(acc)
}

/// Parameters chosen for an error budget `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NuAndDegree {
    pub nu: f64,
    pub degree: usize,
    /// Upper bound of `|ν/(1 - e^{iω})|` on `|ω| ≥ Ω̄`.
    pub radius: f64,
    /// Bound on the series truncation error at the chosen degree.
    pub tail_bound: f64,
}

/// Splits `ε` into two halves: `ν = 2 ln(ε/2)` makes the exponential term
/// contribute exactly `ε/2`, and `d` is the smallest degree whose series tail
/// `e^r r^{d+1}/(d+1)!` is at most `ε/2` on `|ω| ≥ Ω̄`.
pub fn select_nu_and_d(eps: f64, half_width: f64) -> Result<NuAndDegree> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("error budget {eps} not in (0, 1)")));
    }
    super::check_half_width("gap", half_width)?;
    let nu = 2.0 * (eps / 2.0).ln();
    let radius = nu.abs() / (2.0 * (half_width / 2.0).sin());
    let budget = eps / 2.0;

    // term_n = e^r r^n / n!
    let mut term = radius.exp();
    let mut n = 0usize;
    loop {
        n += 1;
        term *= radius / n as f64;
        if n >= 2 && term <= budget {
            break;
        }
    }
    Ok(NuAndDegree {
        nu,
        degree: n - 1,
        radius,
        tail_bound: term,
    })
}

/// `p^T`, the T-step predictor built from a one-step predictor.
pub fn predictor_power(p: &TransferPoly, horizon: u32) -> TransferPoly {
    let mut acc = TransferPoly::constant(1.0);
    for _ in 0..horizon {
        acc = poly_multiply(&acc, p);
    }
    acc
}
