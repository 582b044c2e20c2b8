//! Transfer-function algebra in the unit-step basis.
//!
//! Every causal transfer function in this crate is a polynomial in
//!
//! ```text
//! u(ω) = 1 / (1 - e^{-iω})
//! ```
//!
//! the Z-transform of the discrete unit step restricted to the unit circle.
//! Coefficients are real and stored in this basis only; the z-form is never
//! materialized. Because `1 - u = conj(u)` on the unit circle, `Re u = 1/2`
//! for every `ω ≠ 0` and `|u| = 1 / (2 sin(|ω|/2))`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Angles closer than this to a multiple of 2π are treated as the pole of `u`.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Reduces an angle to the interval (-π, π].
pub fn wrap_angle(omega: f64) -> f64 {
    // in-range angles pass through untouched; reducing them would round small
    // negative angles to the spacing of floats near 2π
    if omega > -PI && omega <= PI {
        return omega;
    }
    let r = omega.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// The unit-step basis `u(ω) = 1/(1 - e^{-iω})`.
///
/// Evaluated through the half-angle form `1/2 - (i/2) cot(ω/2)`, which keeps
/// the real part exact and stays accurate close to the pole.
pub fn u_of_omega(omega: f64) -> Result<Complex64> {
    let w = wrap_angle(omega);
    if w.abs() < POLE_TOLERANCE {
        return Err(Error::Pole { omega });
    }
    let half = 0.5 * w;
    Ok(Complex64::new(0.5, -0.5 * half.cos() / half.sin()))
}

/// `|u(ω)| = 1/(2 sin(|ω|/2))`, the largest basis magnitude on `|ω| ≥ ω`.
pub fn u_magnitude(omega: f64) -> Result<f64> {
    let w = wrap_angle(omega);
    if w.abs() < POLE_TOLERANCE {
        return Err(Error::Pole { omega });
    }
    Ok(0.5 / (0.5 * w.abs()).sin())
}

/// A transfer function `ψ(z) = Σ a_k u^k` with real coefficients `a_0..a_d`.
///
/// The degree is declared by the coefficient count and is never trimmed, so a
/// zero leading coefficient is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferPoly {
    coeffs: Vec<f64>,
}

impl TransferPoly {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("coeffs", "a transfer polynomial needs at least a_0"));
        }
        if let Some(k) = coeffs.iter().position(|a| !a.is_finite()) {
            return Err(invalid("coeffs", format!("coefficient a_{k} is not finite")));
        }
        Ok(Self { coeffs })
    }

    /// The constant polynomial `ψ ≡ gain`.
    pub fn constant(gain: f64) -> Self {
        Self {
            coeffs: vec![gain],
        }
    }

    /// The degree-`d` polynomial with all coefficients zero.
    pub fn zero(degree: usize) -> Self {
        Self {
            coeffs: vec![0.0; degree + 1],
        }
    }

    /// `u^k` as a polynomial.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Horner evaluation at an arbitrary basis value `u`.
    pub fn eval_at_u(&self, u: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * u + a)
    }

    /// `ψ(e^{iω})`. A degree-0 polynomial is defined everywhere, including the pole.
    pub fn eval(&self, omega: f64) -> Result<Complex64> {
        if self.degree() == 0 {
            return Ok(Complex64::new(self.coeffs[0], 0.0));
        }
        Ok(self.eval_at_u(u_of_omega(omega)?))
    }

    /// Same polynomial, zero-padded to `degree`. Fails if that would drop terms.
    pub fn padded(&self, degree: usize) -> Result<Self> {
        if degree < self.degree() {
            return Err(Error::DimensionMismatch {
                expected: degree,
                got: self.degree(),
            });
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(degree + 1, 0.0);
        Ok(Self { coeffs })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|a| a * factor).collect(),
        }
    }

    /// Coefficient-wise sum; the result has the larger of the two degrees.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + other.coeffs.get(k).unwrap_or(&0.0))
            .collect();
        Self { coeffs }
    }
}

/// Product of two transfer polynomials (coefficient convolution).
pub fn poly_multiply(p: &TransferPoly, q: &TransferPoly) -> TransferPoly {
    let mut coeffs = vec![0.0; p.degree() + q.degree() + 1];
    for (i, a) in p.coeffs.iter().enumerate() {
        for (j, b) in q.coeffs.iter().enumerate() {
            coeffs[i + j] += a * b;
        }
    }
    TransferPoly { coeffs }
}

/// Coefficients of `(1 - u)^k`, i.e. of `(1/(1 - z))^k` in the u-basis.
pub fn expand_one_minus_u_power(k: usize) -> TransferPoly {
    let mut coeffs = Vec::with_capacity(k + 1);
    let mut binom = 1.0_f64;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        coeffs.push(sign * binom);
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    TransferPoly { coeffs }
}

/// An arc of the unit circle on which a signal's spectrum vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectrumGap {
    pub half_width: f64,
    pub center: f64,
}

impl SpectrumGap {
    /// Gap `(-half_width, half_width)` around zero frequency.
    pub fn around_zero(half_width: f64) -> Result<Self> {
        Self::centered(half_width, 0.0)
    }

    pub fn centered(half_width: f64, center: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width < PI) {
            return Err(invalid("gap", format!("half-width {half_width} not in (0, π)")));
        }
        if !center.is_finite() {
            return Err(invalid("center", "gap center must be finite"));
        }
        Ok(Self {
            half_width,
            center: wrap_angle(center),
        })
    }

    /// Whether `omega` falls strictly inside the open gap.
    pub fn contains(&self, omega: f64) -> bool {
        wrap_angle(omega - self.center).abs() < self.half_width - 1e-12
    }
}

/// Quadrature nodes on `I = [-π, -Ω̄] ∪ [Ω̄, π]`, symmetric under `ω ↦ -ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    half_width: f64,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl FrequencyGrid {
    /// Builds a grid from explicit nodes. Points must avoid the open gap and
    /// weights must be positive; symmetry is the caller's responsibility.
    pub fn new(half_width: f64, points: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: weights.len(),
            });
        }
        if let Some(w) = points.iter().find(|w| w.abs() < half_width - 1e-12) {
            return Err(invalid("points", format!("ω = {w} lies inside the gap")));
        }
        if weights.iter().any(|w| w.is_nan() || *w <= 0.0) {
            return Err(invalid("weights", "quadrature weights must be positive"));
        }
        Ok(Self {
            half_width,
            points,
            weights,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn direct_u(omega: f64) -> Complex64 {
        1.0 / (1.0 - Complex64::from_polar(1.0, -omega))
    }

    #[test]
    fn wrap_angle_keeps_in_range_angles() {
        for w in [-3e-4, -1e-9, 2.5, -PI + 1e-15, PI] {
            assert_eq!(wrap_angle(w), w);
        }
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn u_at_pi_and_half_pi() {
        let u = u_of_omega(PI).unwrap();
        assert_abs_diff_eq!(u.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(u.im, 0.0, epsilon = 1e-15);
        let u = u_of_omega(PI / 2.0).unwrap();
        assert_abs_diff_eq!(u.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(u.im, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn pole_is_an_error() {
        assert!(matches!(u_of_omega(0.0), Err(Error::Pole { .. })));
        assert!(matches!(u_of_omega(TAU), Err(Error::Pole { .. })));
        assert!(matches!(u_of_omega(-2.0 * TAU), Err(Error::Pole { .. })));
        let p = TransferPoly::new(vec![1.0, 1.0]).unwrap();
        assert!(p.eval(0.0).is_err());
        // degree zero has no pole
        assert_eq!(TransferPoly::constant(2.0).eval(0.0).unwrap(), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn closed_form_matches_direct_division() {
        for i in 1..2000 {
            let w = -PI + TAU * i as f64 / 2000.0;
            if w.abs() < 1e-3 {
                continue;
            }
            let a = u_of_omega(w).unwrap();
            let b = direct_u(w);
            assert!((a - b).norm() <= 1e-12 * b.norm().max(1.0), "ω = {w}");
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(TransferPoly::constant(1.0).eval(0.3).unwrap(), Complex64::new(1.0, 0.0));
        let p = TransferPoly::new(vec![0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(p.eval(PI).unwrap().re, 0.5, epsilon = 1e-15);
        let p = TransferPoly::new(vec![0.0, 0.0, 1.0]).unwrap();
        let v = p.eval(PI).unwrap();
        assert_abs_diff_eq!(v.re, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn multiply_examples() {
        let x = TransferPoly::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(poly_multiply(&x, &x).coeffs(), &[0.0, 0.0, 1.0]);
        let a = TransferPoly::new(vec![1.0, 1.0]).unwrap();
        let b = TransferPoly::new(vec![1.0, -1.0]).unwrap();
        assert_eq!(poly_multiply(&a, &b).coeffs(), &[1.0, 0.0, -1.0]);
    }

    #[test]
    fn one_minus_u_powers() {
        assert_eq!(expand_one_minus_u_power(0).coeffs(), &[1.0]);
        assert_eq!(expand_one_minus_u_power(1).coeffs(), &[1.0, -1.0]);
        assert_eq!(expand_one_minus_u_power(3).coeffs(), &[1.0, -3.0, 3.0, -1.0]);
        // (1 - u) is the conjugate of u on the circle
        let p = expand_one_minus_u_power(1);
        for w in [0.4, 1.3, -2.2, PI] {
            let u = u_of_omega(w).unwrap();
            assert!((p.eval(w).unwrap() - u.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn degree_is_not_trimmed() {
        let p = TransferPoly::new(vec![1.0, 2.0, 0.0]).unwrap();
        assert_eq!(p.degree(), 2);
        assert!(TransferPoly::new(vec![]).is_err());
        assert!(TransferPoly::new(vec![1.0, f64::NAN]).is_err());
        assert!(p.padded(1).is_err());
        assert_eq!(p.padded(4).unwrap().coeffs(), &[1.0, 2.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn gap_membership() {
        let g = SpectrumGap::around_zero(PI / 2.0).unwrap();
        assert!(g.contains(0.0));
        assert!(g.contains(-1.0));
        assert!(!g.contains(PI / 2.0));
        let low = SpectrumGap::centered(0.5, PI).unwrap();
        assert!(low.contains(-PI + 0.1));
        assert!(low.contains(PI - 0.1));
        assert!(!low.contains(0.0));
        assert!(SpectrumGap::around_zero(0.0).is_err());
        assert!(SpectrumGap::around_zero(PI).is_err());
    }

    fn coeffs(max_degree: usize) -> impl Strategy<Value = TransferPoly> {
        prop::collection::vec(-3.0..3.0f64, 1..=max_degree + 1)
            .prop_map(|c| TransferPoly::new(c).unwrap())
    }

    proptest! {
        #[test]
        fn real_part_is_one_half(w in 1e-3..PI) {
            for omega in [w, -w] {
                let u = u_of_omega(omega).unwrap();
                prop_assert!((u.re - 0.5).abs() <= 1e-12);
                let expected = 1.0 / (2.0 * (omega.abs() / 2.0).sin());
                prop_assert!((u.norm() - expected).abs() <= 1e-12 * expected);
            }
        }

        #[test]
        fn conjugation_symmetry(p in coeffs(6), w in 0.05..PI) {
            let a = p.eval(w).unwrap();
            let b = p.eval(-w).unwrap();
            prop_assert!((a.conj() - b).norm() <= 1e-12 * a.norm().max(1.0));
        }

        #[test]
        fn product_matches_pointwise(p in coeffs(5), q in coeffs(5)) {
            let pq = poly_multiply(&p, &q);
            prop_assert_eq!(pq.degree(), p.degree() + q.degree());
            for j in 0..50 {
                let w = 0.3 + (PI - 0.3) * j as f64 / 49.0;
                let lhs = pq.eval(w).unwrap();
                let rhs = p.eval(w).unwrap() * q.eval(w).unwrap();
                prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
            }
        }
    }
}
