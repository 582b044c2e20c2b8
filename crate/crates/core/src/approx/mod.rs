//! Least-squares design of transfer polynomials approximating the ideal
//! targets on `I = [-π, -Ω̄] ∪ [Ω̄, π]`.
//!
//! Two targets are supported: the forward shift `ζ(ω) = e^{iωT}` (a predictor
//! with horizon `T`) and the indicator `ζ(ω) = 1{|ω| ≥ Ω}` (a high-pass filter
//! with cutoff `Ω`). The solver minimizes the trapezoid-weighted squared error
//!
//! ```text
//! Σ_j w_j |ζ(ω_j) - Σ_k a_k u(ω_j)^k|²
//! ```
//!
//! over real `a_k` by stacking real and imaginary parts into one real system
//! and solving it with a truncated SVD. The L2 error is what the prediction and
//! filtering bounds consume; the sup error is reported alongside it.

mod exponential;

pub use exponential::{exponential_predictor, exponential_response, predictor_power, select_nu_and_d, NuAndDegree};

use std::f64::consts::PI;

use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lstsq;
use crate::spectral::{
    expand_one_minus_u_power, poly_multiply, u_of_omega, FrequencyGrid, TransferPoly,
};

/// Default number of grid points per side.
pub const DEFAULT_GRID_POINTS: usize = 1024;

/// The ideal non-causal response to approximate, with the half-width `Ω̄` of
/// the domain `I_Ω̄` on which it is approximated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum ApproximationTarget {
    /// `ζ(ω) = e^{iωT}`. `T = 0` is the identity target.
    Predictor { horizon: u32, gap: f64 },
    /// `ζ(ω) = 1{|ω| ≥ cutoff}` with `gap ≤ cutoff`.
    HighPass { cutoff: f64, gap: f64 },
}

impl ApproximationTarget {
    pub fn predictor(horizon: u32, gap: f64) -> Result<Self> {
        check_half_width("gap", gap)?;
        Ok(Self::Predictor { horizon, gap })
    }

    pub fn high_pass(cutoff: f64, gap: f64) -> Result<Self> {
        check_half_width("gap", gap)?;
        check_half_width("cutoff", cutoff)?;
        if gap > cutoff {
            return Err(invalid(
                "gap",
                format!("signal gap {gap} must not exceed the cutoff {cutoff}"),
            ));
        }
        Ok(Self::HighPass { cutoff, gap })
    }

    /// Half-width of the approximation domain.
    pub fn gap(&self) -> f64 {
        match *self {
            Self::Predictor { gap, .. } | Self::HighPass { gap, .. } => gap,
        }
    }

    /// `ζ(ω)`. The high-pass boundary `|ω| = Ω` belongs to the pass band.
    pub fn value(&self, omega: f64) -> Complex64 {
        match *self {
            Self::Predictor { horizon, .. } => Complex64::from_polar(1.0, omega * horizon as f64),
            Self::HighPass { cutoff, .. } => {
                if omega.abs() >= cutoff {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
        }
    }
}

/// Free-function form of [`ApproximationTarget::value`].
pub fn target_value(target: &ApproximationTarget, omega: f64) -> Complex64 {
    target.value(omega)
}

pub(crate) fn check_half_width(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < PI {
        Ok(())
    } else {
        Err(invalid(name, format!("{value} is not in the open interval (0, π)")))
    }
}

/// Achieved approximation errors of a design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApproxReport {
    /// `sqrt(Σ_j w_j |ζ_j - ψ_j|²)`, the quadrature estimate of the L2 error on `I_Ω̄`.
    pub l2_error: f64,
    /// `max_j |ζ_j - ψ_j|` over the grid.
    pub sup_error: f64,
    /// `σ_max / σ_min` of the weighted design matrix.
    pub condition_number: f64,
}

impl ApproxReport {
    pub fn is_ill_conditioned(&self) -> bool {
        self.condition_number > lstsq::CONDITION_WARNING
    }
}

/// Uniform grid of `m` points per side on `[Ω̄, π]`, mirrored onto `[-π, -Ω̄]`,
/// with trapezoid weights. The weights sum to `2(π - Ω̄)`.
pub fn make_grid(half_width: f64, m: usize) -> Result<FrequencyGrid> {
    check_half_width("gap", half_width)?;
    if m < 2 {
        return Err(invalid("grid", format!("need at least 2 points per side, got {m}")));
    }
    let h = (PI - half_width) / (m - 1) as f64;
    let side: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let w = if i + 1 == m {
                PI
            } else {
                half_width + h * i as f64
            };
            let weight = if i == 0 || i + 1 == m { 0.5 * h } else { h };
            (w, weight)
        })
        .collect();

    let mut points = Vec::with_capacity(2 * m);
    let mut weights = Vec::with_capacity(2 * m);
    for &(w, weight) in side.iter().rev() {
        points.push(-w);
        weights.push(weight);
    }
    for &(w, weight) in &side {
        points.push(w);
        weights.push(weight);
    }
    FrequencyGrid::new(half_width, points, weights)
}

/// Evaluates a design against a target on a grid.
pub fn evaluate_design(
    poly: &TransferPoly,
    target: &ApproximationTarget,
    grid: &FrequencyGrid,
) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut sup: f64 = 0.0;
    for (omega, weight) in grid.iter() {
        let err = (target.value(omega) - poly.eval(omega)?).norm();
        sum += weight * err * err;
        sup = sup.max(err);
    }
    Ok((sum.sqrt(), sup))
}

/// Bound on the floating-point error of the computed L2 error, from the
/// Horner bound `γ_{2d+2} Σ_k |a_k| |u|^k` at each node.
pub fn evaluation_roundoff(poly: &TransferPoly, grid: &FrequencyGrid) -> Result<f64> {
    let gamma = (2 * poly.degree() + 2) as f64 * f64::EPSILON;
    let mut worst: f64 = 0.0;
    for &omega in grid.points() {
        let m = if poly.degree() == 0 { 0.0 } else { u_of_omega(omega)?.norm() };
        let abs_sum = poly.coeffs().iter().rev().fold(0.0, |acc, a| acc * m + a.abs());
        worst = worst.max(gamma * abs_sum);
    }
    Ok(worst * grid.total_weight().sqrt())
}

/// Pointwise `|ζ(ω) - ψ(e^{iω})|` on every grid node, for plotting.
pub fn error_curve(
    poly: &TransferPoly,
    target: &ApproximationTarget,
    grid: &FrequencyGrid,
) -> Result<Vec<(f64, f64)>> {
    grid.points()
        .iter()
        .map(|&omega| Ok((omega, (target.value(omega) - poly.eval(omega)?).norm())))
        .collect()
}

/// Powers `u(ω)^0..u(ω)^d`.
fn u_powers(omega: f64, degree: usize) -> Result<Vec<Complex64>> {
    let u = u_of_omega(omega)?;
    let mut powers = Vec::with_capacity(degree + 1);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..=degree {
        powers.push(acc);
        acc *= u;
    }
    Ok(powers)
}

fn report_conditioning(what: &str, cond: f64) {
    if cond > lstsq::CONDITION_WARNING {
        warn!("{what}: design condition number {cond:.3e} exceeds {:.0e}", lstsq::CONDITION_WARNING);
    }
}

/// Real coefficients `a_0..a_d` minimizing the weighted L2 error to `target`.
///
/// The raw design in powers of `u` is badly conditioned (around `1e15` at
/// `d = 20`), so the system is assembled in the basis `S_k(y)` with
/// `y = (1 - 2u)/cot(Ω̄/2)` and `S_{k+1} = 2y S_k + S_{k-1}`. On the grid
/// `y = i·x` with `x ∈ [-1, 1]` and `S_k(y) = i^k T_k(x)`, so the columns are
/// Chebyshev polynomials that span the same real-coefficient space. The
/// solution is mapped back to the u-basis through the exact recurrence. The
/// reported condition number is that of the u-power design.
pub fn solve_ls(
    target: &ApproximationTarget,
    degree: usize,
    grid: &FrequencyGrid,
) -> Result<(TransferPoly, ApproxReport)> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let c_max = 1.0 / (0.5 * grid.half_width()).tan();
    let n = grid.len();
    let mut a = DMatrix::<f64>::zeros(2 * n, degree + 1);
    let mut raw = DMatrix::<f64>::zeros(2 * n, degree + 1);
    let mut b = DMatrix::<f64>::zeros(2 * n, 1);
    for (j, (omega, weight)) in grid.iter().enumerate() {
        let sw = weight.sqrt();
        let u = u_of_omega(omega)?;
        let y = (1.0 - 2.0 * u) / c_max;
        let mut prev = Complex64::new(1.0, 0.0);
        let mut cur = y;
        let mut power = Complex64::new(1.0, 0.0);
        for k in 0..=degree {
            let s = if k == 0 { prev } else { cur };
            a[(2 * j, k)] = sw * s.re;
            a[(2 * j + 1, k)] = sw * s.im;
            raw[(2 * j, k)] = sw * power.re;
            raw[(2 * j + 1, k)] = sw * power.im;
            power *= u;
            if k > 0 {
                let next = 2.0 * y * cur + prev;
                prev = cur;
                cur = next;
            }
        }
        let z = target.value(omega);
        b[(2 * j, 0)] = sw * z.re;
        b[(2 * j + 1, 0)] = sw * z.im;
    }
    let sol = lstsq::solve(a, &b);
    let cond = lstsq::condition_number(raw.singular_values().as_slice());
    report_conditioning("solve_ls", cond);

    let mut poly = TransferPoly::zero(degree);
    for (k, basis) in chebyshev_u_basis(c_max, degree).iter().enumerate() {
        poly = poly.add(&basis.scaled(sol.x[(k, 0)]));
    }
    let (l2_error, sup_error) = evaluate_design(&poly, target, grid)?;
    Ok((
        poly,
        ApproxReport {
            l2_error,
            sup_error,
            condition_number: cond,
        },
    ))
}

/// `S_0..S_d` as u-basis polynomials, `S_0 = 1`, `S_1 = y`, `S_{k+1} = 2y S_k + S_{k-1}`
/// with `y = (1 - 2u)/c_max`.
fn chebyshev_u_basis(c_max: f64, degree: usize) -> Vec<TransferPoly> {
    let y = TransferPoly::new(vec![1.0 / c_max, -2.0 / c_max]).expect("finite");
    let mut basis = vec![TransferPoly::constant(1.0)];
    if degree >= 1 {
        basis.push(y.clone());
    }
    for k in 1..degree {
        let next = poly_multiply(&y, &basis[k]).scaled(2.0).add(&basis[k - 1]);
        basis.push(next);
    }
    basis
}

/// Least squares over complex coefficients `A_k`. On a symmetric grid with a
/// conjugate-symmetric target the minimizer is real; this is exposed to check
/// that claim against [`solve_ls`].
pub fn solve_ls_complex(
    target: &ApproximationTarget,
    degree: usize,
    grid: &FrequencyGrid,
) -> Result<Vec<Complex64>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let n = grid.len();
    let mut a = DMatrix::<Complex64>::zeros(n, degree + 1);
    let mut b = DMatrix::<Complex64>::zeros(n, 1);
    for (j, (omega, weight)) in grid.iter().enumerate() {
        let sw = weight.sqrt();
        for (k, p) in u_powers(omega, degree)?.into_iter().enumerate() {
            a[(j, k)] = p * sw;
        }
        b[(j, 0)] = target.value(omega) * sw;
    }
    let sol = lstsq::solve_equilibrated(a, &b);
    Ok(sol.x.column(0).iter().copied().collect())
}

/// Converts coefficients `b_k` of the real even basis `q^k`, where
/// `q(ω) = 1/(2 - 2cos ω) = |u|² = u(1 - u)`, into a degree-`2d` u-basis polynomial.
pub fn even_basis_to_poly(b: &[f64]) -> TransferPoly {
    let mut acc = TransferPoly::zero(2 * b.len().saturating_sub(1));
    for (k, &bk) in b.iter().enumerate() {
        let term = poly_multiply(&TransferPoly::monomial(k), &expand_one_minus_u_power(k));
        acc = acc.add(&term.scaled(bk));
    }
    acc
}

/// High-pass design restricted to real even responses `Σ b_k q(ω)^k`.
///
/// Returns the converted polynomial of degree `2d` together with the basis
/// coefficients `b_k`. The condition number in the report is that of the
/// `q`-power design.
pub fn solve_ls_real_even(
    cutoff: f64,
    half_width: f64,
    degree: usize,
    grid: &FrequencyGrid,
) -> Result<(TransferPoly, Vec<f64>, ApproxReport)> {
    let target = ApproximationTarget::high_pass(cutoff, half_width)?;
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let n = grid.len();
    let mut a = DMatrix::<f64>::zeros(n, degree + 1);
    let mut rhs = DMatrix::<f64>::zeros(n, 1);
    for (j, (omega, weight)) in grid.iter().enumerate() {
        let sw = weight.sqrt();
        let q = u_of_omega(omega)?.norm_sqr();
        let mut acc = sw;
        for k in 0..=degree {
            a[(j, k)] = acc;
            acc *= q;
        }
        rhs[(j, 0)] = sw * target.value(omega).re;
    }
    let sol = lstsq::solve_equilibrated(a, &rhs);
    let cond = sol.condition_number();
    report_conditioning("solve_ls_real_even", cond);

    let b: Vec<f64> = sol.x.column(0).iter().copied().collect();
    let poly = even_basis_to_poly(&b);
    let (l2_error, sup_error) = evaluate_design(&poly, &target, grid)?;
    Ok((
        poly,
        b,
        ApproxReport {
            l2_error,
            sup_error,
            condition_number: cond,
        },
    ))
}
