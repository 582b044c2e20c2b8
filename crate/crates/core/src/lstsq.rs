//! Truncated-SVD least squares shared by the coefficient designer and the
//! state fitter.

use nalgebra::{ComplexField, DMatrix, RealField};

/// Singular values below this fraction of the largest are zeroed.
pub const RELATIVE_CUTOFF: f64 = 1e-12;

/// Condition numbers above this are reported as ill-conditioned.
pub const CONDITION_WARNING: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct Solution<T: ComplexField> {
    /// One column per right-hand side.
    pub x: DMatrix<T>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
}

impl<T: ComplexField> Solution<T> {
    /// Ratio of the extreme singular values of the design.
    pub fn condition_number(&self) -> f64 {
        condition_number(&self.singular_values)
    }
}

pub fn condition_number(singular_values: &[f64]) -> f64 {
    let max = singular_values.iter().copied().fold(0.0, f64::max);
    let min = singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        return 0.0;
    }
    max / min
}

/// Least squares with column equilibration: each column of `a` is scaled to
/// unit norm before the truncated SVD and the scaling is undone afterwards.
/// The reported singular values are those of the unscaled design.
pub fn solve_equilibrated<T>(mut a: DMatrix<T>, b: &DMatrix<T>) -> Solution<T>
where
    T: ComplexField<RealField = f64>,
    f64: RealField,
{
    let raw_sigma: Vec<f64> = if a.nrows() > 0 && a.ncols() > 0 {
        a.clone().singular_values().iter().copied().collect()
    } else {
        Vec::new()
    };
    let scales: Vec<f64> = a
        .column_iter()
        .map(|c| {
            let n = c.norm();
            if n > 0.0 {
                1.0 / n
            } else {
                1.0
            }
        })
        .collect();
    for (j, &s) in scales.iter().enumerate() {
        a.column_mut(j).scale_mut(s);
    }
    let mut sol = solve(a, b);
    for (j, &s) in scales.iter().enumerate() {
        sol.x.row_mut(j).scale_mut(s);
    }
    sol.singular_values = raw_sigma;
    sol
}

/// Minimum-norm least-squares solution of `a x ≈ b`.
pub fn solve<T>(a: DMatrix<T>, b: &DMatrix<T>) -> Solution<T>
where
    T: ComplexField<RealField = f64>,
    f64: RealField,
{
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Solution {
            x: DMatrix::zeros(cols, b.ncols()),
            singular_values: Vec::new(),
            rank: 0,
        };
    }
    let svd = a.svd(true, true);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    let largest = sigma.iter().copied().fold(0.0, f64::max);
    let threshold = largest * RELATIVE_CUTOFF;

    // x = V Σ⁺ Uᴴ b
    let mut projected = u.adjoint() * b;
    let mut rank = 0;
    for (i, &s) in sigma.iter().enumerate() {
        let scale = if s > threshold && s > 0.0 {
            rank += 1;
            1.0 / s
        } else {
            0.0
        };
        projected.row_mut(i).scale_mut(scale);
    }
    let x = v_t.adjoint() * projected;
    Solution {
        x,
        singular_values: sigma,
        rank,
    }
}
