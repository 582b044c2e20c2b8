//! Least-squares design of a one-step predictor and a high-pass filter.
//!
//! Run with `cargo run --example ls_design`.

use std::f64::consts::FRAC_PI_2;

use stepoly::approx::{make_grid, solve_ls, ApproximationTarget};
use stepoly::Result;

fn main() -> Result<()> {
    let predictor = ApproximationTarget::predictor(1, FRAC_PI_2)?;
    let grid = make_grid(FRAC_PI_2, 1024)?;
    println!("one-step predictor, gap π/2");
    println!("{:>3} {:>12} {:>12} {:>12}", "d", "l2", "sup", "cond");
    for d in (0..=20).step_by(4) {
        let (_, report) = solve_ls(&predictor, d, &grid)?;
        println!(
            "{d:>3} {:>12.3e} {:>12.3e} {:>12.3e}",
            report.l2_error, report.sup_error, report.condition_number
        );
    }

    let high_pass = ApproximationTarget::high_pass(1.0, 0.6)?;
    let grid = make_grid(0.6, 1024)?;
    let (p, report) = solve_ls(&high_pass, 8, &grid)?;
    println!("high-pass cutoff 1.0, gap 0.6, d = 8: sup error {:.3e}", report.sup_error);
    println!("coefficients: {:?}", p.coeffs());
    Ok(())
}
