//! The closed-form predictor built from a truncated exponential series.
//!
//! Run with `cargo run --example exponential_predictor`.

use std::f64::consts::FRAC_PI_2;

use stepoly::approx::{
    evaluate_design, exponential_predictor, make_grid, predictor_power, select_nu_and_d, solve_ls,
    ApproximationTarget,
};
use stepoly::Result;

fn main() -> Result<()> {
    let gap = FRAC_PI_2;
    let grid = make_grid(gap, 1024)?;
    for eps in [0.3, 0.1, 0.03] {
        let choice = select_nu_and_d(eps, gap)?;
        let p = exponential_predictor(choice.nu, choice.degree)?;
        let target = ApproximationTarget::predictor(1, gap)?;
        let (l2, sup) = evaluate_design(&p, &target, &grid)?;
        let (_, ls) = solve_ls(&target, choice.degree, &grid)?;
        println!(
            "eps {eps:<5} nu {:>7.3} d {:>3}: sup {sup:.3e}, l2 {l2:.3e}, least squares l2 {:.3e}",
            choice.nu, choice.degree, ls.l2_error
        );
    }

    // a T-step predictor is the T-th power of a one-step one
    let choice = select_nu_and_d(0.1, gap)?;
    let p = exponential_predictor(choice.nu, choice.degree)?;
    let p3 = predictor_power(&p, 3);
    let (_, sup) = evaluate_design(&p3, &ApproximationTarget::predictor(3, gap)?, &grid)?;
    println!("three-step power: degree {}, sup error {sup:.3e}", p3.degree());
    Ok(())
}
