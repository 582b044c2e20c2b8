//! Fitting the initial state from an observed window, then predicting.
//!
//! Run with `cargo run --example fit_and_predict`.

use std::f64::consts::FRAC_PI_2;

use stepoly::approx::{make_grid, solve_ls, ApproximationTarget};
use stepoly::fit::{default_sample_times, fit_eta, predict_ahead, ObservedWindow};
use stepoly::signals::gen_gap_signal;
use stepoly::Result;

fn main() -> Result<()> {
    let (n, d, horizon) = (256, 6, 1);
    let target = ApproximationTarget::predictor(horizon, FRAC_PI_2)?;
    let (p, report) = solve_ls(&target, d, &make_grid(FRAC_PI_2, 1024)?)?;
    let x = gen_gap_signal(n, FRAC_PI_2, 5, true)?;

    let start = 40;
    let window = ObservedWindow::from_signal(&x, start, start + 3 * d as i64)?;
    for count in [d, 2 * d] {
        let times = default_sample_times(&window, horizon, count)?;
        let fit = fit_eta(&window, &p, horizon, &times)?;
        let estimate = predict_ahead(&window, &p, &fit)?;
        let truth = x.at(window.end() + horizon as i64);
        println!(
            "{count:>2} rows: residual {:.2e}, cond {:.2e}, error {:.2e} (budget {:.2e})",
            fit.residual_norm,
            fit.condition_number,
            (estimate - truth).norm(),
            2.0 * report.sup_error * x.norm()
        );
    }
    Ok(())
}
