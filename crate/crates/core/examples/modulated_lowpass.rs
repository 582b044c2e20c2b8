//! A low-frequency signal handled by moving its gap to zero.
//!
//! Run with `cargo run --example modulated_lowpass`.

use std::f64::consts::{FRAC_PI_2, PI};

use stepoly::approx::{make_grid, solve_ls, ApproximationTarget};
use stepoly::fit::{default_sample_times, predict_modulated, ObservedWindow};
use stepoly::signals::{demodulate, gen_gap_signal_at, verify_gap, verify_gap_at};
use stepoly::spectral::SpectrumGap;
use stepoly::Result;

fn main() -> Result<()> {
    let (n, d, horizon) = (256, 6, 1);
    let gap = SpectrumGap::centered(FRAC_PI_2, PI)?;
    let x = gen_gap_signal_at(n, gap, 4, true)?;
    println!("gap around π: {:.2e}, around 0: {:.2e}", verify_gap_at(&x, &gap), verify_gap(&x, FRAC_PI_2));
    let shifted = demodulate(&x, -PI)?;
    println!("after modulation by π the gap sits at 0: {:.2e}", verify_gap(&shifted, FRAC_PI_2));

    let target = ApproximationTarget::predictor(horizon, FRAC_PI_2)?;
    let (p, _) = solve_ls(&target, d, &make_grid(FRAC_PI_2, 1024)?)?;
    let window = ObservedWindow::from_signal(&x, 100, 100 + 3 * d as i64)?;
    let times = default_sample_times(&window, horizon, 2 * d)?;
    let (estimate, fit) = predict_modulated(&window, PI, n, &p, horizon, &times)?;
    let truth = x.at(window.end() + 1);
    println!(
        "predicted {:.6}, actual {:.6}, residual {:.2e}",
        estimate, truth, fit.residual_norm
    );
    Ok(())
}
