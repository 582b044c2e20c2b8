//! One state shared between a predictor and a high-pass filter.
//!
//! Run with `cargo run --example shared_eta_filter`.

use stepoly::approx::{make_grid, solve_ls, ApproximationTarget};
use stepoly::fit::{build_rows, filter_rows, state_sensitivity, FitResult, ObservedWindow};
use stepoly::signals::{exact_eta, gen_gap_signal, ideal_filter_oracle};
use stepoly::Result;

fn main() -> Result<()> {
    let (n, d, gap, cutoff) = (64, 8, 0.6, 1.0);
    let grid = make_grid(gap, 1024)?;
    let (p_filt, report) = solve_ls(&ApproximationTarget::high_pass(cutoff, gap)?, d, &grid)?;
    let x = gen_gap_signal(n, gap, 2, true)?;

    let t1 = 0;
    let window = ObservedWindow::from_signal(&x, t1, t1 + n as i64 - 1)?;
    let rows = build_rows(&window, d);
    let fit = FitResult::from_eta(exact_eta(&x, d, t1)?);
    let out = filter_rows(&rows, &p_filt, &fit)?;

    let ideal = ideal_filter_oracle(&x, cutoff)?;
    let err = out
        .iter()
        .enumerate()
        .map(|(i, y)| (y - ideal.at(t1 + i as i64)).norm())
        .fold(0.0, f64::max);
    println!("sup design error {:.3e}", report.sup_error);
    println!("max |filtered - ideal| over one period {err:.3e}");
    println!("state sensitivity {:.3e}", state_sensitivity(&rows, &p_filt)?);
    Ok(())
}
