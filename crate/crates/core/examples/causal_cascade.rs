//! Applying a transfer polynomial causally with a cascade of running sums.
//!
//! Run with `cargo run --example causal_cascade`.

use std::f64::consts::FRAC_PI_2;

use stepoly::apply::{init_state, run_causal};
use stepoly::approx::{make_grid, solve_ls, ApproximationTarget};
use stepoly::signals::{exact_eta, gen_gap_signal, ideal_shift_oracle, transfer_oracle};
use stepoly::Result;

fn main() -> Result<()> {
    let n = 64;
    let d = 5;
    let t1 = 10;
    let target = ApproximationTarget::predictor(1, FRAC_PI_2)?;
    let (p, report) = solve_ls(&target, d, &make_grid(FRAC_PI_2, 1024)?)?;
    let x = gen_gap_signal(n, FRAC_PI_2, 3, true)?;

    // the state at t1 - 1 summarizes the whole past
    let eta = exact_eta(&x, d, t1)?;
    let out = run_causal(&x.window(t1, t1 + n as i64 - 1), &p, &eta, t1)?;
    let oracle = transfer_oracle(&x, &p)?;
    let truth = ideal_shift_oracle(&x, 1)?;
    let mut vs_oracle: f64 = 0.0;
    let mut vs_truth: f64 = 0.0;
    for (i, y) in out.iter().enumerate() {
        let t = t1 + i as i64;
        vs_oracle = vs_oracle.max((y - oracle.at(t)).norm());
        vs_truth = vs_truth.max((y - truth.at(t)).norm());
    }
    println!("d = {d}, sup error on the grid {:.3e}", report.sup_error);
    println!("max |cascade - frequency oracle| = {vs_oracle:.2e}");
    println!("max |cascade - x(t + 1)|         = {vs_truth:.2e}");

    // streaming, one sample at a time
    let mut state = init_state(eta, t1)?;
    let first = state.step(x.at(t1), &p)?;
    println!("first streamed output {first:.6}, next time {}", state.next_time());
    Ok(())
}
