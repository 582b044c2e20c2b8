//! Periodic test signals with a spectral gap, and the ideal oracles.
//!
//! Run with `cargo run --example gap_signals`.

use stepoly::signals::{
    gen_gap_signal, ideal_filter_oracle, ideal_shift_oracle, verify_gap, PeriodicSignal,
};
use stepoly::Result;

fn main() -> Result<()> {
    let x = gen_gap_signal(128, 0.8, 7, true)?;
    println!(
        "N = {}, norm {:.6}, largest gap bin {:.2e}, real: {}",
        x.len(),
        x.norm(),
        verify_gap(&x, 0.8),
        x.is_real(0.0)
    );

    // indices wrap: x(-1) is x(N - 1)
    println!("x(-1) = {:.6}, x(127) = {:.6}", x.at(-1), x.at(127));

    let ahead = ideal_shift_oracle(&x, 3)?;
    println!("shift oracle: y(0) = {:.6}, x(3) = {:.6}", ahead.at(0), x.at(3));

    let low_cut = ideal_filter_oracle(&x, 1.2)?;
    println!(
        "ideal high-pass at 1.2 keeps {:.1}% of the energy",
        100.0 * (low_cut.norm() / x.norm()).powi(2)
    );

    let impulse = PeriodicSignal::impulse(16)?;
    println!("an impulse has no gap: largest bin in |ω| < 0.8 is {:.3}", verify_gap(&impulse, 0.8));
    Ok(())
}
