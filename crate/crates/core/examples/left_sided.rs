//! Even and odd parts of a real signal and their one-sided conditions.
//!
//! Run with `cargo run --example left_sided`.

use stepoly::signals::{
    bin_frequency, gen_gap_signal, left_sided_residual, make_left_sided, LeftSide,
};
use stepoly::Result;

fn main() -> Result<()> {
    let (n, gap) = (128, 0.9);
    let x = gen_gap_signal(n, gap, 8, true)?;
    for side in [LeftSide::Even, LeftSide::Odd] {
        let part = make_left_sided(side, &x)?;
        let worst = (0..n)
            .map(|j| bin_frequency(j, n))
            .filter(|w| w.abs() < gap)
            .map(|w| left_sided_residual(&part, side, w))
            .fold(0.0, f64::max);
        println!(
            "{side:?} (tau = {}): norm {:.4}, worst residual on gap bins {worst:.2e}",
            side.tau(),
            part.norm()
        );
    }
    Ok(())
}
