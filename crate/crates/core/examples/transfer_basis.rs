//! The basis function u(ω) = 1/(1 - e^{-iω}) and polynomials in it.
//!
//! Run with `cargo run --example transfer_basis`.

use std::f64::consts::PI;

use stepoly::spectral::{expand_one_minus_u_power, u_magnitude, u_of_omega, TransferPoly};
use stepoly::Result;

fn main() -> Result<()> {
    println!("{:>8} {:>10} {:>12} {:>10}", "omega", "Re u", "Im u", "|u|");
    for k in [1, 2, 4, 8, 16] {
        let omega = PI / k as f64;
        let u = u_of_omega(omega)?;
        println!("{omega:>8.4} {:>10.6} {:>12.6} {:>10.6}", u.re, u.im, u_magnitude(omega)?);
    }

    // 1 - u = -e^{-iω} u, so (1 - u)^k has modulus |u|^k
    let p = expand_one_minus_u_power(3);
    println!("(1 - u)^3 coefficients: {:?}", p.coeffs());
    let omega = 2.0;
    println!(
        "|(1 - u)^3| = {:.12}, |u|^3 = {:.12}",
        p.eval(omega)?.norm(),
        u_magnitude(omega)?.powi(3)
    );

    let q = TransferPoly::new(vec![0.5, -1.0, 0.25])?;
    println!("q(π/3) = {:.6}", q.eval(PI / 3.0)?);
    Ok(())
}
