//! Causal application of a transfer polynomial as a cascade of running sums.
//!
//! `u^k` is the transfer function of the k-fold cumulative sum
//! `h_k(x)(t) = Σ_{s ≤ t} h_{k-1}(x)(s)`, so `ψ = Σ a_k u^k` acts on a signal as
//! `a_0 x(t) + Σ a_k h_k(x)(t)`. Only the values `η_k = h_k(x)(t₁ - 1)` are
//! needed to summarize the infinite past before `t₁`.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::signals::PeriodicSignal;
use crate::spectral::TransferPoly;

/// Running-sum accumulators `s_1..s_d` and the next time to be consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeState {
    s: Vec<Complex64>,
    next_time: i64,
}

/// State positioned to consume `x(t₁)`, with `s_k = η_k`.
pub fn init_state(eta: Vec<Complex64>, t1: i64) -> Result<CascadeState> {
    if eta.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(invalid("eta", "initial state must be finite"));
    }
    Ok(CascadeState { s: eta, next_time: t1 })
}

/// One accumulation. Every sum in the cascade goes through here so that a
/// compensated scheme can be substituted in one place.
#[inline]
fn accumulate(acc: &mut Complex64, value: Complex64) {
    *acc += value;
}

impl CascadeState {
    pub fn zero(order: usize, t1: i64) -> Self {
        Self {
            s: vec![Complex64::new(0.0, 0.0); order],
            next_time: t1,
        }
    }

    pub fn order(&self) -> usize {
        self.s.len()
    }

    /// Current accumulator values; `s_k` is at index `k - 1`.
    pub fn accumulators(&self) -> &[Complex64] {
        &self.s
    }

    /// Time index of the next sample to be consumed.
    pub fn next_time(&self) -> i64 {
        self.next_time
    }

    /// Consumes `x(t)` without forming an output.
    ///
    /// Updates go in ascending order and each uses the already updated lower
    /// accumulator, so `s_k` includes the current sample.
    pub fn push(&mut self, x: Complex64) {
        let mut lower = x;
        for acc in self.s.iter_mut() {
            accumulate(acc, lower);
            lower = *acc;
        }
        self.next_time += 1;
    }

    /// Consumes `x(t)` and returns `a_0 x(t) + Σ a_k s_k`.
    pub fn step(&mut self, x: Complex64, p: &TransferPoly) -> Result<Complex64> {
        if p.degree() != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                got: p.degree(),
            });
        }
        self.push(x);
        Ok(self.output(x, p))
    }

    fn output(&self, x: Complex64, p: &TransferPoly) -> Complex64 {
        let a = p.coeffs();
        let mut y = x * a[0];
        for (ak, sk) in a[1..].iter().zip(&self.s) {
            accumulate(&mut y, sk * *ak);
        }
        y
    }
}

/// Outputs for the samples `x(t₁), x(t₁+1), ...`, starting from state `η`.
pub fn run_causal(
    x: &[Complex64],
    p: &TransferPoly,
    eta: &[Complex64],
    t1: i64,
) -> Result<Vec<Complex64>> {
    let mut state = init_state(eta.to_vec(), t1)?;
    if p.degree() != state.order() {
        return Err(Error::DimensionMismatch {
            expected: state.order(),
            got: p.degree(),
        });
    }
    x.iter().map(|&v| state.step(v, p)).collect()
}

/// Outputs over `t ∈ [-M, t_end]` of the cascade started from a zero state at
/// `-M`, i.e. as if the periodic input were switched on at `-M`.
///
/// The partial sums of a zero-mean periodic input stay bounded but do not
/// settle, so this does not converge to the steady-state output as `M` grows.
pub fn run_truncated(
    x: &PeriodicSignal,
    p: &TransferPoly,
    m: i64,
    t_end: i64,
) -> Result<Vec<Complex64>> {
    if m < 0 {
        return Err(invalid("M", format!("truncation depth must be non-negative, got {m}")));
    }
    let samples = x.window(-m, t_end);
    run_causal(&samples, p, &vec![Complex64::new(0.0, 0.0); p.degree()], -m)
}
