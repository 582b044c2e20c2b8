//! Periodic test signals with prescribed spectrum gaps, and exact
//! frequency-domain oracles for the operators applied to them.
//!
//! A [`PeriodicSignal`] is one period of an `N`-periodic two-sided sequence.
//! Its DFT uses the forward convention `X_j = Σ_t x(t) e^{-iω_j t}` with the
//! `1/N` factor on the inverse, and bin `j` sits at `ω_j = 2πj/N` folded into
//! `(-π, π]`. On such windows every operator used by the predictors (shift,
//! ideal high-pass, the cumulative-sum cascade, any transfer polynomial) is
//! diagonal, so its exact output is available per bin.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::spectral::{u_of_omega, SpectrumGap, TransferPoly};

/// Relative size below which a DC bin is treated as zero.
pub const DC_TOLERANCE: f64 = 1e-10;

/// One period of an `N`-periodic signal, optionally tagged with the gap its
/// spectrum is known to vanish on.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSignal {
    samples: Vec<Complex64>,
    gap: Option<SpectrumGap>,
}

impl PeriodicSignal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("samples", "a periodic signal needs at least one sample"));
        }
        Ok(Self { samples, gap: None })
    }

    pub fn from_real(samples: &[f64]) -> Result<Self> {
        Self::new(samples.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Unit impulse at `t = 0`.
    pub fn impulse(n: usize) -> Result<Self> {
        let mut samples = vec![Complex64::new(0.0, 0.0); n];
        if let Some(first) = samples.first_mut() {
            *first = Complex64::new(1.0, 0.0);
        }
        Self::new(samples)
    }

    /// Inverse DFT of `bins`.
    pub fn from_spectrum(mut bins: Vec<Complex64>) -> Result<Self> {
        if bins.is_empty() {
            return Err(invalid("bins", "empty spectrum"));
        }
        let n = bins.len();
        FftPlanner::new().plan_fft_inverse(n).process(&mut bins);
        let scale = 1.0 / n as f64;
        bins.iter_mut().for_each(|v| *v *= scale);
        Self::new(bins)
    }

    pub fn with_gap(mut self, gap: SpectrumGap) -> Self {
        self.gap = Some(gap);
        self
    }

    pub fn without_gap(mut self) -> Self {
        self.gap = None;
        self
    }

    pub fn gap(&self) -> Option<SpectrumGap> {
        self.gap
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Sample at any integer time, by periodicity.
    pub fn at(&self, t: i64) -> Complex64 {
        self.samples[t.rem_euclid(self.len() as i64) as usize]
    }

    /// Samples `x(start), ..., x(end)` inclusive.
    pub fn window(&self, start: i64, end: i64) -> Vec<Complex64> {
        (start..=end).map(|t| self.at(t)).collect()
    }

    /// ℓ₂ norm over one period.
    pub fn norm(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_imag(&self) -> f64 {
        self.samples.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.max_imag() <= tol
    }

    /// Forward DFT.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut bins = self.samples.clone();
        FftPlanner::new().plan_fft_forward(bins.len()).process(&mut bins);
        bins
    }

    /// Frequencies of every bin, in (-π, π].
    pub fn bin_frequencies(&self) -> Vec<f64> {
        (0..self.len()).map(|j| bin_frequency(j, self.len())).collect()
    }

    fn map_bins(&self, mut f: impl FnMut(usize, f64, Complex64) -> Result<Complex64>) -> Result<Self> {
        let n = self.len();
        let bins = self
            .spectrum()
            .into_iter()
            .enumerate()
            .map(|(j, x)| f(j, bin_frequency(j, n), x))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Self::from_spectrum(bins)?;
        out.gap = self.gap;
        if self.is_real(0.0) {
            out.samples.iter_mut().for_each(|v| v.im = 0.0);
        }
        Ok(out)
    }
}

/// `ω_j = 2πj/N` folded into (-π, π].
pub fn bin_frequency(j: usize, n: usize) -> f64 {
    if 2 * j <= n {
        TAU * j as f64 / n as f64
    } else {
        -TAU * (n - j) as f64 / n as f64
    }
}

/// `e^{2πi r/N}`, exact at multiples of a quarter turn.
fn root_of_unity(r: i64, n: usize) -> Complex64 {
    let n = n as i64;
    let r = r.rem_euclid(n);
    if (4 * r) % n == 0 {
        return match 4 * r / n {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    Complex64::from_polar(1.0, TAU * r as f64 / n as f64)
}

/// Draws a unit-norm signal whose DFT vanishes on `(-Ω̄, Ω̄)`.
pub fn gen_gap_signal(n: usize, half_width: f64, seed: u64, real: bool) -> Result<PeriodicSignal> {
    gen_gap_signal_at(n, SpectrumGap::around_zero(half_width)?, seed, real)
}

/// Draws a unit-norm signal whose DFT vanishes on the arc `gap`.
///
/// Surviving bins get independent standard-normal real and imaginary parts.
/// Real signals need a gap symmetric under `ω ↦ -ω` (center 0 or π).
pub fn gen_gap_signal_at(n: usize, gap: SpectrumGap, seed: u64, real: bool) -> Result<PeriodicSignal> {
    if n < 8 {
        return Err(invalid("N", format!("need at least 8 samples, got {n}")));
    }
    let symmetric = gap.center.abs() < 1e-12 || (gap.center.abs() - PI).abs() < 1e-12;
    if real && !symmetric {
        return Err(invalid(
            "center",
            format!("a real signal needs a gap centered at 0 or π, got {}", gap.center),
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut bins = vec![Complex64::new(0.0, 0.0); n];
    let survives = |j: usize| !gap.contains(bin_frequency(j, n));

    if real {
        for j in 0..=n / 2 {
            if !survives(j) {
                continue;
            }
            let self_conjugate = j == 0 || 2 * j == n;
            if self_conjugate {
                bins[j] = Complex64::new(draw(), 0.0);
            } else {
                let v = Complex64::new(draw(), draw());
                bins[j] = v;
                bins[n - j] = v.conj();
            }
        }
    } else {
        for (j, bin) in bins.iter_mut().enumerate() {
            if survives(j) {
                *bin = Complex64::new(draw(), draw());
            }
        }
    }
    if bins.iter().all(|b| b.norm() == 0.0) {
        return Err(Error::EmptySpectrum {
            n,
            half_width: gap.half_width,
        });
    }

    let mut signal = PeriodicSignal::from_spectrum(bins)?;
    if real {
        signal.samples.iter_mut().for_each(|v| v.im = 0.0);
    }
    let norm = signal.norm();
    signal.samples.iter_mut().for_each(|v| *v /= norm);
    Ok(signal.with_gap(gap))
}

/// Largest gap-bin magnitude relative to the spectrum's ℓ₂ norm, for a gap
/// `(-Ω̄, Ω̄)` around zero.
pub fn verify_gap(x: &PeriodicSignal, half_width: f64) -> f64 {
    match SpectrumGap::around_zero(half_width) {
        Ok(gap) => verify_gap_at(x, &gap),
        Err(_) => 0.0,
    }
}

pub fn verify_gap_at(x: &PeriodicSignal, gap: &SpectrumGap) -> f64 {
    let bins = x.spectrum();
    let total = bins.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
    if total == 0.0 {
        return 0.0;
    }
    let n = x.len();
    bins.iter()
        .enumerate()
        .filter(|(j, _)| gap.contains(bin_frequency(*j, n)))
        .map(|(_, b)| b.norm() / total)
        .fold(0.0, f64::max)
}

/// `x(t + T)`, computed per bin as `e^{iω_j T} X_j`.
pub fn ideal_shift_oracle(x: &PeriodicSignal, horizon: i64) -> Result<PeriodicSignal> {
    let n = x.len();
    x.map_bins(|j, _, v| {
        let r = if 2 * j <= n { j as i64 } else { j as i64 - n as i64 };
        Ok(v * root_of_unity(r * horizon, n))
    })
}

/// Ideal high-pass: keeps bins with `|ω_j| ≥ Ω`, zeroes the rest.
pub fn ideal_filter_oracle(x: &PeriodicSignal, cutoff: f64) -> Result<PeriodicSignal> {
    let mut out = x.map_bins(|_, omega, v| {
        Ok(if omega.abs() >= cutoff - 1e-12 {
            v
        } else {
            Complex64::new(0.0, 0.0)
        })
    })?;
    if cutoff > 0.0 && cutoff < PI {
        out.gap = Some(SpectrumGap::around_zero(cutoff)?);
    }
    Ok(out)
}

/// Per-bin multiplication by a response that has a pole at ω = 0. Bins inside
/// the signal's tagged gap are zeroed; an untagged DC bin must already vanish.
fn apply_response(
    x: &PeriodicSignal,
    response: impl Fn(f64) -> Result<Complex64>,
) -> Result<PeriodicSignal> {
    let gap = x.gap;
    let bins = x.spectrum();
    let total = bins.iter().map(|b| b.norm_sqr()).sum::<f64>().sqrt();
    let dc_in_gap = gap.map(|g| g.contains(0.0)).unwrap_or(false);
    if !dc_in_gap && bins[0].norm() > DC_TOLERANCE * total.max(f64::MIN_POSITIVE) {
        return Err(Error::NonzeroDc {
            magnitude: bins[0].norm(),
        });
    }
    x.map_bins(|j, omega, v| {
        let in_gap = gap.map(|g| g.contains(omega)).unwrap_or(false);
        if j == 0 || in_gap {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Ok(response(omega)? * v)
        }
    })
}

/// `h_k(x)`: per-bin multiplication by `u(ω_j)^k`.
pub fn cascade_oracle(x: &PeriodicSignal, k: u32) -> Result<PeriodicSignal> {
    if k == 0 {
        return Ok(x.clone());
    }
    apply_response(x, |omega| Ok(u_of_omega(omega)?.powu(k)))
}

/// Output of the transfer polynomial `p` on `x`: per-bin `ψ(e^{iω_j}) X_j`.
///
/// This is the steady-state output of the cascade, i.e. the output of
/// [`crate::apply::run_causal`] started from the exact state.
pub fn transfer_oracle(x: &PeriodicSignal, p: &TransferPoly) -> Result<PeriodicSignal> {
    if p.degree() == 0 {
        return x.map_bins(|_, _, v| Ok(v * p.coeffs()[0]));
    }
    apply_response(x, |omega| p.eval(omega))
}

/// `η_k = h_k(x)(t₁ - 1)` for `k = 1..=d`.
pub fn exact_eta(x: &PeriodicSignal, order: usize, t1: i64) -> Result<Vec<Complex64>> {
    (1..=order)
        .map(|k| Ok(cascade_oracle(x, k as u32)?.at(t1 - 1)))
        .collect()
}

/// Which half-timeline construction to use for left-sided degeneracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeftSide {
    /// `τ = 0`: the even part, whose restriction to `t ≤ 0` satisfies the cosine condition.
    Even,
    /// `τ = -1`: the odd part, whose restriction to `t ≤ -1` satisfies the sine condition.
    Odd,
}

impl LeftSide {
    pub fn from_tau(tau: i64) -> Result<Self> {
        match tau {
            0 => Ok(Self::Even),
            -1 => Ok(Self::Odd),
            other => Err(invalid("tau", format!("expected 0 or -1, got {other}"))),
        }
    }

    pub fn tau(self) -> i64 {
        match self {
            Self::Even => 0,
            Self::Odd => -1,
        }
    }
}

/// Even part `(x(t) + x(-t))/2` or odd part `(x(t) - x(-t))/2` of a real
/// gap signal. Both keep the gap.
pub fn make_left_sided(side: LeftSide, base: &PeriodicSignal) -> Result<PeriodicSignal> {
    if !base.is_real(1e-12) {
        return Err(Error::ComplexSignal {
            max_imag: base.max_imag(),
        });
    }
    let n = base.len() as i64;
    let sign = match side {
        LeftSide::Even => 1.0,
        LeftSide::Odd => -1.0,
    };
    let samples = (0..n)
        .map(|t| Complex64::new(0.5 * (base.at(t).re + sign * base.at(-t).re), 0.0))
        .collect();
    Ok(PeriodicSignal {
        samples,
        gap: base.gap,
    })
}

/// Left-hand side of the half-timeline condition at frequency `omega`, summed
/// over one period's past `t ∈ [-⌊N/2⌋, -1]`.
///
/// Even: `x(0) + 2 Σ cos(ωt) x(t)`, with the lag `-N/2` (even `N`) weighted
/// once since it is its own mirror. Odd: `Σ sin(ωt) x(t)`.
pub fn left_sided_residual(x: &PeriodicSignal, side: LeftSide, omega: f64) -> f64 {
    let n = x.len() as i64;
    let half = n / 2;
    let value = |t: i64| x.at(t).re;
    match side {
        LeftSide::Even => {
            let mut sum = value(0);
            for t in -half..=-1 {
                let weight = if n % 2 == 0 && t == -half { 1.0 } else { 2.0 };
                sum += weight * (omega * t as f64).cos() * value(t);
            }
            sum.abs()
        }
        LeftSide::Odd => (-half..=-1)
            .map(|t| (omega * t as f64).sin() * value(t))
            .sum::<f64>()
            .abs(),
    }
}

/// `x(t) e^{-iθt}`. `θ N / 2π` must be an integer so bins map onto bins.
pub fn modulate(x: &PeriodicSignal, theta: f64) -> Result<PeriodicSignal> {
    let r = bin_offset(theta, x.len())?;
    let n = x.len();
    let samples = x
        .samples
        .iter()
        .enumerate()
        .map(|(t, v)| v * root_of_unity(-r * t as i64, n))
        .collect();
    let gap = match x.gap {
        Some(g) => Some(SpectrumGap::centered(g.half_width, g.center - theta)?),
        None => None,
    };
    Ok(PeriodicSignal { samples, gap })
}

/// Inverse of [`modulate`]: `x(t) e^{iθt}`.
pub fn demodulate(x: &PeriodicSignal, theta: f64) -> Result<PeriodicSignal> {
    modulate(x, -theta)
}

/// The integer bin shift `θ N / 2π`, or an error when θ is not bin-aligned.
pub fn bin_offset(theta: f64, n: usize) -> Result<i64> {
    let r = theta * n as f64 / TAU;
    let rounded = r.round();
    if (r - rounded).abs() > 1e-9 {
        return Err(invalid(
            "theta",
            format!("θ = {theta} is not a multiple of 2π/{n}"),
        ));
    }
    Ok(rounded as i64)
}

/// `e^{iθt}` for a bin-aligned θ.
pub fn modulation_factor(theta: f64, t: i64, n: usize) -> Result<Complex64> {
    Ok(root_of_unity(bin_offset(theta, n)? * t, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    /// O(N²) DFT, independent of rustfft.
    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|j| {
                x.iter()
                    .enumerate()
                    .map(|(t, v)| v * Complex64::from_polar(1.0, -TAU * (j * t) as f64 / n as f64))
                    .sum()
            })
            .collect()
    }

    fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn bin_frequencies_fold() {
        assert_eq!(bin_frequency(0, 8), 0.0);
        assert_eq!(bin_frequency(4, 8), PI);
        assert_eq!(bin_frequency(5, 8), -0.75 * PI);
        assert_eq!(bin_frequency(7, 8), -0.25 * PI);
    }

    #[test]
    fn spectrum_matches_naive_dft() {
        let x = gen_gap_signal(24, 0.7, 3, false).unwrap();
        assert!(max_diff(&x.spectrum(), &naive_dft(x.samples())) < 1e-13);
    }

    #[test]
    fn gap_census_at_n8() {
        let x = gen_gap_signal(8, FRAC_PI_2, 11, true).unwrap();
        let bins = x.spectrum();
        for j in [0, 1, 7] {
            assert!(bins[j].norm() < 1e-14, "bin {j}");
        }
        for j in [2, 3, 4, 5, 6] {
            assert!(bins[j].norm() > 0.0, "bin {j}");
        }
        // conjugate pairing
        assert!((bins[2] - bins[6].conj()).norm() < 1e-14);
        assert!((bins[3] - bins[5].conj()).norm() < 1e-14);
        assert!(verify_gap(&x, FRAC_PI_2) <= 1e-12);
    }

    #[test]
    fn generation_is_deterministic_and_normalized() {
        let a = gen_gap_signal(64, 1.0, 42, true).unwrap();
        let b = gen_gap_signal(64, 1.0, 42, true).unwrap();
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-14);
        assert_eq!(a.max_imag(), 0.0);
        let c = gen_gap_signal(64, 1.0, 43, true).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generation_errors() {
        assert!(gen_gap_signal(4, 1.0, 0, true).is_err());
        assert!(gen_gap_signal(64, 0.0, 0, true).is_err());
        let off_axis = SpectrumGap::centered(0.5, 1.0).unwrap();
        assert!(gen_gap_signal_at(64, off_axis, 0, true).is_err());
        assert!(gen_gap_signal_at(64, off_axis, 0, false).is_ok());
        // a gap wider than every bin but DC and Nyquist leaves only ±π at N = 8
        let x = gen_gap_signal(8, 3.0, 0, true).unwrap();
        assert!(x.spectrum()[4].norm() > 0.0);
    }

    #[test]
    fn impulse_has_flat_spectrum() {
        let d = PeriodicSignal::impulse(16).unwrap();
        assert!(verify_gap(&d, FRAC_PI_2) > 0.1);
    }

    #[test]
    fn shift_oracle() {
        let x = gen_gap_signal(32, 0.5, 1, true).unwrap();
        assert!(max_diff(ideal_shift_oracle(&x, 0).unwrap().samples(), x.samples()) < 1e-15);
        assert!(max_diff(ideal_shift_oracle(&x, 32).unwrap().samples(), x.samples()) < 1e-14);
        let y = ideal_shift_oracle(&x, 5).unwrap();
        for t in 0..32 {
            assert!((y.at(t) - x.at(t + 5)).norm() < 1e-14);
        }
        let d = PeriodicSignal::impulse(16).unwrap();
        let s = ideal_shift_oracle(&d, 1).unwrap();
        assert!((s.at(15) - 1.0).norm() < 1e-15);
        assert!(s.samples()[..15].iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn filter_oracle_is_a_projection() {
        let x = gen_gap_signal(64, 0.3, 5, true).unwrap();
        let y = ideal_filter_oracle(&x, 1.0).unwrap();
        let yy = ideal_filter_oracle(&y, 1.0).unwrap();
        assert!(max_diff(y.samples(), yy.samples()) < 1e-15);
        assert!(y.norm() <= x.norm());
        assert!(verify_gap(&y, 1.0) <= 1e-12);
        // cutoff below the first bin only removes DC
        let z = ideal_filter_oracle(&x, 1e-3).unwrap();
        assert!(max_diff(z.samples(), x.samples()) < 1e-14);
    }

    #[test]
    fn cascade_examples() {
        let x = gen_gap_signal(32, 0.5, 2, true).unwrap();
        assert_eq!(cascade_oracle(&x, 0).unwrap(), x);
        // pure tone at π is scaled by u(π) = 1/2
        let tone = PeriodicSignal::from_real(&(0..16).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect::<Vec<_>>()).unwrap();
        let h = cascade_oracle(&tone, 1).unwrap();
        assert!(max_diff(h.samples(), &tone.samples().iter().map(|v| v * 0.5).collect::<Vec<_>>()) < 1e-15);
        // semigroup
        let h2 = cascade_oracle(&x, 2).unwrap();
        let h21 = cascade_oracle(&h2, 1).unwrap();
        let h3 = cascade_oracle(&x, 3).unwrap();
        assert!(max_diff(h21.samples(), h3.samples()) < 1e-13);
    }

    #[test]
    fn cascade_rejects_dc() {
        let ones = PeriodicSignal::from_real(&[1.0; 8]).unwrap();
        assert!(matches!(cascade_oracle(&ones, 1), Err(Error::NonzeroDc { .. })));
        assert!(exact_eta(&ones, 2, 0).is_err());
    }

    #[test]
    fn cascade_is_a_running_sum() {
        // h_1(x)(t) - h_1(x)(t-1) = x(t)
        let x = gen_gap_signal(40, 0.4, 9, true).unwrap();
        let h = cascade_oracle(&x, 1).unwrap();
        for t in 0..40 {
            assert!((h.at(t) - h.at(t - 1) - x.at(t)).norm() < 1e-13);
        }
    }

    #[test]
    fn eta_examples() {
        let zero = PeriodicSignal::from_real(&[0.0; 8]).unwrap();
        assert!(exact_eta(&zero, 3, 4).unwrap().iter().all(|v| v.norm() == 0.0));
        let tone = PeriodicSignal::from_real(&(0..16).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect::<Vec<_>>()).unwrap();
        for t1 in [0i64, 3, 10] {
            let eta = exact_eta(&tone, 1, t1).unwrap();
            let expected = 0.5 * if (t1 - 1).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert!((eta[0] - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn left_sided_parts() {
        let x = gen_gap_signal(64, 0.8, 4, true).unwrap();
        let e = make_left_sided(LeftSide::Even, &x).unwrap();
        let o = make_left_sided(LeftSide::Odd, &x).unwrap();
        assert_eq!(o.at(0).re, 0.0);
        for t in 0..64 {
            assert!((e.at(t) - e.at(-t)).norm() == 0.0);
            assert!((o.at(t) + o.at(-t)).norm() == 0.0);
            assert!((e.at(t) + o.at(t) - x.at(t)).norm() < 1e-15);
        }
        assert!(verify_gap(&e, 0.8) <= 1e-10);
        assert!(verify_gap(&o, 0.8) <= 1e-10);
        assert_eq!(make_left_sided(LeftSide::Even, &e).unwrap(), e);
        let complex = gen_gap_signal(64, 0.8, 4, false).unwrap();
        assert!(make_left_sided(LeftSide::Even, &complex).is_err());
        assert!(LeftSide::from_tau(1).is_err());
    }

    #[test]
    fn left_sided_conditions_hold_on_gap_bins() {
        let x = gen_gap_signal(128, 0.9, 8, true).unwrap();
        for (side, part) in [
            (LeftSide::Even, make_left_sided(LeftSide::Even, &x).unwrap()),
            (LeftSide::Odd, make_left_sided(LeftSide::Odd, &x).unwrap()),
        ] {
            for j in 0..128 {
                let omega = bin_frequency(j, 128);
                if omega.abs() < 0.9 {
                    assert!(left_sided_residual(&part, side, omega) <= 1e-8, "{side:?} j = {j}");
                }
            }
        }
    }

    #[test]
    fn modulation() {
        let x = gen_gap_signal(32, 0.5, 6, true).unwrap();
        assert_eq!(modulate(&x, 0.0).unwrap().samples(), x.samples());
        let m = modulate(&x, PI).unwrap();
        assert_eq!(m.max_imag(), 0.0);
        for t in 0..32 {
            let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(m.at(t).re, sign * x.at(t).re);
        }
        assert!(modulate(&x, 0.1).is_err());
        let back = demodulate(&modulate(&x, PI / 4.0).unwrap(), PI / 4.0).unwrap();
        assert!(max_diff(back.samples(), x.samples()) < 1e-15);
    }

    #[test]
    fn low_frequency_signal_moves_to_high_frequency() {
        let gap = SpectrumGap::centered(1.0, PI).unwrap();
        let low = gen_gap_signal_at(64, gap, 3, true).unwrap();
        assert!(verify_gap_at(&low, &gap) <= 1e-12);
        assert!(verify_gap(&low, 1.0) > 1e-3);
        let high = modulate(&low, PI).unwrap();
        assert!(verify_gap(&high, 1.0) <= 1e-12);
        assert!(high.gap().unwrap().center.abs() < 1e-12);
    }

    #[test]
    fn transfer_oracle_examples() {
        let x = gen_gap_signal(32, 0.5, 2, true).unwrap();
        let id = transfer_oracle(&x, &TransferPoly::constant(1.0)).unwrap();
        assert!(max_diff(id.samples(), x.samples()) < 1e-14);
        let u2 = transfer_oracle(&x, &TransferPoly::monomial(2)).unwrap();
        assert!(max_diff(u2.samples(), cascade_oracle(&x, 2).unwrap().samples()) < 1e-14);
    }

    proptest! {
        #[test]
        fn parseval(seed in 0u64..1000, n in 8usize..80, real: bool) {
            let x = gen_gap_signal(n, 0.4, seed, real);
            prop_assume!(x.is_ok());
            let x = x.unwrap();
            let time: f64 = x.samples().iter().map(|v| v.norm_sqr()).sum();
            let freq: f64 = x.spectrum().iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
            prop_assert!((time - freq).abs() <= 1e-10);
            prop_assert!(verify_gap(&x, 0.4) <= 1e-12);
        }

        #[test]
        fn cascade_commutes_with_shift(seed in 0u64..500, k in 0u32..5, horizon in -10i64..10) {
            let x = gen_gap_signal(48, 0.6, seed, true).unwrap();
            let a = ideal_shift_oracle(&cascade_oracle(&x, k).unwrap(), horizon).unwrap();
            let b = cascade_oracle(&ideal_shift_oracle(&x, horizon).unwrap(), k).unwrap();
            prop_assert!(max_diff(a.samples(), b.samples()) <= 1e-10);
        }
    }
}
