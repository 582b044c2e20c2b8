//! Estimating the cascade state from a finite observation window.
//!
//! On `[t₁, θ]` each accumulator splits into a part fixed by the observations
//! and a part linear in the unknown state:
//!
//! ```text
//! h_k(x)(t) = Σ_l C_{k,l}(t) η_l + F_k(t)
//! ```
//!
//! with `C_{k,l}(t₁-1) = δ_{kl}`, `C_{k,l}(t) = C_{k,l}(t-1) + C_{k-1,l}(t)`,
//! `F_0 = x` and `F_k(t) = F_k(t-1) + F_{k-1}(t)` from zero. Neither depends on
//! the filter coefficients, so one state estimate serves every polynomial of
//! the same degree. The state is fitted by asking a predictor to reproduce
//! observed values `x(t_m + T)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::apply::CascadeState;
use crate::error::{invalid, Error, Result};
use crate::lstsq;
use crate::signals::{modulation_factor, PeriodicSignal};
use crate::spectral::TransferPoly;

/// Contiguous observations `x(start), ..., x(start + len - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservedWindow {
    start: i64,
    samples: Vec<Complex64>,
}

impl ObservedWindow {
    pub fn new(start: i64, samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("window", "observation window is empty"));
        }
        Ok(Self { start, samples })
    }

    /// Observes `x` on `[start, end]`.
    pub fn from_signal(x: &PeriodicSignal, start: i64, end: i64) -> Result<Self> {
        if end < start {
            return Err(invalid("window", format!("end {end} precedes start {start}")));
        }
        Self::new(start, x.window(start, end))
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    /// Last observed time θ.
    pub fn end(&self) -> i64 {
        self.start + self.samples.len() as i64 - 1
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

    pub fn at(&self, t: i64) -> Result<Complex64> {
        if t < self.start || t > self.end() {
            return Err(Error::OutsideWindow {
                t,
                start: self.start,
                end: self.end(),
            });
        }
        Ok(self.samples[(t - self.start) as usize])
    }

    pub fn times(&self) -> impl Iterator<Item = i64> {
        self.start..=self.end()
    }
}

/// Decomposition of the accumulators at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionRow {
    pub t: i64,
    /// `F_0(t)..F_d(t)`.
    pub f: Vec<Complex64>,
    /// `C_{k,l}(t)` at `(k, l - 1)`, for `k = 0..=d`, `l = 1..=d`.
    pub c: DMatrix<f64>,
}

impl RegressionRow {
    pub fn order(&self) -> usize {
        self.c.ncols()
    }

    /// `Σ_l C_{k,l} η_l + F_k` for `k = 0..=d`.
    pub fn accumulators(&self, eta: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.order(), eta.len())?;
        Ok((0..=self.order())
            .map(|k| {
                let coupled: Complex64 = (0..self.order()).map(|l| eta[l] * self.c[(k, l)]).sum();
                coupled + self.f[k]
            })
            .collect())
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Rows for every time in the window, in order.
pub fn build_rows(window: &ObservedWindow, order: usize) -> Vec<RegressionRow> {
    let mut f_state = CascadeState::zero(order, window.start());
    // c holds C(t - 1) until updated in place to C(t)
    let mut c = DMatrix::<f64>::zeros(order + 1, order);
    for l in 0..order {
        c[(l + 1, l)] = 1.0;
    }
    let mut rows = Vec::with_capacity(window.len());
    for (t, &x) in window.times().zip(window.samples()) {
        f_state.push(x);
        for k in 1..=order {
            for l in 0..order {
                let lower = c[(k - 1, l)];
                c[(k, l)] += lower;
            }
        }
        let mut f = Vec::with_capacity(order + 1);
        f.push(x);
        f.extend_from_slice(f_state.accumulators());
        rows.push(RegressionRow { t, f, c: c.clone() });
    }
    rows
}

/// `a_0 F_0 + Σ a_k (Σ_l C_{k,l} η_l + F_k)`.
pub fn predict_value(row: &RegressionRow, p: &TransferPoly, eta: &[Complex64]) -> Result<Complex64> {
    check_len(row.order(), p.degree())?;
    let acc = row.accumulators(eta)?;
    let a = p.coeffs();
    let mut y = a[0] * row.f[0];
    for k in 1..=row.order() {
        y += acc[k] * a[k];
    }
    Ok(y)
}

/// Output of a state fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    #[serde(serialize_with = "ser_re", deserialize_with = "de_vec", rename = "eta")]
    pub eta: Vec<Complex64>,
    #[serde(rename = "residual")]
    pub residual_norm: f64,
    /// Largest error on admissible in-window times that were not fitted.
    pub holdout: Option<f64>,
    #[serde(rename = "cond")]
    pub condition_number: f64,
}

// η is written as two real arrays, `eta` and `etaIm`, by `FitResult::to_json`.
fn ser_re<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|z| z.re))
}

fn de_vec<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex64>, D::Error> {
    let re = Vec::<f64>::deserialize(d)?;
    Ok(re.into_iter().map(|r| Complex64::new(r, 0.0)).collect())
}

impl FitResult {
    /// Wraps a known state, e.g. the exact one, for use with the prediction routines.
    pub fn from_eta(eta: Vec<Complex64>) -> Self {
        Self {
            eta,
            residual_norm: 0.0,
            holdout: None,
            condition_number: 1.0,
        }
    }

    pub fn order(&self) -> usize {
        self.eta.len()
    }

    /// JSON object with `eta`, `etaIm`, `residual`, `cond` and `holdout`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("FitResult is always serializable");
        v["etaIm"] = self.eta.iter().map(|z| z.im).collect::<Vec<_>>().into();
        v
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let mut fit: Self = serde_json::from_value(v.clone())?;
        if let Some(im) = v.get("etaIm") {
            let im: Vec<f64> = serde_json::from_value(im.clone())?;
            check_len(fit.eta.len(), im.len())?;
            for (z, i) in fit.eta.iter_mut().zip(im) {
                z.im = i;
            }
        }
        Ok(fit)
    }
}

/// The `d̄` most recent admissible fitting times `θ - T - d̄ + 1 ..= θ - T`.
pub fn default_sample_times(window: &ObservedWindow, horizon: u32, count: usize) -> Result<Vec<i64>> {
    let last = window.end() - horizon as i64;
    let first = last - count as i64 + 1;
    if first < window.start() {
        return Err(Error::TooFewRows {
            needed: count,
            got: (last - window.start() + 1).max(0) as usize,
        });
    }
    Ok((first..=last).collect())
}

/// Fits η so that `p_pred` applied at each `t_m` reproduces `x(t_m + T)`.
pub fn fit_eta(
    window: &ObservedWindow,
    p_pred: &TransferPoly,
    horizon: u32,
    sample_times: &[i64],
) -> Result<FitResult> {
    let order = p_pred.degree();
    let rows = build_rows(window, order);
    fit_eta_with_rows(window, &rows, p_pred, horizon, sample_times)
}

/// As [`fit_eta`], reusing rows from [`build_rows`].
pub fn fit_eta_with_rows(
    window: &ObservedWindow,
    rows: &[RegressionRow],
    p_pred: &TransferPoly,
    horizon: u32,
    sample_times: &[i64],
) -> Result<FitResult> {
    let order = p_pred.degree();
    let mut times = sample_times.to_vec();
    times.sort_unstable();
    times.dedup();
    if times.len() < order {
        return Err(Error::TooFewRows {
            needed: order,
            got: times.len(),
        });
    }
    let horizon = horizon as i64;
    let row_at = |t: i64| -> Result<&RegressionRow> {
        if t < window.start() || t + horizon > window.end() {
            return Err(Error::OutsideWindow {
                t,
                start: window.start(),
                end: window.end() - horizon,
            });
        }
        let row = &rows[(t - window.start()) as usize];
        check_len(order, row.order())?;
        Ok(row)
    };

    if order == 0 {
        let eta = Vec::new();
        let residual = residual_norm(&times, |t| {
            Ok(window.at(t + horizon)? - predict_value(row_at(t)?, p_pred, &eta)?)
        })?;
        return Ok(FitResult {
            holdout: holdout_error(window, rows, p_pred, horizon, &times, &eta)?,
            eta,
            residual_norm: residual,
            condition_number: 1.0,
        });
    }

    let a = p_pred.coeffs();
    let m = times.len();
    let mut design = DMatrix::<f64>::zeros(m, order);
    let mut rhs = DMatrix::<f64>::zeros(m, 2);
    for (i, &t) in times.iter().enumerate() {
        let row = row_at(t)?;
        for l in 0..order {
            design[(i, l)] = (1..=order).map(|k| a[k] * row.c[(k, l)]).sum();
        }
        let known = a[0] * row.f[0] + (1..=order).map(|k| row.f[k] * a[k]).sum::<Complex64>();
        let target = window.at(t + horizon)? - known;
        rhs[(i, 0)] = target.re;
        rhs[(i, 1)] = target.im;
    }

    let solution = lstsq::solve(design, &rhs);
    let condition_number = solution.condition_number();
    if condition_number > lstsq::CONDITION_WARNING {
        log::warn!("state fit is ill-conditioned (cond = {condition_number:.3e})");
    }
    let eta: Vec<Complex64> = (0..order)
        .map(|l| Complex64::new(solution.x[(l, 0)], solution.x[(l, 1)]))
        .collect();
    let residual = residual_norm(&times, |t| {
        Ok(window.at(t + horizon)? - predict_value(row_at(t)?, p_pred, &eta)?)
    })?;
    Ok(FitResult {
        holdout: holdout_error(window, rows, p_pred, horizon, &times, &eta)?,
        eta,
        residual_norm: residual,
        condition_number,
    })
}

fn residual_norm(times: &[i64], mut err: impl FnMut(i64) -> Result<Complex64>) -> Result<f64> {
    let mut sum = 0.0;
    for &t in times {
        sum += err(t)?.norm_sqr();
    }
    Ok(sum.sqrt())
}

fn holdout_error(
    window: &ObservedWindow,
    rows: &[RegressionRow],
    p_pred: &TransferPoly,
    horizon: i64,
    fitted: &[i64],
    eta: &[Complex64],
) -> Result<Option<f64>> {
    let mut worst: Option<f64> = None;
    for t in window.start()..=window.end() - horizon {
        if fitted.binary_search(&t).is_ok() {
            continue;
        }
        let row = &rows[(t - window.start()) as usize];
        let err = (window.at(t + horizon)? - predict_value(row, p_pred, eta)?).norm();
        worst = Some(worst.map_or(err, |w: f64| w.max(err)));
    }
    Ok(worst)
}

/// Estimate of `x(θ + T)` from the fitted state.
pub fn predict_ahead(window: &ObservedWindow, p_pred: &TransferPoly, fit: &FitResult) -> Result<Complex64> {
    let rows = build_rows(window, fit.order());
    predict_value(rows.last().expect("window is non-empty"), p_pred, &fit.eta)
}

/// Causally filtered estimates on the window, using the state fitted for a
/// predictor. `p_filt` is zero-padded up to the state's order.
pub fn filter_with_shared_eta(
    window: &ObservedWindow,
    p_filt: &TransferPoly,
    fit: &FitResult,
) -> Result<Vec<Complex64>> {
    let rows = build_rows(window, fit.order());
    filter_rows(&rows, p_filt, fit)
}

/// As [`filter_with_shared_eta`], reusing rows from [`build_rows`].
pub fn filter_rows(rows: &[RegressionRow], p_filt: &TransferPoly, fit: &FitResult) -> Result<Vec<Complex64>> {
    if p_filt.degree() > fit.order() {
        return Err(Error::DimensionMismatch {
            expected: fit.order(),
            got: p_filt.degree(),
        });
    }
    let p = p_filt.padded(fit.order())?;
    rows.iter().map(|row| predict_value(row, &p, &fit.eta)).collect()
}

/// Largest gain from a state error to the output of `p` over the rows:
/// `max_t Σ_l |Σ_k a_k C_{k,l}(t)|`. An error `δ` in every `η_l` moves the
/// output by at most this factor times `max |δ_l|`.
pub fn state_sensitivity(rows: &[RegressionRow], p: &TransferPoly) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for row in rows {
        check_len(row.order(), p.degree())?;
        let a = p.coeffs();
        let gain: f64 = (0..row.order())
            .map(|l| (1..=row.order()).map(|k| a[k] * row.c[(k, l)]).sum::<f64>().abs())
            .sum();
        worst = worst.max(gain);
    }
    Ok(worst)
}

/// Converts observations of `x̂` into observations of `x(t) = e^{-iθt} x̂(t)`.
pub fn demodulate_window(window: &ObservedWindow, theta: f64, period: usize) -> Result<ObservedWindow> {
    let samples = window
        .times()
        .zip(window.samples())
        .map(|(t, v)| Ok(v * modulation_factor(theta, t, period)?.conj()))
        .collect::<Result<Vec<_>>>()?;
    ObservedWindow::new(window.start(), samples)
}

/// Prediction of `x̂(θ + T)` for a signal whose gap is centered at `θ_mod`:
/// the window is moved to a gap around zero, predicted there, and the
/// estimate is moved back with the factor at the predicted time.
///
/// Returns the estimate and the state fitted on the demodulated window.
pub fn predict_modulated(
    window: &ObservedWindow,
    theta: f64,
    period: usize,
    p_pred: &TransferPoly,
    horizon: u32,
    sample_times: &[i64],
) -> Result<(Complex64, FitResult)> {
    let base = demodulate_window(window, theta, period)?;
    let fit = fit_eta(&base, p_pred, horizon, sample_times)?;
    let y = predict_ahead_modulated(window, theta, period, p_pred, horizon, &fit)?;
    Ok((y, fit))
}

/// As [`predict_modulated`] with a given state for the demodulated signal.
pub fn predict_ahead_modulated(
    window: &ObservedWindow,
    theta: f64,
    period: usize,
    p_pred: &TransferPoly,
    horizon: u32,
    fit: &FitResult,
) -> Result<Complex64> {
    let base = demodulate_window(window, theta, period)?;
    let y = predict_ahead(&base, p_pred, fit)?;
    Ok(y * modulation_factor(theta, window.end() + horizon as i64, period)?)
}

/// Filtered estimates of `x̂` for a signal whose gap is centered at `θ_mod`,
/// given a state fitted on the demodulated window.
pub fn filter_modulated(
    window: &ObservedWindow,
    theta: f64,
    period: usize,
    p_filt: &TransferPoly,
    fit: &FitResult,
) -> Result<Vec<Complex64>> {
    let base = demodulate_window(window, theta, period)?;
    let out = filter_with_shared_eta(&base, p_filt, fit)?;
    window
        .times()
        .zip(out)
        .map(|(t, y)| Ok(y * modulation_factor(theta, t, period)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apply::run_causal;
    use crate::approx::{make_grid, solve_ls, ApproximationTarget};
    use crate::signals::{exact_eta, gen_gap_signal, modulate, transfer_oracle};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn predictor(degree: usize, gap: f64) -> (TransferPoly, f64) {
        let target = ApproximationTarget::predictor(1, gap).unwrap();
        let (p, report) = solve_ls(&target, degree, &make_grid(gap, 1024).unwrap()).unwrap();
        (p, report.l2_error)
    }

    #[test]
    fn first_row() {
        let w = ObservedWindow::new(3, vec![c(2.5), c(-1.0), c(4.0)]).unwrap();
        let rows = build_rows(&w, 3);
        assert_eq!(rows[0].t, 3);
        assert_eq!(rows[0].c[(1, 0)], 1.0);
        assert_eq!(rows[0].f[1], c(2.5));
        assert_eq!(rows[0].f[0], c(2.5));
    }

    #[test]
    fn coefficient_structure() {
        let w = ObservedWindow::new(-4, vec![c(0.0); 12]).unwrap();
        let rows = build_rows(&w, 5);
        for row in &rows {
            let n = (row.t - w.start() + 1) as f64;
            assert_eq!(row.c[(2, 0)], n);
            // C_{k,l} depends only on k - l: it is the binomial C(n + k - l - 1, k - l)
            assert_eq!(row.c[(3, 0)], n * (n + 1.0) / 2.0);
            assert_eq!(row.c[(3, 1)], n);
            for k in 0..=5 {
                for l in 1..=5 {
                    if l > k {
                        assert_eq!(row.c[(k, l - 1)], 0.0);
                    }
                    if l == k {
                        assert_eq!(row.c[(k, l - 1)], 1.0);
                    }
                }
            }
            assert!(row.f.iter().all(|v| *v == c(0.0)));
        }
        // C is independent of the observations
        let other = ObservedWindow::new(-4, (0..12).map(|i| c(i as f64)).collect()).unwrap();
        for (a, b) in rows.iter().zip(build_rows(&other, 5)) {
            assert_eq!(a.c, b.c);
        }
    }

    #[test]
    fn predict_value_examples() {
        let w = ObservedWindow::new(0, vec![c(1.5), c(-2.0)]).unwrap();
        let rows = build_rows(&w, 0);
        let id = TransferPoly::constant(1.0);
        assert_eq!(predict_value(&rows[1], &id, &[]).unwrap(), c(-2.0));
        let zero = ObservedWindow::new(0, vec![c(0.0); 4]).unwrap();
        let p = TransferPoly::new(vec![0.3, 1.0, -2.0]).unwrap();
        for row in build_rows(&zero, 2) {
            assert_eq!(predict_value(&row, &p, &[c(0.0); 2]).unwrap(), c(0.0));
        }
        assert!(predict_value(&rows[0], &p, &[]).is_err());
    }

    #[test]
    fn representations_agree() {
        let x = gen_gap_signal(64, 1.2, 5, true).unwrap();
        let p = TransferPoly::new(vec![0.4, -1.5, 2.0, 0.7, -0.2]).unwrap();
        let w = ObservedWindow::from_signal(&x, 7, 40).unwrap();
        let rows = build_rows(&w, 4);
        for eta in [
            exact_eta(&x, 4, 7).unwrap(),
            vec![c(1.0), Complex64::new(-0.5, 2.0), c(0.25), c(3.0)],
        ] {
            let direct = run_causal(w.samples(), &p, &eta, 7).unwrap();
            for (row, y) in rows.iter().zip(&direct) {
                let v = predict_value(row, &p, &eta).unwrap();
                assert!((v - y).norm() <= 1e-8 * x.norm(), "t = {}", row.t);
            }
        }
    }

    #[test]
    fn exact_state_is_feasible() {
        let (p, eps) = predictor(6, FRAC_PI_2);
        let x = gen_gap_signal(64, FRAC_PI_2, 2, true).unwrap();
        let w = ObservedWindow::from_signal(&x, 0, 30).unwrap();
        let eta = exact_eta(&x, 6, 0).unwrap();
        for row in build_rows(&w, 6).iter().take(30) {
            let err = (x.at(row.t + 1) - predict_value(row, &p, &eta).unwrap()).norm();
            assert!(err <= eps * x.norm(), "t = {}: {err} > {eps}", row.t);
        }
    }

    #[test]
    fn square_fit_interpolates() {
        let (p, _) = predictor(6, FRAC_PI_2);
        let x = gen_gap_signal(64, FRAC_PI_2, 3, true).unwrap();
        let w = ObservedWindow::from_signal(&x, 0, 20).unwrap();
        let times = default_sample_times(&w, 1, 6).unwrap();
        let fit = fit_eta(&w, &p, 1, &times).unwrap();
        assert!(fit.residual_norm <= 1e-8 * x.norm(), "{}", fit.residual_norm);
        assert!(fit.holdout.is_some());
    }

    #[test]
    fn overdetermined_fit_predicts() {
        let (p, eps) = predictor(6, FRAC_PI_2);
        for seed in 0..5 {
            let x = gen_gap_signal(64, FRAC_PI_2, seed, true).unwrap();
            let w = ObservedWindow::from_signal(&x, 0, 24).unwrap();
            let times = default_sample_times(&w, 1, 12).unwrap();
            let fit = fit_eta(&w, &p, 1, &times).unwrap();
            let estimate = predict_ahead(&w, &p, &fit).unwrap();
            let err = (estimate - x.at(w.end() + 1)).norm();
            assert!(err <= 2.0 * eps * x.norm(), "seed {seed}: {err}");
        }
    }

    #[test]
    fn too_few_rows() {
        let (p, _) = predictor(4, FRAC_PI_2);
        let x = gen_gap_signal(64, FRAC_PI_2, 3, true).unwrap();
        let w = ObservedWindow::from_signal(&x, 0, 10).unwrap();
        assert!(matches!(fit_eta(&w, &p, 1, &[5, 6, 7]), Err(Error::TooFewRows { .. })));
        assert!(matches!(fit_eta(&w, &p, 1, &[5, 6, 7, 10]), Err(Error::OutsideWindow { .. })));
        assert!(default_sample_times(&w, 1, 11).is_err());
    }

    #[test]
    fn identity_horizon() {
        let x = gen_gap_signal(64, FRAC_PI_2, 8, true).unwrap();
        let target = ApproximationTarget::predictor(0, FRAC_PI_2).unwrap();
        let (p, report) = solve_ls(&target, 4, &make_grid(FRAC_PI_2, 256).unwrap()).unwrap();
        let w = ObservedWindow::from_signal(&x, 0, 20).unwrap();
        let times = default_sample_times(&w, 0, 8).unwrap();
        let fit = fit_eta(&w, &p, 0, &times).unwrap();
        let estimate = predict_ahead(&w, &p, &fit).unwrap();
        assert!((estimate - x.at(20)).norm() <= 2.0 * report.l2_error * x.norm() + 1e-12);
    }

    #[test]
    fn shared_state_filtering() {
        let x = gen_gap_signal(64, 1.0, 4, true).unwrap();
        let w = ObservedWindow::from_signal(&x, 0, 63).unwrap();
        let eta = exact_eta(&x, 4, 0).unwrap();
        let fit = FitResult::from_eta(eta);
        let p_filt = TransferPoly::new(vec![1.0, 0.5, -0.25]).unwrap();
        let out = filter_with_shared_eta(&w, &p_filt, &fit).unwrap();
        let oracle = transfer_oracle(&x, &p_filt).unwrap();
        for (t, y) in out.iter().enumerate() {
            assert!((y - oracle.at(t as i64)).norm() <= 1e-8);
        }
        let id = filter_with_shared_eta(&w, &TransferPoly::constant(1.0), &fit).unwrap();
        assert_eq!(id, w.samples());
        let too_long = TransferPoly::zero(5);
        assert!(filter_with_shared_eta(&w, &too_long, &fit).is_err());
    }

    #[test]
    fn sensitivity_bounds_state_error() {
        let x = gen_gap_signal(64, 1.0, 4, true).unwrap();
        let w = ObservedWindow::from_signal(&x, 0, 20).unwrap();
        let p = TransferPoly::new(vec![0.2, 1.0, -0.5, 0.25]).unwrap();
        let rows = build_rows(&w, 3);
        let kappa = state_sensitivity(&rows, &p).unwrap();
        let eta = exact_eta(&x, 3, 0).unwrap();
        let delta = [c(1e-3), c(-1e-3), c(1e-3)];
        let perturbed: Vec<_> = eta.iter().zip(&delta).map(|(a, b)| a + b).collect();
        let a = filter_rows(&rows, &p, &FitResult::from_eta(eta)).unwrap();
        let b = filter_rows(&rows, &p, &FitResult::from_eta(perturbed)).unwrap();
        let moved = a.iter().zip(&b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(moved <= kappa * 1e-3 * (1.0 + 1e-12));
        // h_3(x)(t₁) = η_1 + η_2 + η_3 + x(t₁)
        assert_eq!(state_sensitivity(&rows[..1], &TransferPoly::monomial(3)).unwrap(), 3.0);
    }

    #[test]
    fn rows_are_shared_bitwise() {
        let x = gen_gap_signal(64, 1.0, 4, true).unwrap();
        let w = ObservedWindow::from_signal(&x, 0, 30).unwrap();
        assert_eq!(build_rows(&w, 5), build_rows(&w, 5));
    }

    #[test]
    fn modulated_paths() {
        let (p, eps) = predictor(6, FRAC_PI_2);
        let x = gen_gap_signal(64, FRAC_PI_2, 1, true).unwrap();
        let w = ObservedWindow::from_signal(&x, 0, 24).unwrap();
        let times = default_sample_times(&w, 1, 12).unwrap();
        let (y0, fit0) = predict_modulated(&w, 0.0, 64, &p, 1, &times).unwrap();
        let fit = fit_eta(&w, &p, 1, &times).unwrap();
        assert_eq!(fit0, fit);
        assert_eq!(y0, predict_ahead(&w, &p, &fit).unwrap());

        // low-frequency signal, gap around π
        let low = modulate(&x, PI).unwrap();
        let lw = ObservedWindow::from_signal(&low, 0, 24).unwrap();
        let (y, _) = predict_modulated(&lw, PI, 64, &p, 1, &times).unwrap();
        assert!(y.im.abs() <= 1e-10);
        assert!((y - low.at(25)).norm() <= 2.0 * eps);
        assert!(predict_modulated(&lw, 0.1, 64, &p, 1, &times).is_err());

        let back = demodulate_window(&lw, PI, 64).unwrap();
        assert_eq!(back.samples(), w.samples());
        let out = filter_modulated(&lw, PI, 64, &TransferPoly::constant(1.0), &FitResult::from_eta(vec![c(0.0); 6])).unwrap();
        assert_eq!(out, lw.samples());
    }

    #[test]
    fn json_round_trip() {
        let fit = FitResult {
            eta: vec![Complex64::new(1.0, -2.0), c(0.5)],
            residual_norm: 1e-3,
            holdout: None,
            condition_number: 12.0,
        };
        let v = fit.to_json();
        assert_eq!(v["eta"], serde_json::json!([1.0, 0.5]));
        assert_eq!(v["etaIm"], serde_json::json!([-2.0, 0.0]));
        assert!(v["holdout"].is_null());
        assert_eq!(v["cond"], 12.0);
        assert_eq!(FitResult::from_json(&v).unwrap(), fit);
    }
}
