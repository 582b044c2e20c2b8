//! Command-line driver. Every command validates its configuration before
//! computing anything, writes CSV/JSON into an output directory, and prints a
//! one-line summary. Reruns with the same arguments produce identical files.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::approx::{
    error_curve, evaluate_design, exponential_predictor, make_grid, predictor_power, select_nu_and_d,
    solve_ls, ApproximationTarget,
};
use crate::error::{invalid, Error, Result};
use crate::fit::{
    default_sample_times, build_rows, filter_modulated, fit_eta, state_sensitivity, predict_ahead_modulated,
    predict_modulated, FitResult, ObservedWindow,
};
use crate::io::{read_poly, read_signal, write_csv, write_json, write_poly, write_signal, SignalMeta};
use crate::signals::{
    bin_frequency, exact_eta, gen_gap_signal_at, ideal_filter_oracle, make_left_sided, modulate,
    verify_gap_at, LeftSide, PeriodicSignal,
};
use crate::spectral::{wrap_angle, SpectrumGap};

/// Parses radians, accepting `pi` multiples such as `pi/2`, `-pi/4`, `3pi/4`
/// or `3*pi/4` as well as plain numbers.
pub fn parse_angle(text: &str) -> std::result::Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let s = s.replace('π', "pi");
    let Some(pos) = s.find("pi") else {
        return s.parse::<f64>().map_err(|_| format!("cannot parse angle `{text}`"));
    };
    let (head, tail) = (&s[..pos], &s[pos + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let factor = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| format!("cannot parse angle `{text}`"))?,
    };
    let divisor = match tail {
        "" => 1.0,
        t => t
            .strip_prefix('/')
            .and_then(|d| d.parse::<f64>().ok())
            .filter(|d| *d != 0.0)
            .ok_or_else(|| format!("cannot parse angle `{text}`"))?,
    };
    Ok(factor * std::f64::consts::PI / divisor)
}

#[derive(Debug, Parser)]
#[command(name = "stepoly", version, about = "Causal predictors and high-pass filters from unit-step transfer polynomials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Least-squares coefficient sweep over degrees 0..=dmax.
    Approx(ApproxArgs),
    /// Generate a signal with a spectrum gap.
    Gen(GenArgs),
    /// Rolling-window prediction with a fitted state.
    Predict(PredictArgs),
    /// Causal high-pass filtering with a state shared from the predictor fit.
    Filter(FilterArgs),
    /// Closed-form exponential predictor coefficients.
    Expcoeffs(ExpArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetKind {
    Predict,
    Highpass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LeftSidedKind {
    Even,
    Odd,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[arg(long, value_enum)]
    pub target: TargetKind,
    /// Prediction horizon.
    #[arg(long = "T", default_value_t = 1)]
    pub horizon: u32,
    /// Gap half-width Ω̄.
    #[arg(long, value_parser = parse_angle)]
    pub gap: f64,
    /// High-pass cutoff Ω.
    #[arg(long, value_parser = parse_angle)]
    pub cutoff: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub dmin: usize,
    #[arg(long, default_value_t = 20)]
    pub dmax: usize,
    /// Grid points per side.
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    /// Also write the pointwise error curve for every degree.
    #[arg(long)]
    pub curves: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long = "N", default_value_t = 256)]
    pub n: usize,
    #[arg(long, value_parser = parse_angle)]
    pub gap: f64,
    /// Center of the gap; a signal centered at θ becomes a zero-centered one after modulation by θ.
    #[arg(long = "theta-mod", value_parser = parse_angle, default_value = "0", allow_hyphen_values = true)]
    pub theta_mod: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw a complex signal instead of a real one.
    #[arg(long)]
    pub complex: bool,
    /// Replace the signal by its even (τ = 0) or odd (τ = -1) part.
    #[arg(long = "left-sided", value_enum)]
    pub left_sided: Option<LeftSidedKind>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long = "N", default_value_t = 256)]
    pub n: usize,
    #[arg(long, value_parser = parse_angle)]
    pub gap: f64,
    #[arg(long = "T", default_value_t = 1)]
    pub horizon: u32,
    /// Predictor degree.
    #[arg(long, default_value_t = 6)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of fitting rows; defaults to 2d.
    #[arg(long)]
    pub dbar: Option<usize>,
    /// Start of the first observation window.
    #[arg(long, default_value_t = 0)]
    pub t1: i64,
    /// Observation window length; defaults to d̄ + T + d.
    #[arg(long)]
    pub window: Option<usize>,
    /// Number of rolling windows.
    #[arg(long, default_value_t = 32)]
    pub steps: usize,
    #[arg(long = "theta-mod", value_parser = parse_angle, default_value = "0", allow_hyphen_values = true)]
    pub theta_mod: f64,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    /// Read the signal from a `t,re,im` CSV (with a sidecar of the same stem) instead of generating it.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long = "N", default_value_t = 64)]
    pub n: usize,
    /// Gap half-width Ω₀ of the input signal.
    #[arg(long, value_parser = parse_angle)]
    pub gap: f64,
    /// Cutoff Ω of the ideal high-pass filter; must exceed the gap.
    #[arg(long, value_parser = parse_angle)]
    pub cutoff: f64,
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of fitting rows; defaults to 2d.
    #[arg(long)]
    pub dbar: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub t1: i64,
    #[arg(long = "theta-mod", value_parser = parse_angle, default_value = "0", allow_hyphen_values = true)]
    pub theta_mod: f64,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    /// Filter coefficients JSON to use instead of the least-squares design.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExpArgs {
    /// Error budget ε.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, value_parser = parse_angle)]
    pub gap: f64,
    #[arg(long = "T", default_value_t = 1)]
    pub horizon: u32,
    /// Override ν (must be negative).
    #[arg(long, allow_hyphen_values = true)]
    pub nu: Option<f64>,
    /// Override the degree.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs one command and returns its summary line.
pub fn execute(command: &Command) -> Result<String> {
    match command {
        Command::Approx(a) => cmd_approx(&ApproxConfig::try_from(a)?),
        Command::Gen(a) => cmd_gen(&GenConfig::try_from(a)?),
        Command::Predict(a) => cmd_predict(&PredictConfig::try_from(a)?),
        Command::Filter(a) => cmd_filter(&FilterConfig::try_from(a)?),
        Command::Expcoeffs(a) => cmd_expcoeffs(&ExpConfig::try_from(a)?),
    }
}

fn check_grid(m: usize) -> Result<()> {
    if m < 2 {
        return Err(invalid("grid", format!("need at least 2 points per side, got {m}")));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n < 8 {
        return Err(invalid("N", format!("need at least 8 samples, got {n}")));
    }
    Ok(())
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Validated parameters of `approx`.
#[derive(Debug, Clone)]
pub struct ApproxConfig {
    pub target: ApproximationTarget,
    pub dmin: usize,
    pub dmax: usize,
    pub grid: usize,
    pub curves: bool,
    pub out: PathBuf,
}

impl TryFrom<&ApproxArgs> for ApproxConfig {
    type Error = Error;

    fn try_from(a: &ApproxArgs) -> Result<Self> {
        let target = match a.target {
            TargetKind::Predict => ApproximationTarget::predictor(a.horizon, a.gap)?,
            TargetKind::Highpass => {
                let cutoff = a.cutoff.ok_or_else(|| invalid("cutoff", "a high-pass target needs --cutoff"))?;
                ApproximationTarget::high_pass(cutoff, a.gap)?
            }
        };
        if a.dmin > a.dmax {
            return Err(invalid("dmin", format!("{} exceeds dmax {}", a.dmin, a.dmax)));
        }
        check_grid(a.grid)?;
        Ok(Self {
            target,
            dmin: a.dmin,
            dmax: a.dmax,
            grid: a.grid,
            curves: a.curves,
            out: a.out.clone(),
        })
    }
}

#[derive(Serialize)]
struct ApproxRow {
    d: usize,
    #[serde(rename = "l2Error")]
    l2_error: f64,
    #[serde(rename = "supError")]
    sup_error: f64,
    cond: f64,
}

#[derive(Serialize)]
struct CurveRow {
    omega: f64,
    error: f64,
}

pub fn cmd_approx(cfg: &ApproxConfig) -> Result<String> {
    prepare_out(&cfg.out)?;
    let grid = make_grid(cfg.target.gap(), cfg.grid)?;
    let mut rows = Vec::new();
    let mut reports: Vec<serde_json::Value> = Vec::new();
    for d in cfg.dmin..=cfg.dmax {
        let (p, report) = solve_ls(&cfg.target, d, &grid)?;
        write_poly(&cfg.out.join(format!("coeffs_d{d}.json")), &p, Some(cfg.target))?;
        if cfg.curves {
            let curve: Vec<CurveRow> = error_curve(&p, &cfg.target, &grid)?
                .into_iter()
                .map(|(omega, error)| CurveRow { omega, error })
                .collect();
            write_csv(&cfg.out.join(format!("error_curve_d{d}.csv")), &curve)?;
        }
        rows.push(ApproxRow {
            d,
            l2_error: report.l2_error,
            sup_error: report.sup_error,
            cond: report.condition_number,
        });
        let mut v = serde_json::to_value(report)?;
        v["d"] = d.into();
        reports.push(v);
    }
    write_csv(&cfg.out.join("approx.csv"), &rows)?;
    // nested classes: the optimum cannot get worse with degree
    let largest_increase = rows
        .windows(2)
        .map(|w| w[1].l2_error - w[0].l2_error)
        .fold(f64::NEG_INFINITY, f64::max);
    write_json(
        &cfg.out.join("approx.json"),
        &json!({
            "target": cfg.target,
            "grid": cfg.grid,
            "reports": reports,
            "largestIncrease": if rows.len() > 1 { json!(largest_increase) } else { json!(null) },
        }),
    )?;
    let last = rows.last().expect("at least one degree");
    Ok(format!(
        "approx: {} degrees, d = {}: l2Error = {:.6e}, supError = {:.6e}, cond = {:.3e}",
        rows.len(),
        last.d,
        last.l2_error,
        last.sup_error,
        last.cond
    ))
}

/// Validated parameters of `gen`.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub n: usize,
    pub gap: SpectrumGap,
    pub seed: u64,
    pub real: bool,
    pub left_sided: Option<LeftSide>,
    pub out: PathBuf,
}

impl TryFrom<&GenArgs> for GenConfig {
    type Error = Error;

    fn try_from(a: &GenArgs) -> Result<Self> {
        check_n(a.n)?;
        let gap = SpectrumGap::centered(a.gap, a.theta_mod)?;
        let left_sided = a.left_sided.map(|k| match k {
            LeftSidedKind::Even => LeftSide::Even,
            LeftSidedKind::Odd => LeftSide::Odd,
        });
        if left_sided.is_some() && a.complex {
            return Err(invalid("left-sided", "even/odd parts need a real signal"));
        }
        Ok(Self {
            n: a.n,
            gap,
            seed: a.seed,
            real: !a.complex,
            left_sided,
            out: a.out.clone(),
        })
    }
}

pub fn cmd_gen(cfg: &GenConfig) -> Result<String> {
    prepare_out(&cfg.out)?;
    let mut x = gen_gap_signal_at(cfg.n, cfg.gap, cfg.seed, cfg.real)?;
    if let Some(side) = cfg.left_sided {
        x = make_left_sided(side, &x)?;
    }
    let leakage = verify_gap_at(&x, &cfg.gap);
    let meta = SignalMeta {
        n: cfg.n,
        gap: Some(cfg.gap),
        seed: Some(cfg.seed),
        real: Some(cfg.real),
        gap_leakage: Some(leakage),
        variant: cfg.left_sided.map(|s| match s {
            LeftSide::Even => "even".to_string(),
            LeftSide::Odd => "odd".to_string(),
        }),
    };
    write_signal(&cfg.out.join("signal.csv"), &cfg.out.join("signal.json"), &x, &meta)?;
    Ok(format!(
        "gen: N = {}, norm = {:.6}, gap leakage = {:.3e}",
        cfg.n,
        x.norm(),
        leakage
    ))
}

/// Loads a signal, attaching `<stem>.json` as its sidecar when present.
fn load_input(path: &Path) -> Result<PeriodicSignal> {
    let meta = path.with_extension("json");
    read_signal(path, meta.exists().then_some(meta.as_path()))
}

/// Validated parameters of `predict`.
#[derive(Debug, Clone)]
pub struct PredictConfig {
    pub n: usize,
    pub gap: f64,
    pub horizon: u32,
    pub d: usize,
    pub seed: u64,
    pub dbar: usize,
    pub t1: i64,
    pub window: usize,
    pub steps: usize,
    pub theta_mod: f64,
    pub grid: usize,
    pub input: Option<PathBuf>,
    pub out: PathBuf,
}

impl TryFrom<&PredictArgs> for PredictConfig {
    type Error = Error;

    fn try_from(a: &PredictArgs) -> Result<Self> {
        check_n(a.n)?;
        ApproximationTarget::predictor(a.horizon, a.gap)?;
        check_grid(a.grid)?;
        let dbar = a.dbar.unwrap_or(2 * a.d);
        if dbar < a.d {
            return Err(invalid("dbar", format!("need at least d = {} rows, got {dbar}", a.d)));
        }
        let window = a.window.unwrap_or(dbar + a.horizon as usize + a.d);
        if window < dbar + a.horizon as usize {
            return Err(invalid(
                "window",
                format!("length {window} leaves fewer than {dbar} admissible fitting times"),
            ));
        }
        if a.steps == 0 {
            return Err(invalid("steps", "need at least one window"));
        }
        Ok(Self {
            n: a.n,
            gap: a.gap,
            horizon: a.horizon,
            d: a.d,
            seed: a.seed,
            dbar,
            t1: a.t1,
            window,
            steps: a.steps,
            theta_mod: wrap_angle(a.theta_mod),
            grid: a.grid,
            input: a.input.clone(),
            out: a.out.clone(),
        })
    }
}

#[derive(Serialize)]
struct PredictRow {
    t: i64,
    truth: f64,
    estimate: f64,
    error: f64,
    #[serde(rename = "truthIm")]
    truth_im: f64,
    #[serde(rename = "estimateIm")]
    estimate_im: f64,
    #[serde(rename = "errorExactEta")]
    error_exact_eta: f64,
}

/// The signal for `predict`/`filter`: generated around `θ` or read from disk.
fn source_signal(input: Option<&Path>, n: usize, gap: f64, theta: f64, seed: u64) -> Result<PeriodicSignal> {
    match input {
        Some(path) => {
            let x = load_input(path)?;
            if x.gap().is_none() {
                return Err(invalid("input", "the signal needs a sidecar with its gap"));
            }
            Ok(x)
        }
        None => {
            let centered_real = theta.abs() < 1e-12 || (theta.abs() - std::f64::consts::PI).abs() < 1e-12;
            gen_gap_signal_at(n, SpectrumGap::centered(gap, theta)?, seed, centered_real)
        }
    }
}

pub fn cmd_predict(cfg: &PredictConfig) -> Result<String> {
    prepare_out(&cfg.out)?;
    let x_hat = source_signal(cfg.input.as_deref(), cfg.n, cfg.gap, cfg.theta_mod, cfg.seed)?;
    let n = x_hat.len();
    let base = modulate(&x_hat, cfg.theta_mod)?;
    let gap = base.gap().map(|g| g.half_width).unwrap_or(cfg.gap);
    let target = ApproximationTarget::predictor(cfg.horizon, gap)?;
    let (p, report) = solve_ls(&target, cfg.d, &make_grid(gap, cfg.grid)?)?;
    write_poly(&cfg.out.join("coeffs.json"), &p, Some(target))?;

    let norm = x_hat.norm();
    let mut rows = Vec::with_capacity(cfg.steps);
    let mut worst_cond: f64 = 0.0;
    let mut last_fit = None;
    for s in 0..cfg.steps as i64 {
        let start = cfg.t1 + s;
        let window = ObservedWindow::from_signal(&x_hat, start, start + cfg.window as i64 - 1)?;
        let demod = crate::fit::demodulate_window(&window, cfg.theta_mod, n)?;
        let times = default_sample_times(&demod, cfg.horizon, cfg.dbar)?;
        let (estimate, fit) = predict_modulated(&window, cfg.theta_mod, n, &p, cfg.horizon, &times)?;
        let exact = FitResult::from_eta(exact_eta(&base, cfg.d, start)?);
        let estimate_exact = predict_ahead_modulated(&window, cfg.theta_mod, n, &p, cfg.horizon, &exact)?;
        let t = window.end() + cfg.horizon as i64;
        let truth = x_hat.at(t);
        worst_cond = worst_cond.max(fit.condition_number);
        rows.push(PredictRow {
            t,
            truth: truth.re,
            estimate: estimate.re,
            error: (estimate - truth).norm(),
            truth_im: truth.im,
            estimate_im: estimate.im,
            error_exact_eta: (estimate_exact - truth).norm(),
        });
        last_fit = Some(fit);
    }
    write_csv(&cfg.out.join("predict.csv"), &rows)?;
    if let Some(fit) = &last_fit {
        write_json(&cfg.out.join("fit.json"), &fit.to_json())?;
    }

    let max_error = rows.iter().map(|r| r.error).fold(0.0, f64::max);
    let max_error_exact = rows.iter().map(|r| r.error_exact_eta).fold(0.0, f64::max);
    let bound = report.l2_error * norm;
    let summary = json!({
        "N": n,
        "T": cfg.horizon,
        "d": cfg.d,
        "dbar": cfg.dbar,
        "window": cfg.window,
        "thetaMod": cfg.theta_mod,
        "seed": cfg.seed,
        "epsilon": report.l2_error,
        "supError": report.sup_error,
        "norm": norm,
        "maxError": max_error,
        "maxErrorExactEta": max_error_exact,
        "bound": bound,
        "fittedBound": 2.0 * bound,
        "exactWithinBound": max_error_exact <= bound,
        "fittedWithinBound": max_error <= 2.0 * bound,
        "maxCond": worst_cond,
    });
    write_json(&cfg.out.join("summary.json"), &summary)?;
    Ok(format!(
        "predict: max error {max_error:.3e} (bound 2ε‖x‖ = {:.3e}), exact state {max_error_exact:.3e} (bound ε‖x‖ = {bound:.3e})",
        2.0 * bound
    ))
}

/// Validated parameters of `filter`.
#[derive(Debug, Clone)]
pub struct FilterConfig {
    pub n: usize,
    pub gap: f64,
    pub cutoff: f64,
    pub d: usize,
    pub seed: u64,
    pub dbar: usize,
    pub t1: i64,
    pub theta_mod: f64,
    pub grid: usize,
    pub coeffs: Option<PathBuf>,
    pub out: PathBuf,
}

impl TryFrom<&FilterArgs> for FilterConfig {
    type Error = Error;

    fn try_from(a: &FilterArgs) -> Result<Self> {
        check_n(a.n)?;
        check_grid(a.grid)?;
        if a.gap >= a.cutoff {
            return Err(invalid(
                "gap",
                format!("signal gap {} must be smaller than the cutoff {}", a.gap, a.cutoff),
            ));
        }
        ApproximationTarget::high_pass(a.cutoff, a.gap)?;
        let dbar = a.dbar.unwrap_or(2 * a.d);
        if dbar < a.d {
            return Err(invalid("dbar", format!("need at least d = {} rows, got {dbar}", a.d)));
        }
        if dbar + 1 > a.n {
            return Err(invalid("dbar", format!("{dbar} rows do not fit in one period of {}", a.n)));
        }
        Ok(Self {
            n: a.n,
            gap: a.gap,
            cutoff: a.cutoff,
            d: a.d,
            seed: a.seed,
            dbar,
            t1: a.t1,
            theta_mod: wrap_angle(a.theta_mod),
            grid: a.grid,
            coeffs: a.coeffs.clone(),
            out: a.out.clone(),
        })
    }
}

#[derive(Serialize)]
struct AttenuationRow {
    j: usize,
    omega: f64,
    input: f64,
    #[serde(rename = "outputExactEta")]
    output_exact: f64,
    #[serde(rename = "outputFittedEta")]
    output_fitted: f64,
    ideal: f64,
    suppressed: bool,
}

pub fn cmd_filter(cfg: &FilterConfig) -> Result<String> {
    prepare_out(&cfg.out)?;
    let x_hat = source_signal(None, cfg.n, cfg.gap, cfg.theta_mod, cfg.seed)?;
    let n = x_hat.len();
    let base = modulate(&x_hat, cfg.theta_mod)?;
    let grid = make_grid(cfg.gap, cfg.grid)?;

    let filt_target = ApproximationTarget::high_pass(cfg.cutoff, cfg.gap)?;
    let p_filt = match &cfg.coeffs {
        Some(path) => read_poly(path)?,
        None => solve_ls(&filt_target, cfg.d, &grid)?.0,
    };
    if p_filt.degree() > cfg.d {
        return Err(invalid(
            "coeffs",
            format!("filter degree {} exceeds d = {}", p_filt.degree(), cfg.d),
        ));
    }
    let (filt_l2, filt_sup) = evaluate_design(&p_filt, &filt_target, &grid)?;
    let pred_target = ApproximationTarget::predictor(1, cfg.gap)?;
    let (p_pred, pred_report) = solve_ls(&pred_target, cfg.d, &grid)?;
    write_poly(&cfg.out.join("coeffs_filter.json"), &p_filt, Some(filt_target))?;
    write_poly(&cfg.out.join("coeffs_predict.json"), &p_pred, Some(pred_target))?;

    // one full period, with the state fitted on its earliest samples
    let window = ObservedWindow::from_signal(&x_hat, cfg.t1, cfg.t1 + n as i64 - 1)?;
    let demod = crate::fit::demodulate_window(&window, cfg.theta_mod, n)?;
    let times: Vec<i64> = (cfg.t1..cfg.t1 + cfg.dbar as i64).collect();
    let fitted = if cfg.d == 0 {
        FitResult::from_eta(Vec::new())
    } else {
        fit_eta(&demod, &p_pred, 1, &times)?
    };
    let exact = FitResult::from_eta(exact_eta(&base, cfg.d, cfg.t1)?);
    write_json(&cfg.out.join("fit.json"), &fitted.to_json())?;

    let y_exact = filter_modulated(&window, cfg.theta_mod, n, &p_filt, &exact)?;
    let y_fitted = filter_modulated(&window, cfg.theta_mod, n, &p_filt, &fitted)?;
    let ideal = ideal_filter_oracle(&base, cfg.cutoff)?;
    let ideal = crate::signals::demodulate(&ideal, cfg.theta_mod)?;

    // outputs cover t₁..t₁+N-1; rotate so index 0 is t = 0
    let as_period = |y: &[Complex64]| -> Result<PeriodicSignal> {
        let mut v = y.to_vec();
        v.rotate_right(cfg.t1.rem_euclid(n as i64) as usize);
        PeriodicSignal::new(v)
    };
    let spec_in = x_hat.spectrum();
    let spec_exact = as_period(&y_exact)?.spectrum();
    let spec_fitted = as_period(&y_fitted)?.spectrum();
    let spec_ideal = ideal.spectrum();
    let scale = 1.0 / (n as f64).sqrt();
    let mut rows = Vec::with_capacity(n);
    for j in 0..n {
        let omega = bin_frequency(j, n);
        rows.push(AttenuationRow {
            j,
            omega,
            input: spec_in[j].norm() * scale,
            output_exact: spec_exact[j].norm() * scale,
            output_fitted: spec_fitted[j].norm() * scale,
            ideal: spec_ideal[j].norm() * scale,
            suppressed: wrap_angle(omega - cfg.theta_mod).abs() < cfg.cutoff,
        });
    }
    write_csv(&cfg.out.join("attenuation.csv"), &rows)?;

    let norm = x_hat.norm();
    let gap_max = |f: fn(&AttenuationRow) -> f64| {
        rows.iter().filter(|r| r.suppressed).map(f).fold(0.0, f64::max)
    };
    let gap_exact = gap_max(|r| r.output_exact);
    let gap_fitted = gap_max(|r| r.output_fitted);
    let bound = filt_sup * norm + 1e-8;
    let deviation = |y: &[Complex64]| {
        y.iter()
            .zip(window.times())
            .map(|(v, t)| (v - ideal.at(t)).norm())
            .fold(0.0, f64::max)
    };
    let state_error = fitted
        .eta
        .iter()
        .zip(&exact.eta)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let kappa = state_sensitivity(&build_rows(&demod, cfg.d), &p_filt.padded(cfg.d)?)?;
    let summary = json!({
        "N": n,
        "gap": cfg.gap,
        "cutoff": cfg.cutoff,
        "d": cfg.d,
        "dbar": cfg.dbar,
        "thetaMod": cfg.theta_mod,
        "seed": cfg.seed,
        "epsFilt": filt_sup,
        "filterL2Error": filt_l2,
        "epsPred": pred_report.l2_error,
        "norm": norm,
        "gapMaxExactEta": gap_exact,
        "gapMaxFittedEta": gap_fitted,
        "bound": bound,
        "exactWithinBound": gap_exact <= bound,
        "maxDeviationExactEta": deviation(&y_exact),
        "maxDeviationFittedEta": deviation(&y_fitted),
        "stateError": state_error,
        "stateSensitivity": kappa,
        "fitCond": fitted.condition_number,
    });
    write_json(&cfg.out.join("summary.json"), &summary)?;
    Ok(format!(
        "filter: suppressed-band magnitude {gap_exact:.3e} with exact state, {gap_fitted:.3e} with fitted state (bound ε_filt‖x‖ = {bound:.3e})"
    ))
}

/// Validated parameters of `expcoeffs`.
#[derive(Debug, Clone)]
pub struct ExpConfig {
    pub eps: f64,
    pub gap: f64,
    pub horizon: u32,
    pub nu: Option<f64>,
    pub d: Option<usize>,
    pub grid: usize,
    pub out: PathBuf,
}

impl TryFrom<&ExpArgs> for ExpConfig {
    type Error = Error;

    fn try_from(a: &ExpArgs) -> Result<Self> {
        ApproximationTarget::predictor(a.horizon, a.gap)?;
        if !(a.eps > 0.0 && a.eps < 1.0) {
            return Err(invalid("eps", format!("error budget {} not in (0, 1)", a.eps)));
        }
        if let Some(nu) = a.nu {
            if nu.is_nan() || nu >= 0.0 {
                return Err(invalid("nu", format!("ν must be negative, got {nu}")));
            }
        }
        if a.d == Some(0) {
            return Err(invalid("d", "the exponential predictor needs d ≥ 1"));
        }
        if a.horizon == 0 {
            return Err(invalid("T", "horizon must be at least 1"));
        }
        check_grid(a.grid)?;
        Ok(Self {
            eps: a.eps,
            gap: a.gap,
            horizon: a.horizon,
            nu: a.nu,
            d: a.d,
            grid: a.grid,
            out: a.out.clone(),
        })
    }
}

pub fn cmd_expcoeffs(cfg: &ExpConfig) -> Result<String> {
    prepare_out(&cfg.out)?;
    let selected = select_nu_and_d(cfg.eps, cfg.gap)?;
    let nu = cfg.nu.unwrap_or(selected.nu);
    let d = cfg.d.unwrap_or(selected.degree);
    let base = exponential_predictor(nu, d)?;
    let p = predictor_power(&base, cfg.horizon);
    let grid = make_grid(cfg.gap, cfg.grid)?;
    let one_step = ApproximationTarget::predictor(1, cfg.gap)?;
    let target = ApproximationTarget::predictor(cfg.horizon, cfg.gap)?;
    let (_, base_sup) = evaluate_design(&base, &one_step, &grid)?;
    let (l2, sup) = evaluate_design(&p, &target, &grid)?;
    // |p^T - z^T| ≤ T (1 + e)^{T-1} e for a one-step error e ≤ ε
    let t = cfg.horizon as f64;
    let e = cfg.eps;
    let budget = t * (1.0 + e).powf(t - 1.0) * e;
    write_poly(&cfg.out.join("coeffs.json"), &p, Some(target))?;
    write_json(
        &cfg.out.join("summary.json"),
        &json!({
            "eps": cfg.eps,
            "gap": cfg.gap,
            "T": cfg.horizon,
            "nu": nu,
            "d": d,
            "selected": selected,
            "oneStepSupError": base_sup,
            "supError": sup,
            "l2Error": l2,
            "budget": budget,
            "withinBudget": sup <= budget,
        }),
    )?;
    Ok(format!(
        "expcoeffs: ν = {nu:.6}, d = {d}, sup error {sup:.6e} vs budget {budget:.6e} ({})",
        if sup <= budget { "met" } else { "not met" }
    ))
}
