//! Command-line front end: argument definitions, the three subcommands and
//! their output formats.
//!
//! Every number is printed with 17 significant digits so that it parses
//! back to the same double. The `record` format is a small TOML subset
//! (tables, arrays of tables, scalar and float-array values); optional
//! values that are undefined are omitted rather than written as a
//! sentinel.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::calibration::{self, ShootingOptions, DEFAULT_WINDOW, MAX_FIT_POINTS};
use crate::error::{Error, Result};
use crate::freud::{self, CoeffSequence};
use crate::oracle::{self, scaled_difference};
use crate::quadrature::QuadratureSpec;
use crate::szego::{self, phase_distance};
use crate::tail_fit::{self, TailSample};
use crate::weights::{classical_an_sq, WeightModel, WeightParams};

#[derive(Debug, Parser)]
#[command(name = "genjacobi", version, about = "Recurrence coefficients of generalized Jacobi weights")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate ã_n², a_n and b_n up to N.
    Coeffs(CoeffsArgs),
    /// Fit the tail of ã_n² - 1/4 and compare with the predicted constants.
    Fit(FitArgs),
    /// Run the closed-form and oracle cross-checks; exit status 1 on failure.
    Verify(VerifyArgs),
}

/// `w(x) = B (1-x)^α |x0-x|^γ (1+x)^β` left of x0, with `A` right of it.
#[derive(Debug, Clone, Args)]
pub struct WeightArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x0: f64,
    /// Scale right of x0.
    #[arg(long = "A", default_value_t = 1.0)]
    pub a: f64,
    /// Scale left of x0.
    #[arg(long = "B", default_value_t = 1.0)]
    pub b: f64,
    /// Requested λ = log(B/A)/(2π). Overrides --A/--B: the starting value
    /// is then found by shooting instead of from the weight's moments.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Record,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub weight: WeightArgs,
    /// Largest index of ã_n².
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub weight: WeightArgs,
    /// Length of the computed sequence.
    #[arg(long, default_value_t = 200_000)]
    pub n: usize,
    /// Share of the sequence, counted from its end, used for fitting.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: f64,
    /// Fit y_n read from this file (two columns n, y_n; header optional)
    /// instead of computing the sequence.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Compare against the oracle on the five-point parameter grid.
    #[arg(long)]
    pub grid: bool,
    /// Shift every starting value by 1e-6 so that the checks must fail
    /// (exercises the failure path).
    #[arg(long)]
    pub perturb: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Where the starting value comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Calibration {
    Weights(WeightParams),
    Lambda(f64),
}

/// Validated settings shared by `coeffs` and `fit`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub x0: f64,
    pub calibration: Calibration,
    pub n: usize,
    pub window_fraction: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(weight: &WeightArgs, n: usize, window_fraction: f64, output: &OutputArgs) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain("N must be at least 1".into()));
        }
        if !(window_fraction > 0.0 && window_fraction < 1.0) {
            return Err(Error::Domain(format!(
                "window fraction {window_fraction} must lie in (0, 1)"
            )));
        }
        let calibration = match weight.lambda {
            Some(l) => Calibration::Lambda(l),
            None => Calibration::Weights(
                WeightParams::new(weight.alpha, weight.beta, weight.gamma, weight.x0, weight.a, weight.b)
                    .validate()?,
            ),
        };
        let model = WeightModel::with_lambda(weight.alpha, weight.beta, weight.gamma, weight.x0, 0.0)?;
        Ok(Self {
            alpha: model.alpha,
            beta: model.beta,
            gamma: model.gamma,
            x0: model.x0,
            calibration,
            n,
            window_fraction,
            format: output.format,
            out: output.out.clone(),
        })
    }

    /// The model and `ã_1²`.
    pub fn calibrate(&self) -> Result<(WeightModel, f64)> {
        match self.calibration {
            Calibration::Weights(p) => calibration::calibrate(&p, &QuadratureSpec::default()),
            Calibration::Lambda(l) => {
                let m = WeightModel::with_lambda(self.alpha, self.beta, self.gamma, self.x0, l)?;
                let a1 = calibration::solve_a1_for_lambda(&m, &ShootingOptions::default())?;
                Ok((m, a1))
            }
        }
    }
}

/// Text produced by a subcommand and whether it succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let (outcome, out) = match &cli.command {
        Command::Coeffs(a) => {
            let cfg = RunConfig::new(&a.weight, a.n, DEFAULT_WINDOW, &a.output)?;
            (cmd_coeffs(&cfg)?, a.output.out.clone())
        }
        Command::Fit(a) => {
            let cfg = RunConfig::new(&a.weight, a.n, a.window, &a.output)?;
            let text = match &a.input {
                Some(path) => cmd_fit_input(&cfg, path)?,
                None => cmd_fit(&cfg)?,
            };
            (Outcome { text, success: true }, a.output.out.clone())
        }
        Command::Verify(a) => (cmd_verify(a)?, a.output.out.clone()),
    };
    if let Some(path) = out {
        fs::write(&path, &outcome.text)
            .map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))?;
        return Ok(Outcome {
            text: String::new(),
            ..outcome
        });
    }
    Ok(outcome)
}

/// 17 significant digits; `nan`/`inf` spelled as TOML expects.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Key/value report rendered either as `section,key,value` rows or as
/// TOML tables.
#[derive(Debug, Default)]
struct Report {
    sections: Vec<(String, Vec<(String, String)>)>,
}

impl Report {
    fn section(&mut self, name: &str) -> &mut Self {
        self.sections.push((name.to_string(), Vec::new()));
        self
    }

    fn put(&mut self, key: &str, value: String) -> &mut Self {
        self.sections
            .last_mut()
            .expect("section opened before values")
            .1
            .push((key.to_string(), value));
        self
    }

    fn float(&mut self, key: &str, v: f64) -> &mut Self {
        self.put(key, fmt_f64(v))
    }

    fn opt_float(&mut self, key: &str, v: Option<f64>) -> &mut Self {
        match v {
            Some(v) => self.float(key, v),
            None => self,
        }
    }

    fn int(&mut self, key: &str, v: usize) -> &mut Self {
        self.put(key, v.to_string())
    }

    fn flag(&mut self, key: &str, v: bool) -> &mut Self {
        self.put(key, v.to_string())
    }

    fn text(&mut self, key: &str, v: &str) -> &mut Self {
        self.put(key, format!("\"{v}\""))
    }

    fn render(&self, format: Format) -> String {
        let mut s = String::new();
        match format {
            Format::Csv => {
                s.push_str("section,key,value\n");
                for (name, kv) in &self.sections {
                    for (k, v) in kv {
                        let _ = writeln!(s, "{name},{k},{}", v.trim_matches('"'));
                    }
                }
            }
            Format::Record => {
                for (i, (name, kv)) in self.sections.iter().enumerate() {
                    if i > 0 {
                        s.push('\n');
                    }
                    let _ = writeln!(s, "[{name}]");
                    for (k, v) in kv {
                        let _ = writeln!(s, "{k} = {v}");
                    }
                }
            }
        }
        s
    }
}

fn weight_section(report: &mut Report, cfg: &RunConfig, model: &WeightModel, a1_sq: f64) {
    report
        .section("weight")
        .float("alpha", cfg.alpha)
        .float("beta", cfg.beta)
        .float("gamma", cfg.gamma)
        .float("x0", cfg.x0);
    match cfg.calibration {
        Calibration::Weights(p) => {
            report.float("A", p.a).float("B", p.b);
        }
        Calibration::Lambda(_) => {}
    }
    report.float("lambda", model.lambda);
    report
        .section("calibration")
        .text(
            "source",
            match cfg.calibration {
                Calibration::Weights(_) => "weights",
                Calibration::Lambda(_) => "lambda",
            },
        )
        .float("a1_sq", a1_sq);
}

/// Rows `(n, ã_n², a_n, b_n)`; `a_n`, `b_n` are left empty beyond the
/// contracted range.
pub fn cmd_coeffs(cfg: &RunConfig) -> Result<Outcome> {
    let (model, a1) = cfg.calibrate()?;
    let seq = freud::run(&model, a1, cfg.n)?;
    let c = seq.contract();
    let mut s = String::new();
    match cfg.format {
        Format::Csv => {
            s.push_str("n,a_tilde_sq,a,b\n");
            for (n, v) in seq.a_tilde_sq().iter().enumerate() {
                let a = c.a.get(n).map(|&x| fmt_f64(x)).unwrap_or_default();
                let b = c.b.get(n).map(|&x| fmt_f64(x)).unwrap_or_default();
                let _ = writeln!(s, "{n},{},{a},{b}", fmt_f64(*v));
            }
        }
        Format::Record => {
            let mut report = Report::default();
            weight_section(&mut report, cfg, &model, a1);
            report.section("run").int("n", cfg.n).int("contracted_n", c.last_index());
            s = report.render(Format::Record);
            let array = |xs: &[f64]| xs.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(", ");
            let _ = write!(
                s,
                "\n[coefficients]\na_tilde_sq = [{}]\na = [{}]\nb = [{}]\n",
                array(seq.a_tilde_sq()),
                array(&c.a),
                array(&c.b)
            );
        }
    }
    Ok(Outcome { text: s, success: true })
}

/// Fit of the computed tail against the predicted constants.
pub fn cmd_fit(cfg: &RunConfig) -> Result<String> {
    if cfg.n < 10_000 {
        return Err(Error::Domain(format!("fit needs N >= 10000, got {}", cfg.n)));
    }
    let (model, a1) = cfg.calibrate()?;
    let seq = freud::run(&model, a1, cfg.n)?;
    let mut report = Report::default();
    weight_section(&mut report, cfg, &model, a1);
    report.section("run").int("n", cfg.n).float("window", cfg.window_fraction);
    fit_report(&mut report, &seq, cfg.window_fraction)?;
    Ok(report.render(cfg.format))
}

fn fit_report(report: &mut Report, seq: &CoeffSequence, window: f64) -> Result<()> {
    let model = &seq.model;
    let xi = calibration::xi_estimate_detailed(seq, window)?;
    let eta = calibration::eta_estimate(seq, window)?;
    let lambda_hat = calibration::lambda_from_xi(model, xi.value)?;
    let sample = TailSample::from_window(seq, window, MAX_FIT_POINTS)?;
    let fit = tail_fit::fit_tail(&sample, model.beta, model.theta0, model.lambda)?;
    let sz = szego::kappa_ratios(model);
    let pred = szego::conjecture_constants(model)?;
    let cmp = tail_fit::compare(&fit, &pred, model.beta);

    report
        .section("estimate")
        .float("lambda", lambda_hat)
        .float("xi", xi.value)
        .float("eta", eta.value)
        .float("k", fit.k_hat)
        .float("phi", fit.phi_hat)
        .float("c_alt", fit.c_alt)
        .float("rms", fit.rms_residual)
        .float("condition", fit.condition)
        .int("points", sample.len())
        .float("max_scaled_y", sample.scaled_bound());
    report
        .section("prediction")
        .float("kappa1", sz.kappa1)
        .float("kappa2", sz.kappa2)
        .float("xi", sz.xi)
        .float("eta", sz.eta)
        .float("k", pred.k)
        .opt_float("phi", pred.phi)
        .float("c_alt", -(model.beta + 0.5) / 2.0)
        .float("m", pred.m)
        .opt_float("big_phi", pred.big_phi);
    report
        .section("delta")
        .float("lambda", lambda_hat - model.lambda)
        .float("xi", xi.value - sz.xi)
        .float("eta", eta.value - sz.eta)
        .opt_float("k_rel", cmp.amplitude_rel_error)
        .opt_float("phi", cmp.phase_error)
        .float("c_alt", cmp.alt_error);
    report
        .section("flags")
        .flag("amplitude_consistent_with_zero", cmp.amplitude_consistent_with_zero);
    Ok(())
}

/// Reads `n, y_n` pairs; a first row that does not parse as numbers is
/// taken as a header.
pub fn read_tail_file(path: &Path) -> Result<TailSample> {
    let bad = |e: &dyn std::fmt::Display| Error::Input(format!("{}: {e}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| bad(&e))?;
    let mut indices = Vec::new();
    let mut ys = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(&e))?;
        if record.len() != 2 {
            return Err(bad(&format!("row {} has {} columns, expected 2", row + 1, record.len())));
        }
        match (record[0].parse::<usize>(), record[1].parse::<f64>()) {
            (Ok(n), Ok(y)) => {
                indices.push(n);
                ys.push(y);
            }
            _ if row == 0 => continue,
            _ => return Err(bad(&format!("row {} is not numeric", row + 1))),
        }
    }
    TailSample::new(indices, ys)
}

/// Fit of externally supplied `y_n` with `β`, `θ0` and λ from the flags.
pub fn cmd_fit_input(cfg: &RunConfig, path: &Path) -> Result<String> {
    let model = match cfg.calibration {
        Calibration::Weights(p) => WeightModel::from_weight(&p)?,
        Calibration::Lambda(l) => WeightModel::with_lambda(cfg.alpha, cfg.beta, cfg.gamma, cfg.x0, l)?,
    };
    let sample = read_tail_file(path)?;
    let fit = tail_fit::fit_tail(&sample, model.beta, model.theta0, model.lambda)?;
    let pred = szego::conjecture_constants(&model)?;
    let cmp = tail_fit::compare(&fit, &pred, model.beta);
    let mut report = Report::default();
    report
        .section("weight")
        .float("alpha", model.alpha)
        .float("beta", model.beta)
        .float("gamma", model.gamma)
        .float("x0", model.x0)
        .float("lambda", model.lambda);
    report
        .section("input")
        .int("points", sample.len())
        .int("first_n", sample.indices()[0])
        .int("last_n", *sample.indices().last().expect("non-empty sample"));
    report
        .section("estimate")
        .float("k", fit.k_hat)
        .float("phi", fit.phi_hat)
        .float("c_alt", fit.c_alt)
        .float("rms", fit.rms_residual)
        .float("condition", fit.condition);
    report
        .section("prediction")
        .float("k", pred.k)
        .opt_float("phi", pred.phi)
        .float("c_alt", -(model.beta + 0.5) / 2.0);
    report
        .section("delta")
        .opt_float("k_rel", cmp.amplitude_rel_error)
        .opt_float("phi", cmp.phase_error)
        .float("c_alt", cmp.alt_error);
    report
        .section("flags")
        .flag("amplitude_consistent_with_zero", cmp.amplitude_consistent_with_zero);
    Ok(report.render(cfg.format))
}

/// One line of the verification report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, max_error: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: max_error <= tolerance,
            max_error,
            tolerance,
        }
    }
}

/// `(α, β, γ, x0, A, B)` points used for the oracle comparison.
pub const ORACLE_GRID: [[f64; 6]; 5] = [
    [0.3, -0.2, 0.7, 0.25, 1.0, 2.0],
    [0.0, 0.0, 1.0, 0.5, 1.0, 1.0],
    [-0.4, 0.5, 0.3, -0.6, 2.0, 1.0],
    [0.0, 0.0, 0.5, 0.5, 1.0, 3.0],
    [0.5, 0.5, 1.5, 0.0, 1.0, 1.0],
];
pub const ORACLE_DEGREE: usize = 30;
pub const ORACLE_TOL: f64 = 1e-8;

/// Largest scaled difference between the Freud pipeline and the oracle
/// for `n <= ORACLE_DEGREE`.
pub fn oracle_discrepancy(params: &WeightParams, a1_shift: f64) -> Result<f64> {
    let (model, a1) = calibration::calibrate(params, &QuadratureSpec::default())?;
    let freud = freud::run(&model, a1 + a1_shift, 2 * ORACLE_DEGREE + 1)?.contract();
    let reference = oracle::oracle_coeffs(params, ORACLE_DEGREE)?;
    let mut worst = 0.0f64;
    for n in 0..=ORACLE_DEGREE {
        worst = worst.max(scaled_difference(freud.b[n], reference.b[n]));
        if n >= 1 {
            worst = worst.max(scaled_difference(freud.a[n], reference.a[n]));
        }
    }
    Ok(worst)
}

fn closed_form_checks(shift: f64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let legendre = WeightModel::with_lambda(0.0, 0.0, 0.0, 0.0, 0.0)?;
    let c = freud::run(&legendre, 0.5 + shift, 2001)?.contract();
    let worst = (1..=1000)
        .map(|n| {
            let nf = n as f64;
            (c.a[n].powi(2) - nf * nf / (4.0 * nf * nf - 1.0))
                .abs()
                .max(c.b[n].abs())
        })
        .fold(0.0, f64::max);
    checks.push(Check::new("legendre_closed_form", worst, 1e-10));

    let cheb = WeightModel::with_lambda(-0.5, -0.5, 0.0, 0.3, 0.0)?;
    let seq = freud::run(&cheb, 0.5 + shift, 100_000)?;
    let worst = seq.a_tilde_sq()[2..]
        .iter()
        .map(|v| (v - 0.25).abs())
        .fold(0.0, f64::max);
    checks.push(Check::new("chebyshev_fixed_point", worst, 1e-12));

    let p = WeightParams::new(0.5, 0.5, 1.5, 0.0, 1.0, 1.0);
    let (m, a1) = calibration::calibrate(&p, &QuadratureSpec::default())?;
    let c = freud::run(&m, a1 + shift, 1001)?.contract();
    let mut worst = 0.0f64;
    for n in 1..=500 {
        worst = worst.max((c.a[n].powi(2) - classical_an_sq(n, 0.5, 1.5)?).abs());
    }
    checks.push(Check::new("symmetric_closed_form", worst, 1e-10));

    let p = WeightParams::new(0.3, -0.2, 0.7, 0.25, 1.0, 2.0);
    let (m, a1) = calibration::calibrate(&p, &QuadratureSpec::default())?;
    let seq = freud::run(&m, a1 + shift, 10_000)?;
    let seq = if shift != 0.0 { seq.perturbed(5_000, shift) } else { seq };
    let worst = (1..seq.last_index())
        .map(|n| seq.identity_residual(n).abs() / (n as f64).max(1.0))
        .fold(0.0, f64::max);
    checks.push(Check::new("freud_identity", worst, 1e-11));
    Ok(checks)
}

/// Runs the oracle comparisons concurrently; results keep grid order.
fn oracle_checks(points: &[[f64; 6]], shift: f64) -> Result<Vec<Check>> {
    let results: Vec<Result<f64>> = std::thread::scope(|s| {
        let handles: Vec<_> = points
            .iter()
            .map(|g| {
                s.spawn(move || {
                    oracle_discrepancy(&WeightParams::new(g[0], g[1], g[2], g[3], g[4], g[5]), shift)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("oracle worker panicked"))
            .collect()
    });
    points
        .iter()
        .zip(results)
        .map(|(g, r)| {
            let name = format!(
                "oracle(alpha={},beta={},gamma={},x0={},A={},B={})",
                g[0], g[1], g[2], g[3], g[4], g[5]
            );
            Ok(Check::new(name, r?, ORACLE_TOL))
        })
        .collect()
}

pub fn verify_checks(grid: bool, perturb: bool) -> Result<Vec<Check>> {
    let shift = if perturb { 1e-6 } else { 0.0 };
    let mut checks = closed_form_checks(shift)?;
    let points: &[[f64; 6]] = if grid { &ORACLE_GRID } else { &ORACLE_GRID[..1] };
    checks.extend(oracle_checks(points, shift)?);
    // the predicted phases must agree with the closed-form example
    let m = WeightModel::with_lambda(0.0, 0.0, 1.0, 0.5, 0.0)?;
    let (k, phi) = szego::predict_k_phi(&m)?;
    let err = (k - 0.25).abs().max(phi.map_or(f64::INFINITY, |p| phase_distance(p, std::f64::consts::PI)));
    checks.push(Check::new("predicted_constants", err, 1e-14));
    Ok(checks)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome> {
    let checks = verify_checks(args.grid, args.perturb)?;
    let success = checks.iter().all(|c| c.passed);
    let mut s = String::new();
    match args.output.format {
        Format::Csv => {
            s.push_str("check,passed,max_error,tolerance\n");
            for c in &checks {
                let _ = writeln!(
                    s,
                    "\"{}\",{},{},{}",
                    c.name,
                    c.passed,
                    fmt_f64(c.max_error),
                    fmt_f64(c.tolerance)
                );
            }
        }
        Format::Record => {
            let _ = writeln!(s, "[summary]\npassed = {success}\nchecks = {}", checks.len());
            for c in &checks {
                let _ = write!(
                    s,
                    "\n[[check]]\nname = \"{}\"\npassed = {}\nmax_error = {}\ntolerance = {}\n",
                    c.name,
                    c.passed,
                    fmt_f64(c.max_error),
                    fmt_f64(c.tolerance)
                );
            }
        }
    }
    Ok(Outcome { text: s, success })
}
