//! `levy-ig` subcommands. Exit codes: 0 success, 1 numerical/domain/input
//! failure (JSON error object on stdout), 2 usage error (message on stderr).

use std::ffi::OsString;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use levy_ig_core::divergence::{alpha_divergence, DivergenceRequest, Method, MethodPreference};
use levy_ig_core::geometry::{
    alpha_connection, connection_from_divergence, fisher_metric, jeffreys_prior,
    metric_from_divergence, superharmonic_scan, CoordinateChart, RangePolicy, RhoKind, RhoSpec,
};
use levy_ig_core::inference::{fit, simulate, BenchmarkConfig, FitOptions, LikelihoodOptions};
use levy_ig_core::levy::{check_equivalence, Family, LevyModel};
use levy_ig_core::models::{closed_form_alpha_connection, closed_form_fisher_metric};
use levy_ig_core::QuadratureConfig;
use serde_json::{json, Value};

use crate::bench::{parallel_bias_benchmark, report_json, threads_from_env};
use crate::error::{Error, Result};
use crate::json::{self, num, nums};
use crate::model_file::load_model;
use crate::samples::SampleFile;

#[derive(Debug, Parser)]
#[command(
    name = "levy-ig",
    version,
    about = "Information geometry of Lévy processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; `csv` is available for `simulate` (its default) and `prior-scan`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DivergenceMethod {
    Auto,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum GeometryMethod {
    ClosedForm,
    Quadrature,
    FiniteDiff,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum RhoName {
    PowerPlus,
    PowerMinus,
    LinearCombo,
    Product,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Model file of P.
    #[arg(long)]
    pub p: PathBuf,
    /// Model file of Q.
    #[arg(long)]
    pub q: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// α-divergence D(P‖Q) over horizon T.
    Divergence {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long = "T", value_name = "T", default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, value_enum, default_value_t = DivergenceMethod::Auto)]
        method: DivergenceMethod,
        /// Use the martingale (risk-neutral) form of the drift term.
        #[arg(long)]
        martingale_form: bool,
    },
    /// Fisher metric on the (λ+, λ-) chart.
    Metric {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "T", value_name = "T", default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, value_enum, default_value_t = GeometryMethod::All)]
        method: GeometryMethod,
        /// α of the divergence differentiated by `finite_diff`.
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        alpha: f64,
        /// Relative finite-difference step.
        #[arg(long)]
        step: Option<f64>,
    },
    /// α-connection on the (λ+, λ-) chart.
    Connection {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long = "T", value_name = "T", default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, value_enum, default_value_t = GeometryMethod::All)]
        method: GeometryMethod,
        #[arg(long)]
        step: Option<f64>,
    },
    /// Unnormalized Jeffreys prior √det g.
    Jeffreys {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "T", value_name = "T", default_value_t = 1.0)]
        horizon: f64,
    },
    /// Laplace–Beltrami of a candidate prior ρ over a (λ+, λ-) grid.
    PriorScan {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum)]
        rho: RhoName,
        #[arg(long, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value_t = 1.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        /// Values used for both λ+ and λ-.
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,4")]
        grid: Vec<f64>,
        #[arg(long = "T", value_name = "T", default_value_t = 1.0)]
        horizon: f64,
        /// Evaluate even when k is outside the stated range.
        #[arg(long)]
        report_only: bool,
    },
    /// Draw increments X_t by inverse-CDF sampling of the FFT density.
    Simulate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "t", value_name = "t")]
        t: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Plain or Jeffreys-penalized maximum likelihood for (λ+, λ-).
    Fit {
        /// Template model; its λ± are the starting point unless --init is given.
        #[arg(long)]
        model: PathBuf,
        /// Sample file.
        #[arg(long)]
        data: PathBuf,
        /// Increment horizon; defaults to the sample file's t.
        #[arg(long = "t", value_name = "t")]
        t: Option<f64>,
        #[arg(long)]
        penalized: bool,
        /// Horizon of the Jeffreys prior; defaults to t·n.
        #[arg(long = "T", value_name = "T")]
        horizon: Option<f64>,
        /// Starting point `λ+,λ-`.
        #[arg(long, value_parser = parse_pair)]
        init: Option<(f64, f64)>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1 << 13)]
        n_points: usize,
    },
    /// Bias of plain vs penalized estimates over simulated replicates.
    BiasBench {
        /// Model at the true parameters.
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        replicates: usize,
        #[arg(long = "t", value_name = "t", default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "T", value_name = "T")]
        horizon: Option<f64>,
    },
    /// Equivalence of P and Q (Sato's conditions).
    CheckEquiv {
        #[command(flatten)]
        pair: PairArgs,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Divergence { .. } => "divergence",
            Command::Metric { .. } => "metric",
            Command::Connection { .. } => "connection",
            Command::Jeffreys { .. } => "jeffreys",
            Command::PriorScan { .. } => "prior-scan",
            Command::Simulate { .. } => "simulate",
            Command::Fit { .. } => "fit",
            Command::BiasBench { .. } => "bias-bench",
            Command::CheckEquiv { .. } => "check-equiv",
        }
    }

    fn supports_csv(&self) -> bool {
        matches!(self, Command::Simulate { .. } | Command::PriorScan { .. })
    }
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    match s.split_once(',') {
        Some((a, b)) => Ok((parse(a)?, parse(b)?)),
        None => Err("expected two comma-separated numbers".into()),
    }
}

enum Output {
    Json(Value),
    Text(String),
}

/// Parses `args` (program name first), runs the command and writes results
/// and diagnostics to `out` and `err`. Returns the process exit code.
pub fn run<I, T, O, E>(args: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    2
                }
            };
        }
    };
    let name = cli.command.name();
    if cli.format == Some(Format::Csv) && !cli.command.supports_csv() {
        let _ = writeln!(
            err,
            "error: --format csv is not available for `{name}`; use json"
        );
        return 2;
    }
    let result = execute(&cli).and_then(|o| {
        let text = match o {
            Output::Json(v) => json::to_string(&v),
            Output::Text(s) => s,
        };
        match &cli.output {
            Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
            None => out
                .write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e)),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let mut context = e.details();
            context["command"] = name.into();
            let obj = json!({ "code": e.code(), "message": e.to_string(), "context": context });
            let _ = out.write_all(json::to_string(&obj).as_bytes());
            1
        }
    }
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn model(path: &Path) -> Result<LevyModel> {
    load_model(path, &cfg())
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::ClosedForm => "closed_form",
        Method::Quadrature => "quadrature",
    }
}

/// Closed forms exist for named families without a diffusion part.
fn has_closed_form(m: &LevyModel) -> bool {
    m.sigma() == 0.0 && m.measure().family() != Family::Generic
}

fn max_pairwise(devs: impl IntoIterator<Item = f64>) -> Value {
    devs.into_iter()
        .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))))
        .map_or(Value::Null, num)
}

fn execute(cli: &Cli) -> Result<Output> {
    let q = cfg();
    let value = match &cli.command {
        Command::Divergence {
            pair,
            alpha,
            horizon,
            method,
            martingale_form,
        } => {
            let (p, qm) = (model(&pair.p)?, model(&pair.q)?);
            let pref = match method {
                DivergenceMethod::Auto => MethodPreference::Auto,
                DivergenceMethod::Quadrature => MethodPreference::Quadrature,
            };
            let req = DivergenceRequest::new(*alpha, *horizon)
                .with_method(pref)
                .with_martingale_form(*martingale_form);
            let r = alpha_divergence(&p, &qm, &req)?;
            json!({
                "value": num(r.value),
                "delta": num(r.delta),
                "drift_term": num(r.drift_term),
                "jump_term": num(r.jump_term),
                "method": method_name(r.method),
                "abs_error": num(r.abs_error),
            })
        }
        Command::Metric {
            model: path,
            horizon,
            method,
            alpha,
            step,
        } => {
            let m = model(path)?;
            let chart = CoordinateChart::lambda(m.measure())?;
            let want = |g: GeometryMethod| *method == g || *method == GeometryMethod::All;
            let closed = if want(GeometryMethod::ClosedForm)
                && (has_closed_form(&m) || *method != GeometryMethod::All)
            {
                Some(closed_form_fisher_metric(m.measure(), *horizon)?)
            } else {
                None
            };
            let quad = if want(GeometryMethod::Quadrature) {
                Some(fisher_metric(&m, &chart, *horizon, &q)?)
            } else {
                None
            };
            let fd = if want(GeometryMethod::FiniteDiff) {
                Some(metric_from_divergence(
                    &m,
                    &chart,
                    *alpha,
                    *horizon,
                    *step,
                    &q,
                    MethodPreference::Auto,
                )?)
            } else {
                None
            };
            let all = [&closed, &quad, &fd];
            let mut devs = Vec::new();
            for i in 0..3 {
                for j in i + 1..3 {
                    if let (Some(a), Some(b)) = (all[i], all[j]) {
                        devs.push(a.max_relative_deviation(b).max(b.max_relative_deviation(a)));
                    }
                }
            }
            let show = |g: &Option<levy_ig_core::geometry::MetricMatrix>| {
                g.as_ref().map_or(Value::Null, |g| json::matrix(&g.rows()))
            };
            let mut v = json!({
                "coordinates": chart.names().iter().map(|c| c.name()).collect::<Vec<_>>(),
                "T": num(*horizon),
            });
            for (key, g, on) in [
                ("closed_form", &closed, GeometryMethod::ClosedForm),
                ("quadrature", &quad, GeometryMethod::Quadrature),
                ("finite_diff", &fd, GeometryMethod::FiniteDiff),
            ] {
                if want(on) {
                    v[key] = show(g);
                }
            }
            if *method == GeometryMethod::All {
                v["max_pairwise_relative_deviation"] = max_pairwise(devs);
            }
            v
        }
        Command::Connection {
            model: path,
            alpha,
            horizon,
            method,
            step,
        } => {
            let m = model(path)?;
            let chart = CoordinateChart::lambda(m.measure())?;
            let want = |g: GeometryMethod| *method == g || *method == GeometryMethod::All;
            let closed = if want(GeometryMethod::ClosedForm)
                && (has_closed_form(&m) || *method != GeometryMethod::All)
            {
                Some(closed_form_alpha_connection(m.measure(), *alpha, *horizon)?)
            } else {
                None
            };
            let quad = if want(GeometryMethod::Quadrature) {
                Some(alpha_connection(&m, &chart, *alpha, *horizon, &q)?)
            } else {
                None
            };
            let fd = if want(GeometryMethod::FiniteDiff) {
                Some(connection_from_divergence(
                    &m,
                    &chart,
                    *alpha,
                    *horizon,
                    *step,
                    &q,
                    MethodPreference::Auto,
                )?)
            } else {
                None
            };
            let all = [&closed, &quad, &fd];
            let mut devs = Vec::new();
            for i in 0..3 {
                for j in i + 1..3 {
                    if let (Some(a), Some(b)) = (all[i], all[j]) {
                        devs.push(a.max_relative_deviation(b).max(b.max_relative_deviation(a)));
                    }
                }
            }
            let show = |t: &Option<levy_ig_core::geometry::ConnectionTensor>| {
                t.as_ref().map_or(Value::Null, |t| {
                    Value::Array(t.to_nested().iter().map(|m| json::matrix(m)).collect())
                })
            };
            let mut v = json!({
                "coordinates": chart.names().iter().map(|c| c.name()).collect::<Vec<_>>(),
                "alpha": num(*alpha),
                "T": num(*horizon),
            });
            for (key, t, on) in [
                ("closed_form", &closed, GeometryMethod::ClosedForm),
                ("quadrature", &quad, GeometryMethod::Quadrature),
                ("finite_diff", &fd, GeometryMethod::FiniteDiff),
            ] {
                if want(on) {
                    v[key] = show(t);
                }
            }
            if *method == GeometryMethod::All {
                v["max_pairwise_relative_deviation"] = max_pairwise(devs);
            }
            v
        }
        Command::Jeffreys {
            model: path,
            horizon,
        } => {
            let m = model(path)?;
            let chart = CoordinateChart::lambda(m.measure())?;
            let j = jeffreys_prior(&m, &chart, *horizon, &q)?;
            json!({ "value": num(j), "log_value": num(j.ln()), "T": num(*horizon) })
        }
        Command::PriorScan {
            model: path,
            rho,
            k,
            c1,
            c2,
            grid,
            horizon,
            report_only,
        } => {
            let m = model(path)?;
            let kind = match rho {
                RhoName::PowerPlus => RhoKind::PowerPlus,
                RhoName::PowerMinus => RhoKind::PowerMinus,
                RhoName::LinearCombo => RhoKind::LinearCombo { c1: *c1, c2: *c2 },
                RhoName::Product => RhoKind::Product,
            };
            let spec = RhoSpec::new(kind, *k)?;
            let points: Vec<(f64, f64)> = grid
                .iter()
                .flat_map(|&a| grid.iter().map(move |&b| (a, b)))
                .collect();
            let policy = if *report_only {
                RangePolicy::ReportOnly
            } else {
                RangePolicy::Enforce
            };
            let r = superharmonic_scan(m.measure(), &points, &spec, *horizon, policy)?;
            if cli.format == Some(Format::Csv) {
                let mut s = String::from("lambda_plus,lambda_minus,laplacian\n");
                for ((lp, lm), v) in &r.values {
                    s.push_str(&format!("{lp:.16e},{lm:.16e},{v:.16e}\n"));
                }
                return Ok(Output::Text(s));
            }
            json!({
                "all_negative": r.all_negative,
                "worst_point": nums(&[r.worst_point.0, r.worst_point.1]),
                "worst_value": num(r.worst_value),
                "k_in_stated_range": r.k_in_stated_range,
                "values": r.values.iter().map(|((lp, lm), v)| json!({
                    "lambda_plus": num(*lp), "lambda_minus": num(*lm), "value": num(*v),
                })).collect::<Vec<_>>(),
            })
        }
        Command::Simulate {
            model: path,
            t,
            n,
            seed,
        } => {
            let m = model(path)?;
            let set = simulate(&m, *t, *n, *seed, &q)?;
            let file = SampleFile::from_set(&set, m.measure().family().name());
            if cli.format != Some(Format::Json) {
                let mut buf = Vec::new();
                file.write(&mut buf).map_err(|e| Error::io("<buffer>", e))?;
                return Ok(Output::Text(String::from_utf8(buf).expect("ascii output")));
            }
            json!({
                "family": file.family,
                "model": set.model,
                "t": num(set.t),
                "seed": set.seed,
                "values": nums(&set.values),
            })
        }
        Command::Fit {
            model: path,
            data,
            t,
            penalized,
            horizon,
            init,
            seed,
            n_points,
        } => {
            let m = model(path)?;
            let file = std::fs::File::open(data).map_err(|e| Error::io(data, e))?;
            let samples = SampleFile::read(BufReader::new(file))?;
            let t = t.unwrap_or(samples.t);
            let start = match init {
                Some(v) => *v,
                None => m
                    .measure()
                    .lambdas()
                    .ok_or(levy_ig_core::Error::UnsupportedCoordinate("lambda_plus"))?,
            };
            let opts = FitOptions {
                penalized: *penalized,
                seed: *seed,
                prior_horizon: *horizon,
                likelihood: LikelihoodOptions {
                    n_points: *n_points,
                    ..LikelihoodOptions::default()
                },
                ..FitOptions::default()
            };
            let r = fit(&m, &samples.values, t, start, &opts)?;
            json!({
                "estimates": { "lambda_plus": num(r.estimates.0), "lambda_minus": num(r.estimates.1) },
                "objective": num(r.objective),
                "iterations": r.iterations,
                "converged": r.converged,
                "penalized": r.penalized,
                "gradient_residual": num(r.gradient_residual),
                "n": samples.values.len(),
                "t": num(t),
            })
        }
        Command::BiasBench {
            model: path,
            n,
            replicates,
            t,
            seed,
            horizon,
        } => {
            let threads = threads_from_env()?;
            let cfg = BenchmarkConfig {
                truth: model(path)?,
                t: *t,
                n_per_replicate: *n,
                replicates: *replicates,
                seed: *seed,
                fit: FitOptions {
                    prior_horizon: *horizon,
                    ..FitOptions::default()
                },
            };
            report_json(&parallel_bias_benchmark(&cfg, threads)?)
        }
        Command::CheckEquiv { pair } => {
            let (p, qm) = (model(&pair.p)?, model(&pair.q)?);
            let r = check_equivalence(&p, &qm, &q)?;
            json!({
                "equivalent": r.equivalent,
                "sigma_match": r.sigma_match,
                "hellinger_integral": num(r.hellinger_integral),
                "hellinger_finite": r.hellinger_finite,
                "absolutely_continuous": r.absolutely_continuous,
                "drift_condition_residual": r.drift_condition_residual.map_or(Value::Null, num),
                "reasons": r.reasons,
            })
        }
    };
    Ok(Output::Json(value))
}
