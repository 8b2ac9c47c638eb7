mod args;
mod output;

use std::ffi::OsString;
use std::io::Write;

use addlab::channels::parse_pair_spec;
use addlab::experiments::{
    additivity_gap, default_kink_grid, default_lambda_grid, exhw_certificate, kink_scan, operator_convex_suite,
    tensor_structure_check,
};
use addlab::functions::operator_convexity_test;
use addlab::optimize::{
    max_output_eigenvalue, max_trace_entangled, max_trace_product, max_trace_schmidt_wh3,
};
use addlab::werner::wh3_pair_spectrum;
use addlab::{ChannelPair, ConvexFunction, HermitianMatrix, OptimizerConfig, SchmidtVector};
use clap::{CommandFactory, Parser};
use serde::{Deserialize, Serialize};

use args::{Cli, Command, Format, Mode, OptimizerArgs, OutputArgs};
use output::{list, num, to_csv, to_json};

#[derive(Debug, thiserror::Error)]
enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn numerical(e: impl std::fmt::Display) -> Failure {
    Failure::Numerical(e.to_string())
}

/// Output of `spectrum`.
#[derive(Debug, Serialize, Deserialize)]
struct SpectrumReport {
    schmidt: SchmidtVector,
    e_values: Vec<f64>,
    g_values: Vec<f64>,
    t: f64,
    theta: f64,
    spectrum: Vec<f64>,
}

/// Output of `convexity`.
#[derive(Debug, Serialize, Deserialize)]
struct ConvexityReport {
    function_spec: String,
    dim: usize,
    samples: usize,
    passed: bool,
    worst_violation: f64,
    witness: (HermitianMatrix, HermitianMatrix),
}

/// A report ready for writing in either format.
struct Rendered {
    json: Vec<u8>,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    /// Set when a certifying computation did not converge.
    unconverged: bool,
}

impl Rendered {
    fn new<T: Serialize>(value: &T, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Result<Self, Failure> {
        Ok(Rendered {
            json: to_json(value).map_err(numerical)?,
            header,
            rows,
            unconverged: false,
        })
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| usage(format!("bad number `{s}` in {what}"))))
        .collect()
}

fn parse_function(spec: &str) -> Result<ConvexFunction, Failure> {
    ConvexFunction::parse(spec).map_err(usage)
}

fn parse_pair(spec: &str) -> Result<ChannelPair, Failure> {
    parse_pair_spec(spec).map_err(usage)
}

fn config(a: &OptimizerArgs) -> Result<OptimizerConfig, Failure> {
    let cfg = OptimizerConfig {
        restarts: a.restarts,
        max_iters: a.max_iters,
        tol: a.tol,
        seed: a.seed,
        simplex_grid: a.grid,
    };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn schmidt_cell(s: &Option<SchmidtVector>) -> String {
    s.as_ref().map(|s| list(s.values())).unwrap_or_default()
}

fn run_command(command: &Command) -> Result<Rendered, Failure> {
    match command {
        Command::Spectrum { schmidt, .. } => {
            let values = parse_list(schmidt, "--schmidt")?;
            if values.len() != 3 {
                return Err(usage("--schmidt needs exactly three coefficients"));
            }
            let s = SchmidtVector::normalized(values).map_err(usage)?;
            let w = wh3_pair_spectrum(&s).map_err(numerical)?;
            let report = SpectrumReport {
                spectrum: w.spectrum().values().to_vec(),
                schmidt: s,
                e_values: w.e_values.to_vec(),
                g_values: w.g_values.to_vec(),
                t: w.t,
                theta: w.theta,
            };
            let mut rows = Vec::new();
            for (i, &v) in report.e_values.iter().enumerate() {
                rows.push(vec!["e".into(), i.to_string(), num(v)]);
            }
            for (i, &v) in report.g_values.iter().enumerate() {
                rows.push(vec!["g".into(), i.to_string(), num(v)]);
            }
            rows.push(vec!["t".into(), "0".into(), num(report.t)]);
            rows.push(vec!["theta".into(), "0".into(), num(report.theta)]);
            Rendered::new(&report, vec!["kind", "index", "value"], rows)
        }
        Command::Optimize {
            pair,
            function,
            mode,
            optimizer,
            ..
        } => {
            let pair = parse_pair(pair)?;
            let cfg = config(optimizer)?;
            let f = match (mode, function) {
                (Mode::Maxeig, _) => None,
                (_, Some(spec)) => Some(parse_function(spec)?),
                (_, None) => return Err(usage("--fn is required unless --mode maxeig")),
            };
            let result = match (mode, &f) {
                (Mode::Maxeig, _) => max_output_eigenvalue(&pair, &cfg),
                (Mode::Product, Some(f)) => max_trace_product(f, &pair, &cfg),
                (Mode::Entangled, Some(f)) => max_trace_entangled(f, &pair, &cfg),
                (Mode::Schmidt, Some(f)) => {
                    if !pair.is_werner_holevo_3() {
                        return Err(usage("--mode schmidt is only available for the pair wh:3,wh:3"));
                    }
                    max_trace_schmidt_wh3(f, &cfg)
                }
                _ => unreachable!("function presence checked above"),
            }
            .map_err(numerical)?;
            let mode_name = format!("{mode:?}").to_lowercase();
            let row = vec![
                mode_name,
                num(result.value),
                result.converged.to_string(),
                result.restarts_agreeing.to_string(),
                schmidt_cell(&result.schmidt),
            ];
            Rendered::new(&result, vec!["mode", "value", "converged", "restarts_agreeing", "schmidt"], vec![row])
        }
        Command::Gap {
            pair,
            function,
            optimizer,
            ..
        } => {
            let (f, pair, cfg) = (parse_function(function)?, parse_pair(pair)?, config(optimizer)?);
            let r = additivity_gap(&f, &pair, &cfg).map_err(numerical)?;
            let row = vec![
                r.function_spec.clone(),
                r.pair_spec.clone(),
                num(r.product_max),
                num(r.entangled_max),
                num(r.gap),
                format!("{:?}", r.verdict),
                r.converged.to_string(),
                schmidt_cell(&r.witness_schmidt),
            ];
            let mut out = Rendered::new(
                &r,
                vec![
                    "function",
                    "pair",
                    "product_max",
                    "entangled_max",
                    "gap",
                    "verdict",
                    "converged",
                    "witness_schmidt",
                ],
                vec![row],
            )?;
            out.unconverged = !r.converged;
            Ok(out)
        }
        Command::Certify { function, .. } => {
            let f = parse_function(function)?;
            let c = exhw_certificate(&f).map_err(numerical)?;
            let row = vec![f.spec_string(), num(c.lhs), num(c.rhs), c.non_additive.to_string()];
            Rendered::new(&c, vec!["function", "lhs", "rhs", "non_additive"], vec![row])
        }
        Command::KinkScan { pair, x0, optimizer, .. } => {
            let pair = parse_pair(pair)?;
            let cfg = config(optimizer)?;
            let grid = match x0 {
                Some(text) => parse_list(text, "--x0")?,
                None => default_kink_grid(),
            };
            let r = kink_scan(&grid, &pair, &cfg).map_err(usage_or_numerical)?;
            let rows = r
                .grid
                .iter()
                .map(|p| {
                    vec![
                        num(p.x0),
                        num(p.entangled_value),
                        num(p.product_value),
                        p.non_additive.to_string(),
                        format!("{:?}", p.verdict),
                    ]
                })
                .collect();
            Rendered::new(
                &r,
                vec!["x0", "entangled_value", "product_value", "non_additive", "verdict"],
                rows,
            )
        }
        Command::Suite { lambdas, optimizer, .. } => {
            let cfg = config(optimizer)?;
            let grid = match lambdas {
                Some(text) => parse_list(text, "--lambdas")?,
                None => default_lambda_grid(),
            };
            let r = operator_convex_suite(&grid, &cfg).map_err(usage_or_numerical)?;
            let rows = r
                .entries
                .iter()
                .map(|e| {
                    vec![
                        num(e.lambda),
                        num(e.simplex_max),
                        num(e.product_value),
                        num(e.gap),
                        list(e.argmax_schmidt.values()),
                        num(e.vertex_distance),
                        e.theta_monotone.to_string(),
                        e.passed.to_string(),
                    ]
                })
                .collect();
            Rendered::new(
                &r,
                vec![
                    "lambda",
                    "simplex_max",
                    "product_value",
                    "gap",
                    "argmax_schmidt",
                    "vertex_distance",
                    "theta_monotone",
                    "passed",
                ],
                rows,
            )
        }
        Command::TensorCheck {
            function,
            mu,
            trials,
            seed,
            ..
        } => {
            let f = parse_function(function)?;
            let mu = parse_list(mu, "--mu")?;
            let r = tensor_structure_check(&f, &mu, *trials, *seed).map_err(usage_or_numerical)?;
            let row = vec![
                r.function_spec.clone(),
                list(&r.mu),
                r.trials.to_string(),
                num(r.max_deviation),
                r.violations.len().to_string(),
                r.passed.to_string(),
            ];
            Rendered::new(
                &r,
                vec!["function", "mu", "trials", "max_deviation", "violations", "passed"],
                vec![row],
            )
        }
        Command::Convexity {
            function,
            dim,
            samples,
            seed,
            ..
        } => {
            let f = parse_function(function)?;
            let r = operator_convexity_test(&f, *dim, *samples, *seed).map_err(usage_or_numerical)?;
            let report = ConvexityReport {
                function_spec: f.spec_string(),
                dim: *dim,
                samples: *samples,
                passed: r.passed,
                worst_violation: r.worst_violation,
                witness: r.witness,
            };
            let row = vec![
                report.function_spec.clone(),
                dim.to_string(),
                samples.to_string(),
                report.passed.to_string(),
                num(report.worst_violation),
            ];
            Rendered::new(
                &report,
                vec!["function", "dim", "samples", "passed", "worst_violation"],
                vec![row],
            )
        }
    }
}

/// Argument errors raised by the library (bad grids, bad μ) count as usage errors.
fn usage_or_numerical(e: addlab::Error) -> Failure {
    match e {
        addlab::Error::InvalidArgument(_) | addlab::Error::Parse(_) => usage(e),
        other => numerical(other),
    }
}

fn output_args(command: &Command) -> &OutputArgs {
    match command {
        Command::Spectrum { output, .. }
        | Command::Optimize { output, .. }
        | Command::Gap { output, .. }
        | Command::Certify { output, .. }
        | Command::KinkScan { output, .. }
        | Command::Suite { output, .. }
        | Command::TensorCheck { output, .. }
        | Command::Convexity { output, .. } => output,
    }
}

fn write_report(rendered: &Rendered, out: &OutputArgs) -> Result<(), Failure> {
    let bytes = match out.format {
        Format::Json => rendered.json.clone(),
        Format::Csv => to_csv(&rendered.header, &rendered.rows).map_err(numerical)?,
    };
    match &out.out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| numerical(format!("cannot write report: {e}"))),
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(text) = std::env::var("ADDLAB_THREADS") {
        let n: usize = text
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| usage(format!("ADDLAB_THREADS must be a positive integer, got `{text}`")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(numerical)
}

/// Parses `argv`, runs the command and returns the process exit code.
fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = thread_pool().and_then(|pool| {
        pool.install(|| {
            let rendered = run_command(&cli.command)?;
            write_report(&rendered, output_args(&cli.command))?;
            Ok(rendered.unconverged)
        })
    });
    match result {
        Ok(false) => 0,
        Ok(true) => {
            eprintln!("error: the search did not converge; the report is evidence only");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let Failure::Usage(_) = e {
                let mut cmd = Cli::command();
                cmd.build();
                if let Some(sub) = cmd.find_subcommand_mut(cli.command.name()) {
                    eprintln!("\n{}", sub.render_usage());
                }
            }
            e.exit_code()
        }
    }
}

fn main() {
    std::process::exit(parse_and_dispatch(std::env::args_os()));
}
