use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tscalc_core::cli::{exit_status, parse_scale_arg, run, ChainName, RunConfig, EXIT_CONFIG};
use tscalc_core::report::{to_json, to_text, OutputFormat};
use tscalc_core::Error;

#[derive(Parser)]
#[command(name = "tscalc", version, about = "Hermite–Hadamard inequality checks on time scales")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate inequality chains and report verdicts.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Text,
    Json,
    Both,
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON run configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Weight α in [0, 1]; repeat for a sweep.
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    /// Function of x (and y); repeat for several.
    #[arg(long = "function", allow_hyphen_values = true)]
    functions: Vec<String>,
    /// First scale, as JSON or KIND:ARGS (e.g. integers:0:5, interval:0:1).
    #[arg(long)]
    scale1: Option<String>,
    /// Second scale, same syntax as --scale1.
    #[arg(long)]
    scale2: Option<String>,
    /// a,b or a,b,c,d
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// Comma-separated subset of dinu1d, mr1, mr2, mr3, dragomir_r, grid_example.
    #[arg(long)]
    chains: Option<String>,
    #[arg(long, value_enum)]
    output: Option<Output>,
    /// Write the report here instead of standard output (JSON when --output both).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    max_depth: Option<u32>,
    /// Evaluate chains without checking convexity first.
    #[arg(long)]
    no_hypothesis_check: bool,
    /// Exit 0 even when some reports fail the convexity check.
    #[arg(long)]
    allow_hypothesis_failure: bool,
}

fn flag_error(flag: &str, message: impl ToString) -> Error {
    Error::Config {
        path: flag.to_string(),
        message: message.to_string(),
    }
}

fn build_config(args: &VerifyArgs) -> Result<RunConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if !args.alphas.is_empty() {
        cfg.alphas = Some(args.alphas.clone());
    }
    if !args.functions.is_empty() {
        cfg.functions = args.functions.clone();
    }
    if let Some(s) = &args.scale1 {
        cfg.scale1 = Some(parse_scale_arg(s).map_err(|e| flag_error("--scale1", e))?);
    }
    if let Some(s) = &args.scale2 {
        cfg.scale2 = Some(parse_scale_arg(s).map_err(|e| flag_error("--scale2", e))?);
    }
    if let Some(w) = &args.window {
        let values = w
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| flag_error("--window", e))?;
        cfg.window = Some(values);
    }
    if let Some(c) = &args.chains {
        let chains = c
            .split(',')
            .map(|name| ChainName::parse(name.trim()).ok_or_else(|| flag_error("--chains", format!("unknown chain {name:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        cfg.chains = Some(chains);
    }
    if let Some(o) = args.output {
        cfg.output = match o {
            Output::Text => OutputFormat::Text,
            Output::Json => OutputFormat::Json,
            Output::Both => OutputFormat::Both,
        };
    }
    if let Some(v) = args.rel_tol {
        cfg.quadrature.rel_tol = v;
    }
    if let Some(v) = args.abs_tol {
        cfg.quadrature.abs_tol = v;
    }
    if let Some(v) = args.max_depth {
        cfg.quadrature.max_depth = v;
    }
    if args.no_hypothesis_check {
        cfg.check_hypothesis = false;
    }
    if args.allow_hypothesis_failure {
        cfg.allow_hypothesis_failure = true;
    }
    Ok(cfg)
}

fn verify(args: &VerifyArgs) -> Result<i32, Error> {
    let cfg = build_config(args)?;
    let reports = run(&cfg)?;
    let write = |path: &PathBuf, body: &str| std::fs::write(path, body).map_err(|e| flag_error("--out", e));
    match (cfg.output, &args.out) {
        (OutputFormat::Text, None) => print!("{}", to_text(&reports)),
        (OutputFormat::Json, None) => println!("{}", to_json(&reports)),
        (OutputFormat::Both, None) => {
            print!("{}", to_text(&reports));
            println!("{}", to_json(&reports));
        }
        (OutputFormat::Text, Some(p)) => write(p, &to_text(&reports))?,
        (OutputFormat::Json, Some(p)) => write(p, &(to_json(&reports) + "\n"))?,
        (OutputFormat::Both, Some(p)) => {
            print!("{}", to_text(&reports));
            write(p, &(to_json(&reports) + "\n"))?;
        }
    }
    Ok(exit_status(&reports, cfg.allow_hypothesis_failure))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Verify(args) => match verify(args) {
            Ok(code) => code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        },
    };
    ExitCode::from(code as u8)
}
