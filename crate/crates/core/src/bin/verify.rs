use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use sasaki_core::report::{emit_report, Format};
use sasaki_core::suites::{run_suite_with_diagnostics, SuiteConfig, SUITES};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

/// Run verification suites for the contact structure of tangent sphere
/// bundles over space forms.
#[derive(Debug, Parser)]
#[command(name = "verify", version)]
struct Cli {
    /// Suite name, or `all` for the full matrix.
    #[arg(value_parser = suite_name)]
    suite: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    nu: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    c: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    eps: f64,
    #[arg(long, env = "VERIFY_SEED", default_value_t = 42)]
    seed: u64,
    /// Replaces the tolerance of every upper-bound check.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 1e-5)]
    fd_step: f64,
    #[arg(long, default_value_t = 10)]
    points: usize,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
}

fn suite_name(s: &str) -> Result<String, String> {
    if s == "all" || SUITES.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("expected one of: all, {}", SUITES.join(", ")))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let cfg = SuiteConfig {
        suite: cli.suite,
        n: cli.n,
        nu: cli.nu,
        c: cli.c,
        eps: cli.eps,
        seed: cli.seed,
        tol: cli.tol,
        fd_step: cli.fd_step,
        points: cli.points,
        samples: cli.samples,
    };
    let out = match run_suite_with_diagnostics(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for d in &out.diagnostics {
        eprintln!("{d}");
    }
    let format = match cli.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Text => Format::Text,
    };
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = emit_report(&out.report, format, &mut stdout).and_then(|_| stdout.flush()) {
        eprintln!("error: could not write report: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(out.report.exit_code() as u8)
}
