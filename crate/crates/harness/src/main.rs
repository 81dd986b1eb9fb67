use std::path::PathBuf;
use std::process::ExitCode;

use ampsum::config::{SuiteConfig, SuiteName};
use ampsum::report::VerificationReport;
use ampsum::{run_suite, scan_convexity, HarnessError};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "ampsum", version, about = "Verification suites for twisted Kloosterman sums, L-values and amplifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite.
    Verify {
        suite: SuiteName,
        /// JSON config; unknown keys are rejected.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        workers: Option<usize>,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Parameter scans.
    Scan {
        #[command(subcommand)]
        what: ScanKind,
    },
    /// Inspect a saved JSON report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        /// Print the summary lines.
        #[arg(long)]
        summary: bool,
    },
}

#[derive(Subcommand)]
enum ScanKind {
    /// Maxima of |L(1/2 + it, chi)| over primes q <= q-max.
    Convexity {
        #[arg(long)]
        q_max: u64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 40)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn write_output(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(|e| e.to_string())
        }
    }
}

fn verify(
    suite: SuiteName,
    config: Option<PathBuf>,
    seed: Option<u64>,
    workers: Option<usize>,
    out: Option<PathBuf>,
    format: Format,
) -> Result<bool, String> {
    let mut cfg = match &config {
        Some(path) => SuiteConfig::load(path).map_err(|e| e.to_string())?,
        None => SuiteConfig::new(suite),
    };
    cfg.suite = suite;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(w) = workers {
        cfg.workers = w;
    }
    let report = run_suite(&cfg).map_err(|e: HarnessError| e.to_string())?;
    let bytes = match format {
        Format::Json => {
            let mut s = report.to_json().map_err(|e| e.to_string())?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf).map_err(|e| e.to_string())?;
            buf
        }
    };
    write_output(out.as_ref(), &bytes)?;
    eprint!("{}", report.summary_text());
    Ok(report.passed())
}

fn scan(q_max: u64, t_max: f64, steps: usize, out: Option<PathBuf>, format: Format) -> Result<bool, String> {
    let cfg = SuiteConfig::new(SuiteName::Convexity);
    let mut grid = cfg.grid.clone();
    grid.convexity.q_max = q_max;
    grid.convexity.t_max = t_max;
    grid.convexity.steps = steps;
    grid.validate().map_err(|e| e.to_string())?;
    let rep = scan_convexity(&cfg, q_max, t_max, steps).map_err(|e| e.to_string())?;
    let bytes = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rep).map_err(|e| e.to_string())?;
            s.push('\n');
            s.into_bytes()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["q", "max_abs", "argmax_k", "argmax_t"]).map_err(|e| e.to_string())?;
            for p in &rep.points {
                w.write_record([p.q.to_string(), format!("{:e}", p.max_abs), p.argmax_k.to_string(), p.argmax_t.to_string()])
                    .map_err(|e| e.to_string())?;
            }
            w.into_inner().map_err(|e| e.to_string())?
        }
    };
    write_output(out.as_ref(), &bytes)?;
    eprintln!(
        "fitted exponent {:.4} (report-only threshold {:.2}), {} moduli, refinement change {:.2e}",
        rep.exponent,
        rep.threshold,
        rep.points.len(),
        rep.refinement_change
    );
    Ok(true)
}

fn report(input: PathBuf, summary: bool) -> Result<bool, String> {
    let text = std::fs::read_to_string(&input).map_err(|e| format!("cannot read {}: {e}", input.display()))?;
    let rep: VerificationReport = serde_json::from_str(&text).map_err(|e| format!("malformed report: {e}"))?;
    if summary {
        print!("{}", rep.summary_text());
    } else {
        println!("{}", rep.body_json().map_err(|e| e.to_string())?);
    }
    Ok(rep.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { suite, config, seed, workers, out, format } => verify(suite, config, seed, workers, out, format),
        Command::Scan { what: ScanKind::Convexity { q_max, t_max, steps, out, format } } => scan(q_max, t_max, steps, out, format),
        Command::Report { input, summary } => report(input, summary),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
